"""Quantum representations of finite groups.

A :class:`QuantumRepresentation` stores one unitary per group element.  Two
constructions are provided: the regular (Cayley) permutation representation
padded to a power-of-two dimension, and unitarization + identity padding of
a classical matrix representation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    DimMismatch,
    DimTooSmall,
    NotFaithful,
    NotHomomorphism,
    ParseError,
    SearchFailed,
    TooLarge,
)
from .group import FiniteGroup, Word, regular_representation
from .linalg import (
    DEFAULT_TOL,
    canonical_state,
    direct_sum_pad,
    homomorphism_residual,
    is_scalar_identity,
    matrix_from_json,
    matrix_to_json,
    normalize,
    phase_degenerate_elements,
    projective_equal,
    stack_rep,
    unitarize,
    warn_phase_degenerate,
)

MAX_DIM = 2**12
TORSOR_ATTEMPTS = 100


def next_power_of_two(m: int) -> int:
    return 1 << max(0, (m - 1).bit_length())


@dataclass(eq=False)
class QuantumRepresentation:
    group: FiniteGroup
    matrices: np.ndarray  # (|G|, d, d), indexed like group.elements
    mode: str = "exact"  # "exact" | "projective"
    tol: float = 1e-10

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def n_qubits(self) -> int | None:
        n = self.dim.bit_length() - 1
        return n if (1 << n) == self.dim else None

    def __getitem__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def of_word(self, word: Word, assignment: Mapping[str, int] | None = None) -> np.ndarray:
        """Matrix product over the letters of ``word`` (left to right)."""
        assignment = self.group.assignment if assignment is None else assignment
        out = np.eye(self.dim, dtype=np.complex128)
        for label, exp in word.letters:
            M = self.matrices[assignment[label]]
            out = out @ (M if exp == 1 else M.conj().T)
        return out

    def generator_matrices(self) -> dict[str, np.ndarray]:
        return {lbl: self.matrices[g] for lbl, g in self.group.assignment.items()}

    def homomorphism_residual(self) -> float:
        """Largest deviation of ``M[g] M[h]`` from ``M[gh]`` (up to phase in projective mode)."""
        if self.mode == "exact":
            return homomorphism_residual(self.matrices, self.group.mul_table)
        worst = 0.0
        d = self.dim
        for g in range(self.group.order):
            prod = np.einsum("ij,hjk->hik", self.matrices[g], self.matrices)
            target = self.matrices[self.group.mul_table[g]]
            t = np.einsum("hij,hij->h", target.conj(), prod)
            phase = t / np.maximum(np.abs(t), 1e-300)
            diff = prod - phase[:, None, None] * target
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def to_dict(self) -> dict:
        G = self.group
        return {
            "dim": self.dim,
            "mode": self.mode,
            "generators": {lbl: matrix_to_json(M) for lbl, M in self.generator_matrices().items()},
            "elements": {G.element_name(g): matrix_to_json(self.matrices[g]) for g in range(G.order)},
        }


def representation_from_generators(
    G: FiniteGroup, gen_matrices: Mapping[str, np.ndarray], mode: str = "exact", tol: float = 1e-10
) -> QuantumRepresentation:
    """Extend generator matrices to all of ``G`` along BFS words: ``M[g*s] = M[g] M[s]``."""
    labels = G.generator_labels
    mats = [np.asarray(gen_matrices[lbl], dtype=np.complex128) for lbl in labels]
    d = mats[0].shape[0]
    out = np.full((G.order, d, d), np.nan, dtype=np.complex128)
    out[G.identity_index] = np.eye(d)
    done = {G.identity_index}
    queue = deque([G.identity_index])
    while queue:
        g = queue.popleft()
        for s, gi in enumerate(G.generator_indices):
            h = G.mul(g, gi)
            if h not in done:
                out[h] = out[g] @ mats[s]
                done.add(h)
                queue.append(h)
    return QuantumRepresentation(G, out, mode=mode, tol=tol)


def cayley_quantum_rep(G: FiniteGroup, dim: int | None = None) -> QuantumRepresentation:
    """Regular-representation permutation matrices, identity-padded to ``dim``.

    ``dim`` defaults to the next power of two at or above ``|G|``.
    """
    if G.order > MAX_DIM:
        raise TooLarge(f"|G| = {G.order} > {MAX_DIM}")
    d = next_power_of_two(G.order) if dim is None else int(dim)
    if d < G.order:
        raise DimTooSmall(f"dim {d} < |G| = {G.order}")
    reg = regular_representation(G)
    mats = np.zeros((G.order, d, d), dtype=np.complex128)
    for g, p in reg.items():
        mats[g] = direct_sum_pad(p.matrix(), d - G.order)
    return QuantumRepresentation(G, mats, mode="exact", tol=1e-12)


def classical_to_quantum_rep(
    G: FiniteGroup,
    rep,
    target_dim: int | None = None,
    tol: float = 1e-8,
    method: str = "cholesky",
) -> QuantumRepresentation:
    """Unitarize a faithful classical representation and pad it with ``I_k``.

    ``rep`` maps element index -> matrix (or is a stacked ``(|G|, m, m)``
    array, or a ``{label: matrix}`` dict over generator labels).  With
    ``k = target_dim - m >= 1`` no non-identity element can become a global
    phase.  ``k = 0`` with phase-degenerate elements triggers a
    :class:`PhaseDegenerateWarning`.
    """
    if isinstance(rep, Mapping) and set(rep) <= set(G.generator_labels) and rep:
        base = representation_from_generators(G, rep).matrices
    else:
        base = stack_rep(rep, G.order)
    m = base.shape[1]
    scale = max(1.0, float(np.max(np.abs(base))))
    if homomorphism_residual(base, G.mul_table) > tol * scale**2:
        raise NotHomomorphism("classical matrices do not respect the group law")
    flat = base.reshape(G.order, -1)
    for g in range(G.order):
        dup = np.flatnonzero(np.max(np.abs(flat - flat[g]), axis=1) <= tol)
        if dup.size > 1:
            raise NotFaithful(f"elements {[G.element_name(int(h)) for h in dup]} share a matrix")
    d = next_power_of_two(m) if target_dim is None else int(target_dim)
    if d < m:
        raise DimTooSmall(f"target dim {d} < representation dim {m}")
    uni = unitarize(base, G, method=method, tol=tol)
    k = d - m
    if k == 0:
        degenerate = phase_degenerate_elements(uni, G.identity_index, tol)
        if degenerate:
            warn_phase_degenerate([G.element_name(g) for g in degenerate])
    mats = np.stack([direct_sum_pad(U, k) for U in uni])
    return QuantumRepresentation(G, mats, mode="exact", tol=1e-10)


@dataclass
class FaithfulnessReport:
    faithful: bool
    identity_ok: bool
    colliding_pairs: list[tuple[int, int]] = field(default_factory=list)


def check_faithful(Q: QuantumRepresentation, tol: float = DEFAULT_TOL) -> FaithfulnessReport:
    """Faithful in the projective sense: no two distinct elements equal up to phase."""
    G = Q.group
    d = Q.dim
    ident = Q.matrices[G.identity_index]
    if Q.mode == "exact":
        identity_ok = bool(np.max(np.abs(ident - np.eye(d))) <= max(tol, Q.tol))
    else:
        identity_ok = is_scalar_identity(ident, max(tol, Q.tol))
    flat = Q.matrices.reshape(G.order, -1)
    # |tr(U_g^H U_h)| / d close to 1 flags candidates; each is confirmed exactly
    pairs = []
    chunk = max(1, 2**22 // max(1, flat.shape[1]))
    for start in range(0, G.order, chunk):
        block = np.abs(flat[start : start + chunk].conj() @ flat.T) / d
        for i, j in zip(*np.nonzero(block >= 1 - max(tol, 1e-6))):
            g, h = start + int(i), int(j)
            if g < h and projective_equal(Q.matrices[g], Q.matrices[h], tol):
                pairs.append((g, h))
    return FaithfulnessReport(faithful=identity_ok and not pairs, identity_ok=identity_ok, colliding_pairs=pairs)


# ---------------------------------------------------------------------------
# Orbits and stabilizers
# ---------------------------------------------------------------------------


def _images(Q: QuantumRepresentation, psi) -> np.ndarray:
    psi = normalize(psi)
    if psi.shape[0] != Q.dim:
        raise DimMismatch(f"state dim {psi.shape[0]} != representation dim {Q.dim}")
    return np.einsum("gij,j->gi", Q.matrices, psi)


def orbit(Q: QuantumRepresentation, psi, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Distinct states (up to phase) in ``{U_g psi}``, canonicalized.

    Images are clustered greedily on the overlap matrix ``|<U_g psi|U_h psi>|``,
    using the same ``>= 1 - tol`` test as :func:`stabilizer`, so the two agree.
    """
    images = _images(Q, psi)
    n = images.shape[0]
    assigned = np.zeros(n, dtype=bool)
    reps: list[np.ndarray] = []
    chunk = max(1, 2**22 // max(1, n))
    for start in range(0, n, chunk):
        block = np.abs(images[start : start + chunk].conj() @ images.T)
        for i in range(block.shape[0]):
            g = start + i
            if assigned[g]:
                continue
            reps.append(canonical_state(images[g]))
            assigned |= block[i] >= 1 - tol
    return reps


def stabilizer(Q: QuantumRepresentation, psi, tol: float = DEFAULT_TOL) -> list[int]:
    """Elements fixing ``psi`` up to a global phase."""
    images = _images(Q, psi)
    overlaps = np.abs(images.conj() @ normalize(psi))
    return [int(g) for g in np.flatnonzero(overlaps >= 1 - tol)]


def torsor_point(Q: QuantumRepresentation, seed=None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """A state whose orbit has exactly ``|G|`` points (trivial stabilizer)."""
    d = Q.dim
    rng = np.random.default_rng(seed)
    psi = normalize(np.arange(1, d + 1, dtype=float))
    for _ in range(TORSOR_ATTEMPTS):
        if len(stabilizer(Q, psi, tol)) == 1 and len(orbit(Q, psi, tol)) == Q.group.order:
            return psi
        noise = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi = normalize(np.arange(1, d + 1, dtype=float) + noise)
    raise SearchFailed(f"no torsor point after {TORSOR_ATTEMPTS} attempts; representation is likely not faithful")


# ---------------------------------------------------------------------------
# JSON export / import
# ---------------------------------------------------------------------------


def representation_to_json(Q: QuantumRepresentation, spec=None) -> dict:
    out = Q.to_dict()
    if spec is not None:
        out["group"] = spec.to_dict()
    return out


def generator_matrices_from_json(data: Mapping) -> dict[str, np.ndarray]:
    """Read ``{label: matrix}``; accepts a full representation file or a bare mapping."""
    if "generators" in data and isinstance(data["generators"], Mapping):
        data = data["generators"]
    try:
        return {str(k): matrix_from_json(v) for k, v in data.items()}
    except AttributeError as exc:
        raise ParseError("expected a JSON object of matrices") from exc


def load_generator_matrices(path) -> dict[str, np.ndarray]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from exc
    return generator_matrices_from_json(data)
