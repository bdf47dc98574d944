"""Grover steps as cyclic group elements, modular multiplication as a
permutation of basis states, and hidden-subgroup state preparation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import BadTarget, InputError, NotCoprime, NotSubgroup, ParseError, TooLarge, UnknownLabel
from .group import FiniteGroup, Permutation, load_group_spec
from .linalg import is_scalar_identity, is_unitary
from .reps import next_power_of_two

MAX_HSP_DIM = 2**12


# ---------------------------------------------------------------------------
# Grover
# ---------------------------------------------------------------------------


def grover_step(n_qubits: int, target: int) -> np.ndarray:
    """Diffusion times oracle: ``(2|s><s| - I)(I - 2|t><t|)``."""
    N = 2**n_qubits
    if not 0 <= target < N:
        raise BadTarget(f"target {target} outside [0, {N})")
    s = np.full(N, 1 / np.sqrt(N))
    oracle = np.eye(N)
    oracle[target, target] = -1.0
    diffusion = 2 * np.outer(s, s) - np.eye(N)
    return (diffusion @ oracle).astype(np.complex128)


def grover_angle(n_qubits: int) -> float:
    return 2 * np.arcsin(1 / np.sqrt(2**n_qubits))


def projective_order(U, max_k: int = 10_000, tol: float = 1e-9) -> int | None:
    """Smallest ``k <= max_k`` with ``U**k`` equal to the identity up to phase."""
    U = np.asarray(U, dtype=np.complex128)
    if not is_unitary(U, max(tol, 1e-10)):
        raise InputError("projective_order needs a unitary")
    P = U.copy()
    for k in range(1, max_k + 1):
        if is_scalar_identity(P, tol):
            return k
        P = P @ U
    return None


def linear_order(U, max_k: int = 10_000, tol: float = 1e-9) -> int | None:
    """Smallest ``k <= max_k`` with ``U**k == I`` exactly (phase included)."""
    U = np.asarray(U, dtype=np.complex128)
    eye = np.eye(U.shape[0])
    P = U.copy()
    for k in range(1, max_k + 1):
        if np.max(np.abs(P - eye)) <= tol:
            return k
        P = P @ U
    return None


# ---------------------------------------------------------------------------
# Modular multiplication
# ---------------------------------------------------------------------------


def _check_coprime(a: int, N: int) -> None:
    if N < 2 or gcd(a, N) != 1:
        raise NotCoprime(f"gcd({a}, {N}) != 1")


def multiplicative_order(a: int, N: int) -> int:
    """Smallest ``r >= 1`` with ``a**r = 1 (mod N)``."""
    _check_coprime(a, N)
    r, x = 1, a % N
    while x != 1 % N:
        x = (x * a) % N
        r += 1
    return r


def qme_operator(N: int, a: int) -> Permutation:
    """``x -> a x mod N`` for ``x < N`` on ``2**ceil(log2 N)`` points; padding states stay fixed."""
    _check_coprime(a, N)
    if not 0 < a < N:
        raise InputError(f"need 0 < a < N, got a = {a}")
    size = next_power_of_two(N)
    return Permutation(tuple((a * x) % N if x < N else x for x in range(size)))


def basis_orbit(perm: Permutation, x: int) -> list[int]:
    """``x, p(x), p(p(x)), ...`` until it returns to ``x``."""
    out = [x]
    y = perm(x)
    while y != x:
        out.append(y)
        y = perm(y)
    return out


# ---------------------------------------------------------------------------
# Hidden subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleFunction:
    """``f: G -> X`` as a table over element indices."""

    group: FiniteGroup
    table: tuple[Hashable, ...]

    def __post_init__(self):
        if len(self.table) != self.group.order:
            raise InputError(f"oracle table has {len(self.table)} entries for |G| = {self.group.order}")

    def __call__(self, g: int) -> Hashable:
        return self.table[g]

    @property
    def codomain(self) -> list[Hashable]:
        seen: dict[Hashable, None] = {}
        for x in self.table:
            seen.setdefault(x, None)
        return list(seen)

    def label_index(self) -> dict[Hashable, int]:
        return {x: i for i, x in enumerate(self.codomain)}

    @classmethod
    def from_labels(cls, G: FiniteGroup, labels: Mapping[str, Hashable]) -> "OracleFunction":
        """Build from ``{element_name: label}``; every element must be named."""
        names = {G.element_name(g): g for g in range(G.order)}
        unknown = set(labels) - set(names)
        if unknown:
            raise UnknownLabel(f"unknown element names {sorted(unknown)}")
        missing = set(names) - set(labels)
        if missing:
            raise InputError(f"oracle is not total; missing {sorted(missing)}")
        table = [None] * G.order
        for name, lbl in labels.items():
            table[names[name]] = lbl
        return cls(G, tuple(table))

    def to_dict(self, group_ref) -> dict:
        G = self.group
        return {"group": group_ref, "labels": {G.element_name(g): self.table[g] for g in range(G.order)}}


def _check_subgroup(G: FiniteGroup, H: Sequence[int]) -> list[int]:
    H = sorted(set(int(h) for h in H))
    if not G.is_subgroup(H):
        raise NotSubgroup(f"{H} is not closed under the group law")
    return H


def coset_oracle(G: FiniteGroup, H: Sequence[int]) -> OracleFunction:
    """Label each element by its left coset ``gH`` (labels 0, 1, ... in coset order)."""
    label = [None] * G.order
    for i, coset in enumerate(G.left_cosets(_check_subgroup(G, H))):
        for g in coset:
            label[g] = i
    return OracleFunction(G, tuple(label))


def validate_hiding(G: FiniteGroup, H: Sequence[int], f: OracleFunction) -> bool:
    """``f(g1) == f(g2)`` exactly when ``g1^-1 g2`` lies in ``H``, over all pairs."""
    Hs = set(_check_subgroup(G, H))
    for g1 in range(G.order):
        inv = G.inverse(g1)
        for g2 in range(G.order):
            same_coset = G.mul(inv, g2) in Hs
            if (f(g1) == f(g2)) != same_coset:
                return False
    return True


@dataclass
class HSPState:
    vector: np.ndarray
    group_dim: int
    label_dim: int

    def amplitude(self, g: int, label_index: int) -> complex:
        return complex(self.vector[g * self.label_dim + label_index])

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (group register, label register)."""
        return self.vector.reshape(self.group_dim, self.label_dim)


def hsp_initial_state(G: FiniteGroup, f: OracleFunction) -> HSPState:
    """``sum_g |g>|f(g)> / sqrt(|G|)``; both registers padded to powers of two."""
    gd = next_power_of_two(G.order)
    codomain = f.label_index()
    xd = next_power_of_two(len(codomain))
    if gd * xd > MAX_HSP_DIM:
        raise TooLarge(f"register product {gd} x {xd} exceeds {MAX_HSP_DIM}")
    vec = np.zeros(gd * xd, dtype=np.complex128)
    amp = 1 / np.sqrt(G.order)
    for g in range(G.order):
        vec[g * xd + codomain[f(g)]] = amp
    return HSPState(vec, gd, xd)


def measure_label(state: HSPState, label_index: int) -> tuple[float, np.ndarray]:
    """Probability of reading ``label_index`` on the second register and the collapsed first register."""
    col = state.as_matrix()[:, label_index]
    p = float(np.vdot(col, col).real)
    if p == 0:
        return 0.0, np.zeros_like(col)
    return p, col / np.sqrt(p)


def load_oracle(path) -> tuple[FiniteGroup, OracleFunction]:
    """Read ``{"group": name-or-path, "labels": {element_name: label}}``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        ref, labels = data["group"], data["labels"]
    except FileNotFoundError as exc:
        raise ParseError(f"no such file {path}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"bad oracle file {path}: {exc}") from exc
    if isinstance(ref, str) and not Path(ref).is_absolute() and (path.parent / ref).exists():
        ref = str(path.parent / ref)
    G = load_group_spec(ref).build()
    return G, OracleFunction.from_labels(G, labels)
