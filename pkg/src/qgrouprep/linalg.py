"""Dense complex linear algebra helpers: unitarity, projective equality, padding."""

from __future__ import annotations

import warnings
from typing import Mapping

import numpy as np
import scipy.linalg

from .errors import (
    DimMismatch,
    NonSquare,
    NotHomomorphism,
    NotUnitary,
    ParseError,
    PhaseDegenerateWarning,
    SingularFactorization,
    ZeroVector,
)

DEFAULT_TOL = 1e-8
_SIGNIFICANT = 1e-12


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {M.shape}")
    return M


def is_unitary(M, tol: float = 1e-10) -> bool:
    M = _square(M)
    if not np.all(np.isfinite(M)):
        return False
    return bool(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[0])), initial=0.0) <= tol)


def _pair(U, V, unitary_tol):
    U, V = _square(U), _square(V)
    if U.shape != V.shape:
        raise DimMismatch(f"{U.shape} vs {V.shape}")
    if not (is_unitary(U, unitary_tol) and is_unitary(V, unitary_tol)):
        raise NotUnitary("projective comparison needs unitary inputs")
    return U, V


def projective_equal(U, V, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``V = exp(i theta) U`` up to ``tol`` for some phase."""
    U, V = _pair(U, V, max(tol, 1e-8))
    d = U.shape[0]
    W = U.conj().T @ V
    s = np.trace(W) / d
    if abs(s) < 1 - tol:
        return False
    return bool(np.max(np.abs(W - s * np.eye(d))) <= tol * d)


def projective_distance(U, V) -> float:
    """``min_theta ||U - exp(i theta) V||_F / sqrt(d)``.

    Evaluated by aligning the phase first, which keeps the result accurate
    down to machine precision.
    """
    U, V = _square(U), _square(V)
    if U.shape != V.shape:
        raise DimMismatch(f"{U.shape} vs {V.shape}")
    t = np.vdot(V, U)  # tr(V^dagger U)
    phase = t / abs(t) if abs(t) > 0 else 1.0
    return float(np.linalg.norm(U - phase * V) / np.sqrt(U.shape[0]))


def is_scalar_identity(U, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``U`` is ``exp(i theta) I`` for some theta."""
    U = _square(U)
    return projective_equal(np.eye(U.shape[0]), U, tol)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    n = np.linalg.norm(psi)
    if n <= _SIGNIFICANT:
        raise ZeroVector("cannot normalize the zero vector")
    return psi / n


def canonical_state(psi) -> np.ndarray:
    """Remove the global phase so the first significant amplitude is real and >= 0."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    nz = np.flatnonzero(np.abs(psi) > _SIGNIFICANT)
    if nz.size == 0:
        raise ZeroVector("state has no significant amplitude")
    c = psi[nz[0]]
    out = psi * (abs(c) / c)
    out[nz[0]] = abs(c)
    return out


def projective_state_equal(psi, phi, tol: float = DEFAULT_TOL) -> bool:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if psi.shape != phi.shape:
        raise DimMismatch(f"{psi.shape} vs {phi.shape}")
    return bool(abs(np.vdot(psi, phi)) >= 1 - tol)


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


def homomorphism_residual(matrices: np.ndarray, mul_table: np.ndarray) -> float:
    """``max_{g,h} ||M[g] M[h] - M[gh]||_max`` for stacked matrices ``(|G|, m, m)``."""
    worst = 0.0
    for g in range(matrices.shape[0]):
        prod = np.einsum("ij,hjk->hik", matrices[g], matrices)
        worst = max(worst, float(np.max(np.abs(prod - matrices[mul_table[g]]))))
    return worst


def stack_rep(rep, order: int) -> np.ndarray:
    if isinstance(rep, Mapping):
        return np.stack([np.asarray(rep[g], dtype=np.complex128) for g in range(order)])
    return np.asarray(rep, dtype=np.complex128)


def unitarize(rep, G, method: str = "cholesky", tol: float = 1e-8) -> np.ndarray:
    """Conjugate an invertible representation into a unitary one.

    With ``S = sum_g rep(g)^H rep(g) = T^H T``, every ``T rep(g) T^-1`` is
    unitary.  ``method`` picks the factor: ``"cholesky"`` (upper Cholesky
    factor) or ``"sqrt"`` (Hermitian square root).  Returns an array of
    shape ``(|G|, m, m)`` indexed like ``G.elements``.
    """
    mats = stack_rep(rep, G.order)
    scale = max(1.0, float(np.max(np.abs(mats))))
    if homomorphism_residual(mats, G.mul_table) > tol * scale**2:
        raise NotHomomorphism("input matrices do not respect the group law")
    S = np.einsum("gji,gjk->ik", mats.conj(), mats)
    try:
        if method == "cholesky":
            T = scipy.linalg.cholesky(S, lower=False)
        elif method == "sqrt":
            w, V = np.linalg.eigh(S)
            if w.min() <= 0:
                raise np.linalg.LinAlgError("non-positive eigenvalue")
            T = (V * np.sqrt(w)) @ V.conj().T
        else:
            raise ValueError(f"unknown factorization {method!r}")
        T_inv = scipy.linalg.inv(T)
    except np.linalg.LinAlgError as exc:
        raise SingularFactorization(str(exc)) from exc
    out = np.einsum("ij,gjk,kl->gil", T, mats, T_inv)
    bad = [g for g in range(G.order) if not is_unitary(out[g], tol)]
    if bad:
        raise SingularFactorization(f"unitarization lost precision on elements {bad}")
    return out


def direct_sum_pad(M, k: int) -> np.ndarray:
    """Block-diagonal ``[[M, 0], [0, I_k]]``."""
    M = _square(M)
    m = M.shape[0]
    out = np.eye(m + k, dtype=np.complex128)
    out[:m, :m] = M
    return out


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix with phase-fixed R."""
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diag = np.diag(R)
    return Q * (diag / np.abs(diag))


def phase_degenerate_elements(matrices: np.ndarray, identity_index: int = 0, tol: float = DEFAULT_TOL) -> list[int]:
    """Non-identity elements whose matrix is a scalar multiple of I."""
    return [
        g
        for g in range(matrices.shape[0])
        if g != identity_index and is_scalar_identity(matrices[g], tol)
    ]


def warn_phase_degenerate(names: list[str]) -> None:
    warnings.warn(
        f"elements {names} map to a global phase times the identity; "
        "they are indistinguishable from e as quantum operators",
        category=PhaseDegenerateWarning,
        stacklevel=3,
    )


# ---------------------------------------------------------------------------
# JSON interchange: array-of-arrays of [re, im]
# ---------------------------------------------------------------------------


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix must be rows of [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    M = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(M)):
        raise ParseError("matrix has non-finite entries")
    return M
