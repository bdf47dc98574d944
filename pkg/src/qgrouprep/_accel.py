"""Statevector kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time.  Set ``QGROUPREP_BACKEND=numpy``
(or ``QGROUPREP_DISABLE_NUMBA=1``) to force the numpy path; the numba path
is used by default when numba imports cleanly.

All kernels act in place on a 2-D complex array ``states`` of shape
``(2**n, m)``: each column is one statevector.  Qubits are addressed by
their *bit position* in the basis index (bit 0 = least significant); the
qubit-number to bit-position conversion lives in :mod:`qgrouprep.circuits`.
"""

from __future__ import annotations

import os

import numpy as np


def _want_numba() -> bool:
    if os.environ.get("QGROUPREP_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return False
    return os.environ.get("QGROUPREP_BACKEND", "numba").strip().lower() != "numpy"


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _pair_indices(dim: int, bit: int, cmask: int) -> np.ndarray:
    idx = np.arange(dim, dtype=np.int64)
    keep = ((idx >> bit) & 1) == 0
    if cmask:
        keep &= (idx & cmask) == cmask
    return idx[keep]


def np_apply_1q(states: np.ndarray, mat: np.ndarray, bit: int, cmask: int) -> None:
    """Apply a 2x2 ``mat`` on ``bit``, conditioned on all bits of ``cmask`` being 1."""
    i0 = _pair_indices(states.shape[0], bit, cmask)
    i1 = i0 | (1 << bit)
    a = states[i0]
    b = states[i1]
    states[i0] = mat[0, 0] * a + mat[0, 1] * b
    states[i1] = mat[1, 0] * a + mat[1, 1] * b


def np_apply_swap(states: np.ndarray, bit_a: int, bit_b: int, cmask: int) -> None:
    idx = np.arange(states.shape[0], dtype=np.int64)
    sel = (((idx >> bit_a) & 1) == 1) & (((idx >> bit_b) & 1) == 0)
    if cmask:
        sel &= (idx & cmask) == cmask
    i_ab = idx[sel]
    i_ba = i_ab ^ ((1 << bit_a) | (1 << bit_b))
    tmp = states[i_ab].copy()
    states[i_ab] = states[i_ba]
    states[i_ba] = tmp


def np_quadratic_fidelities(words: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """``out[r, s] = |<v_s| W_r |v_s>|**2`` for words ``(R, d, d)`` and vecs ``(S, d)``."""
    amp = np.einsum("si,rij,sj->rs", vecs.conj(), words, vecs, optimize=True)
    return amp.real**2 + amp.imag**2


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

HAVE_NUMBA = False
if _want_numba():
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on the environment
        HAVE_NUMBA = False

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _insert_zero(i, bit):
        low = i & ((1 << bit) - 1)
        return ((i >> bit) << (bit + 1)) | low

    @njit(cache=True, nogil=True)
    def nb_apply_1q(states, mat, bit, cmask):
        half = states.shape[0] >> 1
        m = states.shape[1]
        m00 = mat[0, 0]
        m01 = mat[0, 1]
        m10 = mat[1, 0]
        m11 = mat[1, 1]
        step = 1 << bit
        for k in range(half):
            i0 = _insert_zero(k, bit)
            if (i0 & cmask) != cmask:
                continue
            i1 = i0 | step
            for c in range(m):
                a = states[i0, c]
                b = states[i1, c]
                states[i0, c] = m00 * a + m01 * b
                states[i1, c] = m10 * a + m11 * b

    @njit(cache=True, nogil=True)
    def nb_apply_swap(states, bit_a, bit_b, cmask):
        dim = states.shape[0]
        m = states.shape[1]
        flip = (1 << bit_a) | (1 << bit_b)
        for i in range(dim):
            if ((i >> bit_a) & 1) == 1 and ((i >> bit_b) & 1) == 0 and (i & cmask) == cmask:
                j = i ^ flip
                for c in range(m):
                    t = states[i, c]
                    states[i, c] = states[j, c]
                    states[j, c] = t

    @njit(cache=True, nogil=True)
    def nb_quadratic_fidelities(words, vecs):
        n_words = words.shape[0]
        n_vecs = vecs.shape[0]
        d = vecs.shape[1]
        out = np.empty((n_words, n_vecs))
        for r in range(n_words):
            for s in range(n_vecs):
                acc = 0j
                for i in range(d):
                    row = 0j
                    for j in range(d):
                        row += words[r, i, j] * vecs[s, j]
                    acc += np.conj(vecs[s, i]) * row
                out[r, s] = acc.real * acc.real + acc.imag * acc.imag
        return out


if HAVE_NUMBA:
    BACKEND = "numba"
    _apply_1q = nb_apply_1q
    _apply_swap = nb_apply_swap
    _quadratic_fidelities = nb_quadratic_fidelities
else:
    BACKEND = "numpy"
    _apply_1q = np_apply_1q
    _apply_swap = np_apply_swap
    _quadratic_fidelities = np_quadratic_fidelities


def apply_1q(states: np.ndarray, mat: np.ndarray, bit: int, cmask: int = 0) -> None:
    _apply_1q(states, np.ascontiguousarray(mat, dtype=np.complex128), int(bit), int(cmask))


def apply_swap(states: np.ndarray, bit_a: int, bit_b: int, cmask: int = 0) -> None:
    _apply_swap(states, int(bit_a), int(bit_b), int(cmask))


def quadratic_fidelities(words: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return _quadratic_fidelities(
        np.ascontiguousarray(words, dtype=np.complex128),
        np.ascontiguousarray(vecs, dtype=np.complex128),
    )
