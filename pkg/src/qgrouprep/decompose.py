"""Unitary and permutation synthesis into qubit circuits.

``decompose_unitary`` is a quantum Shannon decomposition: a cosine-sine
split of the top qubit, block-diagonal factors demultiplexed into two
half-size unitaries around a multiplexed RZ, and multiplexed rotations
lowered to RY/RZ + CNOT with Gray-code ordering.  Leaves are ZYZ Euler
rotations.  The CNOT count is exactly ``3/4 * 4**n - 3/2 * 2**n``
(0, 6, 36, 168 for n = 1..4), hence bounded by ``CNOT_BOUND_CONSTANT * 4**n``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .circuits import Circuit, Gate
from .errors import DegreeTooLarge, NotPowerOfTwo, NotUnitary, TooWide
from .group import Permutation
from .linalg import is_unitary

CNOT_BOUND_CONSTANT = 0.75
MAX_DECOMPOSE_QUBITS = 6
_ANGLE_EPS = 1e-13


def qsd_cnot_count(n: int) -> int:
    return (3 * 4**n) // 4 - (3 * 2**n) // 2 if n >= 1 else 0


def _zyz(U: np.ndarray, q: int) -> tuple[list[Gate], float]:
    """``U = exp(i alpha) RZ(beta) RY(gamma) RZ(delta)``; returns gates in time order and alpha."""
    alpha = np.angle(np.linalg.det(U)) / 2
    V = U * np.exp(-1j * alpha)
    a, b = V[0, 0], V[1, 0]
    gamma = 2 * np.arctan2(abs(b), abs(a))
    s = -2 * np.angle(a) if abs(a) > _ANGLE_EPS else 0.0  # beta + delta
    t = 2 * np.angle(b) if abs(b) > _ANGLE_EPS else 0.0  # beta - delta
    beta, delta = (s + t) / 2, (s - t) / 2
    gates = []
    for kind, ang in (("RZ", delta), ("RY", gamma), ("RZ", beta)):
        if abs(ang) > _ANGLE_EPS:
            gates.append(Gate(kind, (q,), (ang,)))
    return gates, float(alpha)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def multiplexed_rotation(kind: str, target: int, controls: list[int], angles) -> list[Gate]:
    """Uniformly controlled ``kind`` rotation: control value ``j`` applies ``R(angles[j])``.

    ``controls[0]`` is the most significant bit of ``j``.  Uses ``2**k`` CNOTs
    for ``k >= 1`` controls.
    """
    angles = np.asarray(angles, dtype=float)
    k = len(controls)
    if k == 0:
        return [Gate(kind, (target,), (angles[0],))] if abs(angles[0]) > _ANGLE_EPS else []
    size = 1 << k
    gray = np.array([_gray(i) for i in range(size)])
    j = np.arange(size)
    parity = np.array([[bin(int(x)).count("1") & 1 for x in row] for row in (j[:, None] & gray[None, :])])
    M = 1 - 2 * parity  # M[j, i] = (-1)^{|j & g_i|}
    alphas = M.T @ angles / size
    gates: list[Gate] = []
    for i in range(size):
        if abs(alphas[i]) > _ANGLE_EPS:
            gates.append(Gate(kind, (target,), (alphas[i],)))
        changed = int(gray[i] ^ gray[(i + 1) % size])
        bit = changed.bit_length() - 1
        gates.append(Gate("CNOT", (controls[k - 1 - bit], target)))
    return gates


def _demultiplex(A: np.ndarray, B: np.ndarray, qubits: list[int]) -> tuple[list[Gate], float]:
    """Gates for ``diag(A, B)`` controlled by ``qubits[0]`` acting on ``qubits[1:]``."""
    T, V = scipy.linalg.schur(A @ B.conj().T, output="complex")
    d = np.sqrt(np.diag(T).astype(np.complex128))
    W = (d[:, None] * V.conj().T) @ B
    g1, p1 = _qsd(W, qubits[1:])
    mux = multiplexed_rotation("RZ", qubits[0], qubits[1:], -2 * np.angle(d))
    g2, p2 = _qsd(V, qubits[1:])
    return g1 + mux + g2, p1 + p2


def _qsd(U: np.ndarray, qubits: list[int]) -> tuple[list[Gate], float]:
    if len(qubits) == 1:
        return _zyz(U, qubits[0])
    h = U.shape[0] // 2
    (u1, u2), theta, (v1, v2) = scipy.linalg.cossin(U, p=h, q=h, separate=True)
    right, p_right = _demultiplex(v1, v2, qubits)
    middle = multiplexed_rotation("RY", qubits[0], qubits[1:], 2 * theta)
    left, p_left = _demultiplex(u1, u2, qubits)
    return right + middle + left, p_right + p_left


def decompose_unitary(U, tol: float = 1e-8) -> Circuit:
    """Circuit over RY, RZ, CNOT and one GLOBAL_PHASE reproducing ``U`` exactly."""
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotPowerOfTwo(f"not a square matrix: {U.shape}")
    d = U.shape[0]
    n = d.bit_length() - 1
    if d < 1 or (1 << n) != d:
        raise NotPowerOfTwo(f"dimension {d} is not a power of two")
    if n > MAX_DECOMPOSE_QUBITS:
        raise TooWide(f"{n} qubits > {MAX_DECOMPOSE_QUBITS}")
    if not is_unitary(U, tol):
        raise NotUnitary("input is not unitary within tolerance")
    if n == 0:
        return Circuit(0, [Gate("GLOBAL_PHASE", (), (float(np.angle(U[0, 0])),))])
    gates, phase = _qsd(U, list(range(n)))
    phase = float(np.angle(np.exp(1j * phase)))
    if abs(phase) > _ANGLE_EPS:
        gates.append(Gate("GLOBAL_PHASE", (), (phase,)))
    return Circuit(n, gates)


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


def _transposition_gates(x: int, y: int, n: int) -> list[Gate]:
    """Gates swapping basis states ``|x>`` and ``|y>`` and fixing all others."""
    q = lambda bit: n - 1 - bit  # noqa: E731
    diff = x ^ y
    t = diff.bit_length() - 1
    if (x >> t) & 1:
        x, y = y, x
    others = [b for b in range(n) if b != t and (diff >> b) & 1]
    fan = [Gate("CNOT", (q(t), q(b))) for b in others]
    zeros = [Gate("X", (q(b),)) for b in range(n) if b != t and not (x >> b) & 1]
    controls = tuple(q(b) for b in range(n - 1, -1, -1) if b != t)
    if not controls:
        core = Gate("X", (q(t),))
    elif len(controls) == 1:
        core = Gate("CNOT", (controls[0], q(t)))
    else:
        core = Gate("MCX", controls + (q(t),))
    return fan + zeros + [core] + zeros + fan


def decompose_permutation(perm: Permutation, n_qubits: int) -> Circuit:
    """Phase-free X / CNOT / MCX circuit whose unitary is the permutation matrix.

    Each cycle ``(a1 a2 ... ak)`` is applied as the transpositions
    ``(a1 a2), (a1 a3), ..., (a1 ak)`` in time order.
    """
    if perm.degree > 2**n_qubits:
        raise DegreeTooLarge(f"degree {perm.degree} > 2**{n_qubits}")
    circ = Circuit(n_qubits)
    for cyc in perm.cycles():
        head = cyc[0]
        for other in cyc[1:]:
            circ.extend(_transposition_gates(head, other, n_qubits))
    return circ
