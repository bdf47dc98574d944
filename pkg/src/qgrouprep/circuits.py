"""Qubit circuits with exact dense statevector semantics.

Qubit 0 is the most significant bit of the basis index:
``b = q0 * 2**(n-1) + ... + q_{n-1}``, so a two-qubit matrix reads as
(first qubit) (x) (second qubit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import DimMismatch, InputError, ParseError, TooWide
from .linalg import projective_equal

MAX_UNITARY_QUBITS = 12

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_I2 = np.eye(2, dtype=np.complex128)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128)


_FIXED_1Q = {"X": _X, "Y": _Y, "Z": _Z, "H": _H}
_ROT_1Q = {"RX": rx, "RY": ry, "RZ": rz}
# number of qubits each kind acts on; None = variable (MCX: controls..., target)
_ARITY = {
    "X": 1, "Y": 1, "Z": 1, "H": 1, "RX": 1, "RY": 1, "RZ": 1,
    "CNOT": 2, "CZ": 2, "SWAP": 2, "MCX": None, "GLOBAL_PHASE": 0,
}
_NPARAMS = {"RX": 1, "RY": 1, "RZ": 1, "GLOBAL_PHASE": 1}
GATE_KINDS = tuple(_ARITY)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in _ARITY:
            raise InputError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        params = tuple(float(p) for p in self.params)
        arity = _ARITY[kind]
        if arity is not None and len(qubits) != arity:
            raise InputError(f"{kind} acts on {arity} qubits, got {qubits}")
        if kind == "MCX" and len(qubits) < 1:
            raise InputError("MCX needs at least a target qubit")
        if len(set(qubits)) != len(qubits):
            raise InputError(f"repeated qubit in {kind} {qubits}")
        if len(params) != _NPARAMS.get(kind, 0):
            raise InputError(f"{kind} takes {_NPARAMS.get(kind, 0)} parameters, got {params}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", params)

    @property
    def is_parameterized(self) -> bool:
        return self.kind in _ROT_1Q or self.kind == "GLOBAL_PHASE"

    def matrix_1q(self) -> np.ndarray:
        if self.kind in _FIXED_1Q:
            return _FIXED_1Q[self.kind]
        return _ROT_1Q[self.kind](self.params[0])

    def inverse(self) -> "Gate":
        if self.kind in _ROT_1Q or self.kind == "GLOBAL_PHASE":
            return Gate(self.kind, self.qubits, (-self.params[0],))
        return self  # X, Y, Z, H, CNOT, CZ, SWAP, MCX are involutions

    def to_dict(self) -> dict:
        return {"kind": self.kind.lower(), "qubits": list(self.qubits), "params": list(self.params)}

    @classmethod
    def from_dict(cls, data) -> "Gate":
        try:
            return cls(str(data["kind"]), tuple(data.get("qubits", ())), tuple(data.get("params", ())))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad gate record {data!r}") from exc


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 0:
            raise InputError("n_qubits must be non-negative")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if any(q < 0 or q >= self.n_qubits for q in gate.qubits):
            raise InputError(f"{gate.kind} on {gate.qubits} outside a {self.n_qubits}-qubit circuit")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def add(self, kind: str, *qubits: int, params: Sequence[float] = ()) -> "Circuit":
        return self.append(Gate(kind, tuple(qubits), tuple(params)))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DimMismatch("circuit widths differ")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)])

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        kind = kind.upper()
        return sum(1 for g in self.gates if g.kind == kind)

    def gate_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data) -> "Circuit":
        try:
            n = int(data["n_qubits"])
            gates = [Gate.from_dict(g) for g in data["gates"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad circuit record: {exc}") from exc
        return cls(n, gates)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Circuit":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed circuit JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def _apply_gate(states: np.ndarray, gate: Gate, n: int) -> None:
    bit = lambda q: n - 1 - q  # noqa: E731
    k = gate.kind
    if k == "GLOBAL_PHASE":
        states *= np.exp(1j * gate.params[0])
    elif k in _FIXED_1Q or k in _ROT_1Q:
        _accel.apply_1q(states, gate.matrix_1q(), bit(gate.qubits[0]))
    elif k == "CNOT":
        c, t = gate.qubits
        _accel.apply_1q(states, _X, bit(t), 1 << bit(c))
    elif k == "CZ":
        c, t = gate.qubits
        _accel.apply_1q(states, _Z, bit(t), 1 << bit(c))
    elif k == "MCX":
        *controls, t = gate.qubits
        mask = 0
        for c in controls:
            mask |= 1 << bit(c)
        _accel.apply_1q(states, _X, bit(t), mask)
    elif k == "SWAP":
        a, b = gate.qubits
        _accel.apply_swap(states, bit(a), bit(b))
    else:  # pragma: no cover - Gate validates kinds
        raise InputError(k)


def apply(circuit: Circuit, psi) -> np.ndarray:
    """Return ``U(circuit) @ psi``; ``psi`` may be one state or a ``(2**n, m)`` batch."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape[0] != 2**circuit.n_qubits:
        raise DimMismatch(f"state dim {psi.shape[0]} != 2**{circuit.n_qubits}")
    one = psi.ndim == 1
    states = np.array(psi.reshape(psi.shape[0], -1), dtype=np.complex128, order="C")
    for gate in circuit.gates:
        _apply_gate(states, gate, circuit.n_qubits)
    return states[:, 0] if one else states


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    if circuit.n_qubits > MAX_UNITARY_QUBITS:
        raise TooWide(f"{circuit.n_qubits} qubits > {MAX_UNITARY_QUBITS}")
    return apply(circuit, np.eye(2**circuit.n_qubits, dtype=np.complex128))


# ---------------------------------------------------------------------------
# Named gates
# ---------------------------------------------------------------------------


def _named_catalog() -> list[tuple[str, np.ndarray]]:
    singles = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H}
    cat: list[tuple[str, np.ndarray]] = [(k, v) for k, v in singles.items()]
    cat += [
        ("CZ", np.diag([1, 1, 1, -1]).astype(np.complex128)),
        ("CNOT", np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)),
        ("CNOT(1,0)", np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128)),
        ("SWAP", np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)),
    ]
    for a, A in singles.items():
        for b, B in singles.items():
            cat.append((f"{a}⊗{b}", np.kron(A, B)))
    return cat


_CATALOG = _named_catalog()


def match_named_gate(U, tol: float = 1e-8) -> str | None:
    """Catalog name of a 1- or 2-qubit unitary, compared up to global phase."""
    U = np.asarray(U, dtype=np.complex128)
    if U.shape not in ((2, 2), (4, 4)):
        return None
    for name, M in _CATALOG:
        if M.shape == U.shape and projective_equal(M, U, tol):
            return name
    return None
