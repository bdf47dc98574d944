"""Reference values for the C2 x D4 worked example.

Generators act on the two-qubit register; ``a`` is the central involution,
``b`` a reflection and ``c`` a quarter turn of the square.
"""

from __future__ import annotations

import numpy as np

_I = np.eye(4)

# 3-dim orthogonal representation: a = -I, b a reflection, c a rotation about x
CLASSICAL = {
    "a": -np.eye(3),
    "b": np.diag([-1.0, 1.0, -1.0]),
    "c": np.array([[1.0, 0, 0], [0, 0, -1], [0, 1, 0]]),
}

# CLASSICAL (+) I_1
PADDED = {
    "a": np.diag([-1.0, -1, -1, 1]),
    "b": np.diag([-1.0, 1, -1, 1]),
    "c": np.array([[1.0, 0, 0, 0], [0, 0, -1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
}

# Reference matrices quoted for b c^2 (Z on qubit 0 up to sign) and b c^3 (SWAP)
REFERENCE_BC2 = np.diag([-1.0, -1, 1, 1])
REFERENCE_BC3 = np.array([[1.0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])

# One trained outcome of the variational search (RY-CZ-RY ansatz, 4 angles each)
TRAINED_PARAMS = {
    "a": np.array([5.84551571, -8.06312288, -12.12870095, -17.06961836]),
    "b": np.array([16.17214308, 13.9280257, -9.88895781, 4.92153015]),
    "c": np.array([13.69949734, -8.06312283, 2.00846589, 33.19586423]),
}


def analytic_params(phi: float) -> dict[str, np.ndarray]:
    """One-parameter family of exact circuit parameters."""
    pi = np.pi
    return {
        "a": np.array([3 * pi - phi, 3 * phi, phi - pi, 4 * pi - 3 * phi]),
        "b": np.array([phi, 3 * phi - pi, 2 * pi - phi, 3 * pi - 3 * phi]),
        "c": np.array([(pi - 2 * phi) / 2, 3 * phi, (pi + 2 * phi) / 2, 4 * pi - 3 * phi]),
    }


# Generator unitaries of the family at phi = 0
ANALYTIC_AT_ZERO = {
    "a": np.diag([-1.0, 1, -1, -1]),
    "b": np.diag([1.0, 1, -1, 1]),
    "c": np.array([[0.0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1]]),
}
