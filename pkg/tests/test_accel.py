import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qgrouprep import _accel
from qgrouprep.linalg import random_unitary

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba backend disabled")


def kron_1q(mat, bit, n):
    """Full-space operator for a 2x2 gate on ``bit`` (bit 0 = least significant)."""
    out = np.eye(1)
    for b in range(n - 1, -1, -1):
        out = np.kron(out, mat if b == bit else np.eye(2))
    return out


def controlled(mat, bit, cmask, n):
    full = kron_1q(mat, bit, n)
    d = 2**n
    out = np.eye(d, dtype=complex)
    for j in range(d):
        if j & cmask == cmask:
            out[:, j] = full[:, j]
    return out


cases = st.integers(1, 5).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(0, n - 1),
        st.integers(0, 2**n - 1),
        st.integers(0, 2**32 - 1),
        st.integers(1, 3),
    )
)


@given(cases)
def test_apply_1q_against_kron(case):
    n, bit, cmask, seed, m = case
    cmask &= ~(1 << bit)
    mat = random_unitary(2, seed)
    rng = np.random.default_rng(seed)
    states = rng.standard_normal((2**n, m)) + 1j * rng.standard_normal((2**n, m))
    expected = controlled(mat, bit, cmask, n) @ states
    for fn in [_accel.np_apply_1q] + ([_accel.nb_apply_1q] if _accel.HAVE_NUMBA else []):
        s = states.copy()
        fn(s, mat, bit, cmask)
        np.testing.assert_allclose(s, expected, atol=1e-12)


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.permutations(range(n)))))
def test_apply_swap_permutes_bits(case):
    n, order = case
    a, b = order[0], order[1]
    states = np.arange(2**n, dtype=complex).reshape(-1, 1).copy()
    _accel.apply_swap(states, a, b)
    for i in range(2**n):
        j = int(states[i, 0].real)
        bit_a, bit_b = (j >> a) & 1, (j >> b) & 1
        swapped = j ^ ((bit_a ^ bit_b) << a) ^ ((bit_a ^ bit_b) << b)
        assert swapped == i


@needs_numba
def test_swap_backends_agree(rng):
    states = rng.standard_normal((32, 2)) + 0j
    a, b = states.copy(), states.copy()
    _accel.np_apply_swap(a, 0, 3, 1 << 2)
    _accel.nb_apply_swap(b, 0, 3, 1 << 2)
    np.testing.assert_array_equal(a, b)


def test_quadratic_fidelities(rng):
    W = np.stack([random_unitary(4, s) for s in range(3)])
    V = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    expected = np.array([[abs(np.vdot(v, w @ v)) ** 2 for v in V] for w in W])
    np.testing.assert_allclose(_accel.np_quadratic_fidelities(W, V), expected, atol=1e-12)
    np.testing.assert_allclose(_accel.quadratic_fidelities(W, V), expected, atol=1e-12)
    if _accel.HAVE_NUMBA:
        np.testing.assert_allclose(_accel.nb_quadratic_fidelities(W, V), expected, atol=1e-12)


SCRIPT = """
import json, numpy as np
from qgrouprep import _accel
from qgrouprep.circuits import circuit_unitary
from qgrouprep.decompose import decompose_unitary
from qgrouprep.linalg import random_unitary
U = circuit_unitary(decompose_unitary(random_unitary(8, 5)))
print(json.dumps({"backend": _accel.BACKEND, "re": U.real.round(12).tolist(), "im": U.imag.round(12).tolist()}))
"""


def _run(env_extra):
    env = {**os.environ, **env_extra}
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.parametrize("flag", [{"QGROUPREP_BACKEND": "numpy"}, {"QGROUPREP_DISABLE_NUMBA": "1"}])
def test_env_flag_selects_numpy(flag):
    forced = _run({**flag})
    assert forced["backend"] == "numpy"
    default = _run({"QGROUPREP_BACKEND": "numba", "QGROUPREP_DISABLE_NUMBA": ""})
    np.testing.assert_allclose(np.array(forced["re"]), np.array(default["re"]), atol=1e-11)
    np.testing.assert_allclose(np.array(forced["im"]), np.array(default["im"]), atol=1e-11)
