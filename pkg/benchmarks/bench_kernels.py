# Compare the numba statevector kernels against the numpy fallback.
#
#   python3 benchmarks/bench_kernels.py [--repeat 20]
#
# Both kernel sets live in qgrouprep._accel regardless of the selected
# backend, so one process times both.

import argparse
import time

import numpy as np

from qgrouprep import _accel
from qgrouprep.circuits import ry


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def layer(apply_1q, states, n, mat):
    for b in range(n):
        apply_1q(states, mat, b, 0)
    for b in range(n - 1):
        apply_1q(states, mat, b, 1 << (b + 1))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba backend disabled; unset QGROUPREP_BACKEND / QGROUPREP_DISABLE_NUMBA")

    rng = np.random.default_rng(0)
    mat = ry(0.3)
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")

    for n, m in ((4, 16), (10, 1), (14, 1), (8, 256)):
        base = rng.standard_normal((2**n, m)) + 1j * rng.standard_normal((2**n, m))
        base = np.ascontiguousarray(base)
        a, b = base.copy(), base.copy()
        layer(_accel.np_apply_1q, a, n, mat)
        layer(_accel.nb_apply_1q, b, n, mat)  # compile + agreement check
        assert np.allclose(a, b)
        t_np = best_time(lambda: layer(_accel.np_apply_1q, base, n, mat), args.repeat)
        t_nb = best_time(lambda: layer(_accel.nb_apply_1q, base, n, mat), args.repeat)
        print(f"{f'gate layer n={n} m={m}':<28}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}")

    for R, S, d in ((6, 8, 4), (10, 50, 16), (4, 20, 64)):
        W = rng.standard_normal((R, d, d)) + 1j * rng.standard_normal((R, d, d))
        V = rng.standard_normal((S, d)) + 1j * rng.standard_normal((S, d))
        assert np.allclose(_accel.np_quadratic_fidelities(W, V), _accel.nb_quadratic_fidelities(W, V))
        t_np = best_time(lambda: _accel.np_quadratic_fidelities(W, V), args.repeat)
        t_nb = best_time(lambda: _accel.nb_quadratic_fidelities(W, V), args.repeat)
        print(f"{f'fidelities R={R} S={S} d={d}':<28}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
