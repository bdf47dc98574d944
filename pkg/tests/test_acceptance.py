"""Acceptance checks, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line (visible even under
capture) and then asserts.  Run on its own with

    pytest tests/test_acceptance.py -v
"""

import time

import numpy as np
import pytest

from qgrouprep import c2d4
from qgrouprep.applications import (
    basis_orbit,
    coset_oracle,
    grover_step,
    hsp_initial_state,
    multiplicative_order,
    OracleFunction,
    projective_order,
    qme_operator,
    validate_hiding,
)
from qgrouprep.circuits import circuit_unitary, match_named_gate
from qgrouprep.decompose import CNOT_BOUND_CONSTANT, decompose_unitary
from qgrouprep.group import Word, cyclic_group, load_group_spec
from qgrouprep.linalg import canonical_state, normalize, projective_distance, projective_equal, random_unitary
from qgrouprep.reps import cayley_quantum_rep, check_faithful, classical_to_quantum_rep, orbit, stabilizer, torsor_point
from qgrouprep.vqa import AnsatzConfig, AnsatzParams, extract_representation, generator_unitaries, relation_cost, train, verify_irrelations


@pytest.fixture
def report(capsys):
    def emit(number, checks, elapsed, limit):
        checks = dict(checks)
        checks[f"runtime {elapsed:.2f}s < {limit}s"] = elapsed < limit
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}"
        if failed:
            line += " -- failed: " + "; ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def test_criterion_01_method1_reproduction(report):
    t0 = time.perf_counter()
    spec = load_group_spec("c2xd4")
    G = spec.build()
    Q = classical_to_quantum_rep(G, c2d4.CLASSICAL, 4)
    checks = {}
    for lbl, g in G.assignment.items():
        checks[f"rho({lbl}) matches padded matrix"] = np.max(np.abs(Q[g] - c2d4.PADDED[lbl])) <= 1e-12
    checks["16 elements faithful"] = check_faithful(Q).faithful
    bc2 = Q.of_word(Word.parse("b c c"))
    bc3 = Q.of_word(Word.parse("b c c c"))
    checks["rho(bc^2) matches reference matrix"] = np.max(np.abs(bc2 - c2d4.REFERENCE_BC2)) <= 1e-12
    checks["rho(bc^2) is Z on the first qubit"] = match_named_gate(bc2) == "Z⊗I"
    checks["rho(bc^3) matches reference matrix"] = np.max(np.abs(bc3 - c2d4.REFERENCE_BC3)) <= 1e-12
    checks["rho(bc^3) is SWAP"] = match_named_gate(bc3) == "SWAP"
    report(1, checks, time.perf_counter() - t0, 1)


def test_criterion_02_factorization(report):
    t0 = time.perf_counter()
    G = load_group_spec("c2xd4").build()
    Q = classical_to_quantum_rep(G, c2d4.CLASSICAL, 4)
    c = Q.of_word(Word.parse("c"))
    prod = Q.of_word(Word.parse("b c c")) @ Q.of_word(Word.parse("b c c c"))
    checks = {"rho(c) = rho(bc^2) rho(bc^3) entrywise": np.max(np.abs(c - prod)) <= 1e-12}
    report(2, checks, time.perf_counter() - t0, 1)


def test_criterion_03_grover_orders(report):
    t0 = time.perf_counter()
    k2 = projective_order(grover_step(1, 1), 10_000, 1e-9)
    k4 = [projective_order(grover_step(2, t), 10_000, 1e-9) for t in range(4)]
    k8 = projective_order(grover_step(3, 0), 10_000, 1e-9)
    checks = {
        f"N=2 projective order 4 (got {k2})": k2 == 4,
        f"N=4 projective order 6 (got {sorted(set(k4))})": all(k == 6 for k in k4),
        f"N=8 no projective identity up to 1e4 (got {k8})": k8 is None,
    }
    report(3, checks, time.perf_counter() - t0, 10)


def test_criterion_04_shor(report):
    t0 = time.perf_counter()
    p = qme_operator(15, 2)
    r = multiplicative_order(2, 15)
    totient = (3 - 1) * (5 - 1)
    checks = {
        "order of 2 mod 15 is 4": r == 4,
        "qme^4 is identity": (p**4).is_identity(),
        "orbit of |1> is {1,2,4,8}": sorted(basis_orbit(p, 1)) == [1, 2, 4, 8],
        "4 divides phi(15)=8": totient == 8 and totient % r == 0,
    }
    report(4, checks, time.perf_counter() - t0, 1)


def test_criterion_05_torsors(report):
    t0 = time.perf_counter()
    checks = {}
    rng = np.random.default_rng(55)
    for name in ("c2", "c3", "d4", "c2xd4"):
        G = load_group_spec(name).build()
        Q = cayley_quantum_rep(G)
        psi = torsor_point(Q, seed=0)
        checks[f"{name}: torsor orbit {G.order}"] = len(orbit(Q, psi)) == G.order
        checks[f"{name}: trivial stabilizer"] = len(stabilizer(Q, psi)) == 1
        ok = True
        for _ in range(20):
            phi = rng.standard_normal(Q.dim) + 1j * rng.standard_normal(Q.dim)
            ok &= len(orbit(Q, phi)) * len(stabilizer(Q, phi)) == G.order
        checks[f"{name}: orbit-stabilizer on 20 random states"] = ok
    report(5, checks, time.perf_counter() - t0, 30)


def test_criterion_06_vqa(report):
    t0 = time.perf_counter()
    spec = load_group_spec("c2xd4")
    P = spec.presentation
    cfg = AnsatzConfig(2, 1)
    params, rep = train(P, cfg, optimizer="cma", seed=0, restarts=5)
    final = relation_cost(P, params, cfg, 20, seed=123)
    irr = verify_irrelations(P, params, cfg, num_samples=20, threshold=0.1, seed=321)
    reference = relation_cost(P, AnsatzParams(c2d4.TRAINED_PARAMS), cfg, 20)
    checks = {
        f"trained cost {final:.1e} < 1e-3 after {rep.restarts} restart(s)": final < 1e-3 and rep.restarts <= 5,
        f"irrelations pass {irr.passed}": irr.all_passed,
        f"reference parameters cost {reference:.1e} < 1e-3": reference < 1e-3,
    }
    report(6, checks, time.perf_counter() - t0, 600)


def test_criterion_07_analytic_family(report):
    t0 = time.perf_counter()
    spec = load_group_spec("c2xd4")
    G = spec.build()
    cfg = AnsatzConfig(2, 1)
    params = AnsatzParams(c2d4.analytic_params(0.0))
    U = generator_unitaries(params, cfg)
    checks = {f"U_{k} at phi=0": np.max(np.abs(U[k] - c2d4.ANALYTIC_AT_ZERO[k])) <= 1e-10 for k in "abc"}
    Q = extract_representation(spec.presentation, params, cfg, G)
    checks["16 elements faithful"] = check_faithful(Q).faithful
    report(7, checks, time.perf_counter() - t0, 1)


def test_criterion_08_decomposition(report):
    t0 = time.perf_counter()
    checks = {}
    for n in (1, 2, 3):
        worst, cnots = 0.0, 0
        for seed in range(50):
            U = random_unitary(2**n, seed=[8, n, seed])
            c = decompose_unitary(U)
            worst = max(worst, projective_distance(circuit_unitary(c), U))
            cnots = max(cnots, c.count("CNOT"))
        checks[f"n={n}: distance {worst:.1e} < 1e-8"] = worst < 1e-8
        checks[f"n={n}: {cnots} CNOTs <= {CNOT_BOUND_CONSTANT}*4^n"] = cnots <= CNOT_BOUND_CONSTANT * 4**n
        if n == 1:
            checks["2x2 unitaries use zero CNOTs"] = cnots == 0
    report(8, checks, time.perf_counter() - t0, 120)


def test_criterion_09_projective_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    fails = {"pauli": 0, "phase": 0, "canonical": 0}
    for _ in range(100):
        theta = rng.uniform(0, 2 * np.pi)
        # XZ ~ ZX on random qubit embeddings
        n = rng.integers(1, 4)
        q = rng.integers(0, n)
        ops = [np.eye(2)] * n
        xs, zs = list(ops), list(ops)
        xs[q], zs[q] = X, Z
        Xf, Zf = xs[0], zs[0]
        for k in range(1, n):
            Xf, Zf = np.kron(Xf, xs[k]), np.kron(Zf, zs[k])
        fails["pauli"] += not projective_equal(Xf @ Zf, np.exp(1j * theta) * Zf @ Xf)
        U = random_unitary(4, rng)
        fails["phase"] += not projective_equal(U, np.exp(1j * theta) * U)
        psi = normalize(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        c = canonical_state(psi)
        ok = np.allclose(canonical_state(c), c, atol=1e-12) and np.allclose(canonical_state(np.exp(1j * theta) * psi), c, atol=1e-12)
        fails["canonical"] += not ok
    checks = {f"{k}: {v} failures in 100": v == 0 for k, v in fails.items()}
    report(9, checks, time.perf_counter() - t0, 5)


def test_criterion_10_hsp(report):
    t0 = time.perf_counter()
    c4 = cyclic_group(4)
    g16 = load_group_spec("c2xd4").build()
    d4 = load_group_spec("d4").build()
    fixtures = [
        ("C4/{0,2}", c4, [0, 2]),
        ("C2xD4/center", g16, g16.center()),
        ("D4/<b>", d4, d4.subgroup_generated([d4.generator_indices[0]])),
    ]
    checks = {}
    for name, G, H in fixtures:
        f = coset_oracle(G, H)
        v = hsp_initial_state(G, f).vector
        nz = v[np.abs(v) > 0]
        checks[f"{name}: |G| amplitudes of 1/sqrt|G|"] = nz.size == G.order and np.max(np.abs(nz - 1 / np.sqrt(G.order))) <= 1e-12
        checks[f"{name}: oracle hides H"] = validate_hiding(G, H, f)
    broken = list(coset_oracle(c4, [0, 2]).table)
    broken[2] = 99
    checks["broken oracle rejected"] = not validate_hiding(c4, [0, 2], OracleFunction(c4, tuple(broken)))
    report(10, checks, time.perf_counter() - t0, 1)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
