"""``qgrouprep`` command line.

Every command prints one JSON document (or a flat text rendering of it with
``--format text``).  Exit codes: 0 success, 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from math import gcd
from pathlib import Path

import numpy as np

from . import applications as apps
from .circuits import circuit_unitary, match_named_gate
from .decompose import decompose_permutation, decompose_unitary
from .errors import BudgetExhausted, InputError, ParseError, QGroupRepError, VerificationError
from .group import Permutation, Word, load_group_spec, verify_presentation
from .linalg import projective_distance
from .reps import (
    cayley_quantum_rep,
    check_faithful,
    classical_to_quantum_rep,
    generator_matrices_from_json,
    load_generator_matrices,
    representation_to_json,
)
from .vqa import AnsatzConfig, AnsatzParams, relation_cost, train, verify_irrelations

DATA_DIR = Path(__file__).parent / "data"
ACCEPT_COST = 1e-3
ROUNDTRIP_TOL = 1e-8


def _default_seed() -> int:
    raw = os.environ.get("QGROUPREP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QGROUPREP_SEED must be an integer, got {raw!r}") from None


def _data_file(ref: str) -> Path:
    """A path, or the name of a file shipped in the package data directory."""
    p = Path(ref)
    if p.exists():
        return p
    for cand in (DATA_DIR / ref, DATA_DIR / f"{ref}.json"):
        if cand.exists():
            return cand
    raise ParseError(f"no such file {ref}")


def _read_json(ref: str):
    path = _data_file(ref)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from exc


def _write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands: each returns (report, exit_code)
# ---------------------------------------------------------------------------


def cmd_group_info(args):
    spec = load_group_spec(args.spec)
    G = spec.build()
    pres = verify_presentation(G, spec.presentation)
    P = spec.presentation
    report = {
        "name": spec.name,
        "degree": G.degree,
        "order": G.order,
        "generators": list(G.generator_labels),
        "elements": [G.element_name(g) for g in range(G.order)],
        "center": [G.element_name(g) for g in G.center()],
        "relations": [{"word": str(w), "ok": ok} for w, ok in zip(P.relations, pres.relations_ok)],
        "irrelations": [{"word": str(w), "ok": ok} for w, ok in zip(P.irrelations, pres.irrelations_ok)],
        "presentation_ok": pres.all_ok,
    }
    return report, 0 if pres.all_ok else 1


def cmd_rep_synthesize(args):
    spec = load_group_spec(args.spec)
    G = spec.build()
    if args.method == "cayley":
        Q = cayley_quantum_rep(G, args.dim)
    else:
        if not args.matrices:
            raise InputError("--method classical needs --matrices")
        mats = load_generator_matrices(_data_file(args.matrices))
        Q = classical_to_quantum_rep(G, mats, args.dim)
    faith = check_faithful(Q)
    if args.output:
        _write_json(args.output, representation_to_json(Q, spec))
    report = {
        "group": spec.name,
        "method": args.method,
        "dim": Q.dim,
        "faithful": faith.faithful,
        "colliding_pairs": [[G.element_name(g), G.element_name(h)] for g, h in faith.colliding_pairs],
        "output": args.output,
    }
    if args.output is None:
        report["representation"] = Q.to_dict()
    return report, 0 if faith.faithful else 1


def _element_matrix(data, element: str) -> np.ndarray:
    gens = generator_matrices_from_json(data)
    labels = sorted(gens, key=len, reverse=True)
    word = Word.parse(element, labels) if element not in ("e", "") else Word(())
    d = next(iter(gens.values())).shape[0]
    out = np.eye(d, dtype=np.complex128)
    for lbl, exp in word.letters:
        if lbl not in gens:
            raise InputError(f"unknown generator {lbl!r}")
        out = out @ (gens[lbl] if exp == 1 else gens[lbl].conj().T)
    return out


def _as_permutation(M: np.ndarray) -> Permutation | None:
    R = np.round(M.real)
    if np.max(np.abs(M - R)) > 1e-12 or not np.all((R == 0) | (R == 1)):
        return None
    if not (np.all(R.sum(axis=0) == 1) and np.all(R.sum(axis=1) == 1)):
        return None
    # column i has its 1 in row p(i)
    return Permutation(tuple(int(np.argmax(R[:, i])) for i in range(R.shape[0])))


def cmd_decompose(args):
    data = _read_json(args.representation)
    M = _element_matrix(data, args.element)
    d = M.shape[0]
    n = d.bit_length() - 1
    perm = _as_permutation(M)
    if perm is not None and (1 << n) == d:
        circ = decompose_permutation(perm, n)
        method = "permutation"
    else:
        circ = decompose_unitary(M)
        method = "qsd"
    dist = projective_distance(circuit_unitary(circ), M)
    if args.output:
        circ.save(args.output)
    report = {
        "element": args.element,
        "n_qubits": circ.n_qubits,
        "method": method,
        "gate_counts": circ.gate_counts(),
        "cnot_count": circ.count("CNOT"),
        "named_gate": match_named_gate(M),
        "roundtrip_distance": dist,
        "roundtrip_ok": dist < ROUNDTRIP_TOL,
        "output": args.output,
    }
    if args.output is None:
        report["circuit"] = circ.to_dict()
    return report, 0 if dist < ROUNDTRIP_TOL else 1


def _load_params(ref: str):
    data = _read_json(ref)
    cfg = None
    if "params" in data:
        if "cfg" in data:
            cfg = AnsatzConfig(**data["cfg"])
        data = data["params"]
    try:
        return AnsatzParams.from_dict(data), cfg
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad parameter file {ref}: {exc}") from exc


def cmd_vqa(args):
    spec = load_group_spec(args.spec)
    P = spec.presentation
    cfg = AnsatzConfig(n_qubits=args.qubits, layers=args.layers, entangler=args.entangler)
    if args.action == "train":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", BudgetExhausted)
            params, rep = train(
                P,
                cfg,
                optimizer=args.optimizer,
                budget=args.budget,
                num_samples=args.samples,
                seed=args.seed,
                sampler=args.sampler,
                restarts=args.restarts,
                irrelation_threshold=args.threshold,
            )
        exhausted = any(issubclass(w.category, BudgetExhausted) for w in caught)
        if exhausted:
            print("warning: evaluation budget exhausted", file=sys.stderr)
        irr = rep.irrelations
        artifact = {
            "presentation": {
                "generators": list(P.generator_labels),
                "relations": [str(w) for w in P.relations],
                "irrelations": [str(w) for w in P.irrelations],
            },
            "group": spec.name,
            "cfg": cfg.to_dict(),
            "seed": args.seed,
            "optimizer": args.optimizer,
            "params": params.to_dict(),
            "final_cost": rep.final_cost,
            "irrelations": irr.to_dict(),
            "report": {k: v for k, v in rep.to_dict().items() if k not in ("history", "irrelations")},
        }
        if args.output:
            _write_json(args.output, artifact)
        ok = rep.final_cost < ACCEPT_COST and irr.all_passed
        return artifact, 0 if ok else 1

    if not args.params:
        raise InputError("vqa verify needs --params")
    params, saved_cfg = _load_params(args.params)
    cfg = saved_cfg or cfg
    params.validate(cfg)
    missing = set(P.generator_labels) - set(params.labels())
    if missing:
        raise InputError(f"parameter file lacks generators {sorted(missing)}")
    cost = relation_cost(P, params, cfg, args.samples, args.sampler, args.seed)
    irr = verify_irrelations(P, params, cfg, args.samples, args.threshold, args.seed, args.sampler)
    ok = cost < ACCEPT_COST and irr.all_passed
    report = {
        "group": spec.name,
        "cfg": cfg.to_dict(),
        "seed": args.seed,
        "samples": args.samples,
        "relation_cost": cost,
        "relations_ok": cost < ACCEPT_COST,
        "irrelations": {
            **irr.to_dict(),
            "words": [str(w) for w in P.irrelations],
        },
        "passed": ok,
    }
    return report, 0 if ok else 1


def _totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def cmd_demo(args):
    if args.demo == "grover":
        U = apps.grover_step(args.qubits, args.target)
        report = {
            "n_qubits": args.qubits,
            "N": 2**args.qubits,
            "target": args.target,
            "rotation_angle": apps.grover_angle(args.qubits),
            "max_k": args.max_k,
            "projective_order": apps.projective_order(U, args.max_k, 1e-9),
            "order": apps.linear_order(U, args.max_k, 1e-9),
        }
        return report, 0
    if args.demo == "shor":
        perm = apps.qme_operator(args.N, args.a)
        r = apps.multiplicative_order(args.a, args.N)
        phi = _totient(args.N)
        report = {
            "N": args.N,
            "a": args.a,
            "r": r,
            "n_qubits": perm.degree.bit_length() - 1,
            "cycles": [list(c) for c in perm.cycles()],
            "torsor": sorted(apps.basis_orbit(perm, 1)),
            "power_r_is_identity": (perm**r).is_identity(),
            "totient": phi,
            "r_divides_totient": phi % r == 0,
        }
        return report, 0
    G, f = apps.load_oracle(_data_file(args.spec))
    H = [g for g in range(G.order) if f(g) == f(G.identity_index)]
    state = apps.hsp_initial_state(G, f)
    nz = np.flatnonzero(np.abs(state.vector) > 1e-12)
    hiding = G.is_subgroup(H) and apps.validate_hiding(G, H, f)
    report = {
        "order": G.order,
        "subgroup": [G.element_name(h) for h in H],
        "labels": len(f.codomain),
        "register_dims": [state.group_dim, state.label_dim],
        "nonzero_amplitudes": int(nz.size),
        "amplitudes": sorted({round(float(abs(state.vector[i])), 12) for i in nz}),
        "hides_subgroup": hiding,
    }
    return report, 0 if hiding else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=None, help="defaults to $QGROUPREP_SEED or 0")
    common.add_argument("-o", "--output", default=None, help="write the main artifact here")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qgrouprep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group-info", parents=[common], help="order, elements and presentation check")
    p.add_argument("spec", help="group spec JSON or builtin name (c2, c3, c4, c8, d4, c2xd4)")
    p.set_defaults(func=cmd_group_info)

    p = sub.add_parser("rep-synthesize", parents=[common], help="build a quantum representation")
    p.add_argument("spec")
    p.add_argument("--method", choices=("cayley", "classical"), default="cayley")
    p.add_argument("--matrices", help="classical generator matrices JSON ({label: [[[re, im], ...]]})")
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(func=cmd_rep_synthesize)

    p = sub.add_parser("decompose", parents=[common], help="synthesize a circuit for one element")
    p.add_argument("representation", help="representation JSON written by rep-synthesize")
    p.add_argument("--element", required=True, help='word such as "b c^3" or "a b c"')
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("vqa", parents=[common], help="train or verify generator circuits")
    p.add_argument("action", choices=("train", "verify"))
    p.add_argument("spec")
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--entangler", choices=("ladder", "ring"), default="ladder")
    p.add_argument("--samples", type=int, default=None, help="probe states (train: 8 per step, verify: 20)")
    p.add_argument("--sampler", choices=("ansatz", "haar"), default="ansatz")
    p.add_argument("--optimizer", choices=("cma", "nelder-mead"), default="cma")
    p.add_argument("--budget", type=int, default=30000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--params", help="run artifact or {label: [angles]} JSON (verify)")
    p.set_defaults(func=cmd_vqa)

    p = sub.add_parser("demo", parents=[common], help="Grover, modular multiplication and HSP demos")
    p.add_argument("demo", choices=("grover", "shor", "hsp"))
    p.add_argument("--qubits", type=int, default=1)
    p.add_argument("--target", type=int, default=1)
    p.add_argument("--max-k", type=int, default=10_000)
    p.add_argument("--N", type=int, default=15)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--spec", default="c4_coset_oracle", help="oracle JSON {group, labels}")
    p.set_defaults(func=cmd_demo)
    return parser


def _render_text(report, prefix="") -> list[str]:
    lines = []
    if isinstance(report, dict):
        for k, v in report.items():
            nested = isinstance(v, dict) or (isinstance(v, list) and v and isinstance(v[0], dict))
            if nested and v:
                lines += _render_text(v, f"{prefix}{k}.")
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
    elif isinstance(report, list):
        for i, v in enumerate(report):
            lines += _render_text(v, f"{prefix}{i}.")
    else:
        lines.append(f"{prefix.rstrip('.')}: {json.dumps(report)}")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if getattr(args, "samples", 0) is None:
            args.samples = 8 if args.action == "train" else 20
        report, code = args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except QGroupRepError as exc:  # pragma: no cover - every error subclasses one of the above
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print("\n".join(_render_text(report)))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
