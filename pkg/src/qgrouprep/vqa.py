"""Variational construction of generator circuits from an absolute presentation.

Each generator gets a hardware-efficient ansatz (RY walls separated by CZ
entanglers).  Training drives every relation word to act as a global phase
on randomly rotated copies of ``|0...0>``; verification checks that every
irrelation word moves some rotated ``|0...0>`` away from itself.

Word semantics match :func:`qgrouprep.group.evaluate_word`: the unitary of the
word ``l1 l2 ... lk`` is ``U(l1) U(l2) ... U(lk)``, so in circuit time order the
last letter runs first.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _accel
from .circuits import Circuit, Gate, _Z
from .errors import BudgetExhausted, InputError, LengthMismatch, RelationViolation, UnknownLabel
from .group import FiniteGroup, Presentation, Word
from .linalg import random_unitary
from .reps import QuantumRepresentation

log = logging.getLogger(__name__)

PERIOD = 4 * np.pi  # RY(theta + 4 pi) == RY(theta)


@dataclass(frozen=True)
class AnsatzConfig:
    """``RY`` wall, then ``layers`` x (CZ entangler, ``RY`` wall).

    One layer on two qubits is ``RY(t1) RY(t2) . CZ . RY(t3) RY(t4)`` with
    ``t1, t3`` on qubit 0.  ``entangler`` is ``"ladder"`` (CZ on neighbours)
    or ``"ring"`` (ladder plus CZ closing the loop).
    """

    n_qubits: int = 2
    layers: int = 1
    entangler: str = "ladder"

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 0:
            raise InputError("need n_qubits >= 1 and layers >= 0")
        if self.entangler not in ("ladder", "ring"):
            raise InputError(f"unknown entangler {self.entangler!r}")

    @property
    def n_params(self) -> int:
        return self.n_qubits * (self.layers + 1)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def cz_pairs(self) -> list[tuple[int, int]]:
        pairs = [(i, i + 1) for i in range(self.n_qubits - 1)]
        if self.entangler == "ring" and self.n_qubits > 2:
            pairs.append((self.n_qubits - 1, 0))
        return pairs

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "layers": self.layers, "entangler": self.entangler}


ConfigLike = AnsatzConfig | Mapping[str, AnsatzConfig]


def _cfg(cfg: ConfigLike, label: str) -> AnsatzConfig:
    if isinstance(cfg, AnsatzConfig):
        return cfg
    try:
        return cfg[label]
    except KeyError:
        raise UnknownLabel(f"no ansatz config for generator {label!r}") from None


def _check_len(cfg: AnsatzConfig, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != cfg.n_params:
        raise LengthMismatch(f"ansatz takes {cfg.n_params} parameters, got {theta.size}")
    return theta


def ansatz_circuit(cfg: AnsatzConfig, theta) -> Circuit:
    theta = _check_len(cfg, theta)
    n = cfg.n_qubits
    circ = Circuit(n)
    for q in range(n):
        circ.add("RY", q, params=[theta[q]])
    for layer in range(cfg.layers):
        for a, b in cfg.cz_pairs():
            circ.add("CZ", a, b)
        for q in range(n):
            circ.add("RY", q, params=[theta[(layer + 1) * n + q]])
    return circ


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def ansatz_unitary(cfg: AnsatzConfig, theta) -> np.ndarray:
    """Same matrix as ``circuit_unitary(ansatz_circuit(cfg, theta))`` without building gates."""
    theta = _check_len(cfg, theta)
    n = cfg.n_qubits
    U = np.eye(cfg.dim, dtype=np.complex128)
    pairs = cfg.cz_pairs()
    for q in range(n):
        _accel.apply_1q(U, _ry(theta[q]), n - 1 - q)
    for layer in range(cfg.layers):
        for a, b in pairs:
            _accel.apply_1q(U, _Z, n - 1 - b, 1 << (n - 1 - a))
        for q in range(n):
            _accel.apply_1q(U, _ry(theta[(layer + 1) * n + q]), n - 1 - q)
    return U


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass
class AnsatzParams:
    values: dict[str, np.ndarray]

    def __post_init__(self):
        self.values = {str(k): np.asarray(v, dtype=float).ravel() for k, v in self.values.items()}

    def __getitem__(self, label: str) -> np.ndarray:
        return self.values[label]

    def labels(self) -> list[str]:
        return list(self.values)

    def flatten(self, labels: Sequence[str]) -> np.ndarray:
        return np.concatenate([self.values[lbl] for lbl in labels])

    @classmethod
    def from_flat(cls, x, labels: Sequence[str], cfg: ConfigLike) -> "AnsatzParams":
        x = np.asarray(x, dtype=float)
        out, pos = {}, 0
        for lbl in labels:
            k = _cfg(cfg, lbl).n_params
            out[lbl] = x[pos : pos + k].copy()
            pos += k
        if pos != x.size:
            raise LengthMismatch(f"flat vector has {x.size} entries, configs need {pos}")
        return cls(out)

    @classmethod
    def zeros(cls, labels: Sequence[str], cfg: ConfigLike) -> "AnsatzParams":
        return cls({lbl: np.zeros(_cfg(cfg, lbl).n_params) for lbl in labels})

    def validate(self, cfg: ConfigLike) -> None:
        for lbl, v in self.values.items():
            _check_len(_cfg(cfg, lbl), v)

    def to_dict(self) -> dict:
        return {k: [float(x) for x in v] for k, v in self.values.items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "AnsatzParams":
        return cls({k: np.asarray(v, dtype=float) for k, v in data.items()})


def generator_unitaries(params: AnsatzParams, cfg: ConfigLike, labels: Sequence[str] | None = None) -> dict[str, np.ndarray]:
    labels = params.labels() if labels is None else labels
    out = {}
    for lbl in labels:
        if lbl not in params.values:
            raise UnknownLabel(f"no parameters for generator {lbl!r}")
        out[lbl] = ansatz_unitary(_cfg(cfg, lbl), params[lbl])
    return out


def word_unitary(word: Word, unitaries: Mapping[str, np.ndarray]) -> np.ndarray:
    d = next(iter(unitaries.values())).shape[0]
    out = np.eye(d, dtype=np.complex128)
    for lbl, exp in word.letters:
        if lbl not in unitaries:
            raise UnknownLabel(f"no unitary for generator {lbl!r}")
        U = unitaries[lbl]
        out = out @ (U if exp == 1 else U.conj().T)
    return out


def word_circuit(P: Presentation | None, word: Word, params: AnsatzParams, cfg: ConfigLike) -> Circuit:
    """One ansatz block per letter; inverse letters use the exact circuit inverse."""
    if P is not None and not word.labels() <= set(P.generator_labels):
        raise UnknownLabel(f"word {word} uses labels outside the presentation")
    blocks = []
    for lbl, exp in reversed(word.letters):  # last letter acts first
        if lbl not in params.values:
            raise UnknownLabel(f"no parameters for generator {lbl!r}")
        block = ansatz_circuit(_cfg(cfg, lbl), params[lbl])
        blocks.append(block if exp == 1 else block.inverse())
    n = blocks[0].n_qubits if blocks else _cfg(cfg, next(iter(params.values))).n_qubits
    circ = Circuit(n)
    for b in blocks:
        circ.extend(b.gates)
    return circ


# ---------------------------------------------------------------------------
# Probe states U_H |0...0>
# ---------------------------------------------------------------------------


def probe_state(cfg: AnsatzConfig, sampler: str, seed) -> np.ndarray:
    """``U_H |0...0>`` for one random ``U_H`` drawn from ``sampler`` ("ansatz" or "haar")."""
    rng = np.random.default_rng(seed)
    if sampler == "ansatz":
        return ansatz_unitary(cfg, rng.uniform(0.0, PERIOD, cfg.n_params))[:, 0].copy()
    if sampler == "haar":
        return random_unitary(cfg.dim, rng)[:, 0].copy()
    raise InputError(f"unknown sampler {sampler!r}")


def probe_states(cfg: AnsatzConfig, num_samples: int, sampler: str, seed) -> np.ndarray:
    """Sample ``s`` uses seed ``[*seed, s]`` so any single probe can be regenerated."""
    base = list(np.atleast_1d(seed).astype(np.int64))
    return np.stack([probe_state(cfg, sampler, base + [s]) for s in range(num_samples)])


def _probe_cfg(cfg: ConfigLike, labels: Sequence[str]) -> AnsatzConfig:
    return cfg if isinstance(cfg, AnsatzConfig) else _cfg(cfg, labels[0])


def fidelities(words: Sequence[Word], unitaries: Mapping[str, np.ndarray], vecs: np.ndarray) -> np.ndarray:
    """``F[r, s] = |<0| U_H^dagger W_r U_H |0>|**2`` with ``vecs[s] = U_H |0>``."""
    if not words:
        return np.zeros((0, vecs.shape[0]))
    W = np.stack([word_unitary(w, unitaries) for w in words])
    return _accel.quadratic_fidelities(W, vecs)


def relation_cost_from_unitaries(P: Presentation, unitaries: Mapping[str, np.ndarray], vecs: np.ndarray) -> float:
    F = fidelities(P.relations, unitaries, vecs)
    return float(np.clip(1.0 - F.mean(), 0.0, 1.0)) if F.size else 0.0


def relation_cost(
    P: Presentation,
    params: AnsatzParams,
    cfg: ConfigLike,
    num_samples: int = 8,
    sampler: str = "ansatz",
    seed=0,
) -> float:
    """Mean over relations and probes of ``1 - |<0|U_H^dagger word U_H|0>|**2``."""
    if num_samples < 1:
        raise InputError("num_samples must be >= 1")
    labels = P.generator_labels
    U = generator_unitaries(params, cfg, labels)
    vecs = probe_states(_probe_cfg(cfg, labels), num_samples, sampler, seed)
    return relation_cost_from_unitaries(P, U, vecs)


# ---------------------------------------------------------------------------
# Irrelation verification
# ---------------------------------------------------------------------------


@dataclass
class IrrelationReport:
    passed: list[bool]
    witness_seeds: list[list[int] | None]
    min_fidelities: list[float]

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "witness_seeds": self.witness_seeds,
            "min_fidelities": self.min_fidelities,
        }


def verify_irrelations_from_unitaries(
    P: Presentation,
    unitaries: Mapping[str, np.ndarray],
    probe_cfg: AnsatzConfig,
    num_samples: int = 20,
    threshold: float = 0.1,
    seed=0,
    sampler: str = "ansatz",
) -> IrrelationReport:
    """Irrelation ``j`` passes iff some probe has fidelity ``<= 1 - threshold``."""
    if not 0 < threshold < 1:
        raise InputError("threshold must lie in (0, 1)")
    base = list(np.atleast_1d(seed).astype(np.int64))
    vecs = probe_states(probe_cfg, num_samples, sampler, base)
    F = fidelities(P.irrelations, unitaries, vecs)
    passed, witnesses, mins = [], [], []
    for row in F:
        hits = np.flatnonzero(row <= 1 - threshold)
        passed.append(bool(hits.size))
        witnesses.append(base + [int(hits[0])] if hits.size else None)
        mins.append(float(row.min()))
    return IrrelationReport(passed, [None if w is None else [int(x) for x in w] for w in witnesses], mins)


def verify_irrelations(
    P: Presentation,
    params: AnsatzParams,
    cfg: ConfigLike,
    num_samples: int = 20,
    threshold: float = 0.1,
    seed=0,
    sampler: str = "ansatz",
) -> IrrelationReport:
    labels = P.generator_labels
    U = generator_unitaries(params, cfg, labels)
    return verify_irrelations_from_unitaries(
        P, U, _probe_cfg(cfg, labels), num_samples, threshold, seed, sampler
    )


# ---------------------------------------------------------------------------
# Parameter tying
# ---------------------------------------------------------------------------


def _circular_gap(a: float, b: float, period: float) -> float:
    r = (a - b) % period
    return min(r, period - r)


def tie_parameters(params: AnsatzParams, tol: float = 1e-6, period: float = PERIOD) -> list[list[tuple[str, int]]]:
    """Partition parameter slots ``(label, index)`` by value modulo ``period``."""
    slots = [(lbl, i) for lbl in params.labels() for i in range(params[lbl].size)]
    vals = [params[lbl][i] for lbl, i in slots]
    parent = list(range(len(slots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(slots)):
        for j in range(i + 1, len(slots)):
            if _circular_gap(vals[i], vals[j], period) <= tol:
                parent[find(j)] = find(i)
    groups: dict[int, list[tuple[str, int]]] = {}
    for i, s in enumerate(slots):
        groups.setdefault(find(i), []).append(s)
    return list(groups.values())


class _Tying:
    """Map a reduced vector (one entry per tie group) onto the full flat vector."""

    def __init__(self, labels, cfg, groups):
        offsets, pos = {}, 0
        for lbl in labels:
            offsets[lbl] = pos
            pos += _cfg(cfg, lbl).n_params
        self.size = pos
        self.index = np.empty(pos, dtype=np.int64)
        seen = np.zeros(pos, dtype=bool)
        for gi, group in enumerate(groups):
            for lbl, i in group:
                self.index[offsets[lbl] + i] = gi
                seen[offsets[lbl] + i] = True
        if not seen.all():
            raise InputError("tie groups must cover every parameter slot")
        self.n_free = len(groups)

    def expand(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z)[self.index]

    def reduce(self, x: np.ndarray) -> np.ndarray:
        z = np.zeros(self.n_free)
        z[self.index] = x  # last writer wins; groups share a value anyway
        return z


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass
class TrainReport:
    final_cost: float
    relation_fidelities: list[float]
    iterations: int
    evaluations: int
    seed: int
    optimizer: str
    restarts: int = 0
    budget_exhausted: bool = False
    irrelations: IrrelationReport | None = None
    history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "final_cost": self.final_cost,
            "relation_fidelities": self.relation_fidelities,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "optimizer": self.optimizer,
            "restarts": self.restarts,
            "budget_exhausted": self.budget_exhausted,
            "irrelations": None if self.irrelations is None else self.irrelations.to_dict(),
            "history": self.history,
        }


def _int_seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0] % (2**31 - 2)) + 1


def _run_cma(objective, x0, budget, sigma0, popsize, seed, fresh_probes, target_cost):
    import cma

    opts = {"seed": _int_seed(seed, 1), "verbose": -9, "maxfevals": budget}
    if popsize:
        opts["popsize"] = popsize
    es = cma.CMAEvolutionStrategy(list(x0), sigma0, opts)
    history = []
    gen = 0
    best_x, best_f = np.asarray(x0, dtype=float), np.inf
    while not es.stop():
        probes = fresh_probes(gen)
        X = es.ask()
        f = [objective(np.asarray(x), probes) for x in X]
        es.tell(X, f)
        k = int(np.argmin(f))
        if f[k] < best_f:
            best_f, best_x = float(f[k]), np.asarray(X[k], dtype=float)
        history.append(float(min(f)))
        gen += 1
        if best_f <= target_cost:
            break
    exhausted = es.countevals >= budget and best_f > target_cost
    return best_x, gen, int(es.countevals), history, exhausted


def _run_nelder_mead(objective, x0, budget, probes, target_cost):
    from scipy.optimize import minimize

    history = []

    def f(x):
        v = objective(x, probes)
        history.append(v)
        return v

    res = minimize(f, x0, method="Nelder-Mead", options={"maxfev": budget, "xatol": 1e-10, "fatol": target_cost})
    exhausted = res.nfev >= budget and res.fun > target_cost
    return np.asarray(res.x), int(res.nit), int(res.nfev), history[:: max(1, len(history) // 200)], exhausted


def train(
    P: Presentation,
    cfg: ConfigLike,
    optimizer: str = "cma",
    budget: int = 30000,
    num_samples: int = 8,
    seed: int = 0,
    sampler: str = "ansatz",
    restarts: int = 0,
    target_cost: float = 1e-10,
    accept_cost: float = 1e-3,
    require_irrelations: bool = True,
    eval_samples: int = 20,
    irrelation_threshold: float = 0.1,
    sigma0: float = 2.0,
    popsize: int | None = 24,
    ties: list[list[tuple[str, int]]] | None = None,
    x0: AnsatzParams | None = None,
) -> tuple[AnsatzParams, TrainReport]:
    """Minimise :func:`relation_cost` over the generator parameters.

    CMA-ES draws ``num_samples`` fresh probes every generation; Nelder-Mead
    uses one fixed probe set.  After each run the result is scored on
    ``eval_samples`` held-out probes; if it misses ``accept_cost`` or (with
    ``require_irrelations``) fails an irrelation check, the run is repeated
    from a new start up to ``restarts`` times.  Everything is a function of
    ``seed``.
    """
    if budget <= 0:
        raise InputError("budget must be positive")
    if optimizer not in ("cma", "nelder-mead"):
        raise InputError(f"unknown optimizer {optimizer!r}")
    labels = list(P.generator_labels)
    pcfg = _probe_cfg(cfg, labels)
    tying = _Tying(labels, cfg, ties) if ties else None
    n_full = sum(_cfg(cfg, lbl).n_params for lbl in labels)

    cache: dict = {}

    def objective(z, probes):
        x = tying.expand(z) if tying else z
        U = {lbl: ansatz_unitary(_cfg(cfg, lbl), v) for lbl, v in AnsatzParams.from_flat(x, labels, cfg).values.items()}
        return relation_cost_from_unitaries(P, U, probes)

    eval_probes = probe_states(pcfg, eval_samples, sampler, [seed, 2**20])
    best = None
    for attempt in range(restarts + 1):
        rng = np.random.default_rng([seed, attempt])
        if x0 is not None and attempt == 0:
            start = x0.flatten(labels)
        else:
            start = rng.uniform(0.0, PERIOD, n_full)
        z0 = tying.reduce(start) if tying else start

        if optimizer == "cma":
            def fresh(gen, _a=attempt):
                key = (_a, gen)
                if key not in cache:
                    cache.clear()
                    cache[key] = probe_states(pcfg, num_samples, sampler, [seed, _a, gen])
                return cache[key]

            z, gens, evals, hist, exhausted = _run_cma(
                objective, z0, budget, sigma0, popsize, _int_seed(seed, attempt), fresh, target_cost
            )
        else:
            probes = probe_states(pcfg, num_samples, sampler, [seed, attempt])
            z, gens, evals, hist, exhausted = _run_nelder_mead(objective, z0, budget, probes, target_cost)

        x = tying.expand(z) if tying else z
        params = AnsatzParams.from_flat(x, labels, cfg)
        U = generator_unitaries(params, cfg, labels)
        F = fidelities(P.relations, U, eval_probes)
        final = float(np.clip(1.0 - F.mean(), 0.0, 1.0)) if F.size else 0.0
        irr = verify_irrelations_from_unitaries(
            P, U, pcfg, eval_samples, irrelation_threshold, [seed, 2**21], sampler
        )
        report = TrainReport(
            final_cost=final,
            relation_fidelities=[float(r.mean()) for r in F],
            iterations=gens,
            evaluations=evals,
            seed=seed,
            optimizer=optimizer,
            restarts=attempt,
            budget_exhausted=exhausted,
            irrelations=irr,
            history=hist,
        )
        log.info("attempt %d: cost %.3e after %d evaluations, irrelations %s", attempt, final, evals, irr.passed)
        if best is None or final < best[1].final_cost:
            best = (params, report)
        if final < accept_cost and (irr.all_passed or not require_irrelations):
            best = (params, report)
            break
    params, report = best
    if report.budget_exhausted:
        warnings.warn(
            BudgetExhausted(
                f"evaluation budget {budget} exhausted at cost {report.final_cost:.3e}",
                best_params=params,
                best_cost=report.final_cost,
            ),
            stacklevel=2,
        )
    return params, report


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def _phase_aligned_max(W: np.ndarray) -> float:
    t = np.trace(W)
    phase = t / abs(t) if abs(t) > 0 else 1.0
    return float(np.max(np.abs(W - phase * np.eye(W.shape[0]))))


def relation_residual(P: Presentation, unitaries: Mapping[str, np.ndarray]) -> float:
    """Worst ``min_theta ||W_r - exp(i theta) I||_max`` over relation words."""
    return max((_phase_aligned_max(word_unitary(w, unitaries)) for w in P.relations), default=0.0)


def extract_representation(
    P: Presentation,
    params: AnsatzParams | Mapping[str, np.ndarray],
    cfg: ConfigLike | None,
    G: FiniteGroup,
    assignment: Mapping[str, int] | None = None,
    tol: float = 1e-6,
) -> QuantumRepresentation:
    """Projective representation of ``G`` from trained generator unitaries.

    ``params`` may also be a ``{label: unitary}`` mapping (``cfg`` is then
    ignored).  Element matrices are products along BFS words of the assigned
    generator elements.
    """
    if isinstance(params, AnsatzParams):
        U = generator_unitaries(params, cfg, P.generator_labels)
    else:
        U = {k: np.asarray(v, dtype=np.complex128) for k, v in params.items()}
    residual = relation_residual(P, U)
    if residual > tol:
        raise RelationViolation(f"relation residual {residual:.3e} exceeds {tol:.1e}")
    assignment = G.assignment if assignment is None else dict(assignment)
    missing = set(P.generator_labels) - set(assignment)
    if missing:
        raise UnknownLabel(f"no group element assigned to {sorted(missing)}")
    d = next(iter(U.values())).shape[0]
    mats = np.full((G.order, d, d), np.nan, dtype=np.complex128)
    mats[G.identity_index] = np.eye(d)
    frontier = [G.identity_index]
    seen = {G.identity_index}
    while frontier:
        nxt = []
        for g in frontier:
            for lbl in P.generator_labels:
                h = G.mul(g, assignment[lbl])
                if h not in seen:
                    mats[h] = mats[g] @ U[lbl]
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    if len(seen) != G.order:
        raise InputError("assigned generators do not generate the group")
    return QuantumRepresentation(G, mats, mode="projective", tol=max(10 * residual, 1e-10))
