"""Finite permutation groups, words over generator labels, and presentations.

Conventions
-----------
* Permutations are 0-based: ``mapping[i]`` is the image of point ``i``.
* Composition applies the right factor first: ``(p * q)(i) == p(q(i))``.
* ``mul_table[g, h]`` is the index of ``elements[g] * elements[h]``.
* A word ``l1 l2 ... lk`` evaluates left to right, ``((l1 * l2) * ...) * lk``.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ClosureExceeded,
    DegreeMismatch,
    InputError,
    NotSubgroup,
    ParseError,
    UnassignedLabel,
)

DEFAULT_MAX_ORDER = 4096


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        if not m:
            raise InputError("permutation degree must be positive")
        if sorted(m) != list(range(len(m))):
            raise InputError(f"not a bijection on 0..{len(m) - 1}: {m}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        m = list(range(degree))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                m[a] = b
        return cls(tuple(m))

    @property
    def degree(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.mapping))

    def extended(self, degree: int) -> "Permutation":
        """Same permutation acting on ``degree >= self.degree`` points (new points fixed)."""
        if degree < self.degree:
            raise DegreeMismatch(f"cannot shrink degree {self.degree} to {degree}")
        return Permutation(self.mapping + tuple(range(self.degree, degree)))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self.mapping[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.mapping[j]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        order = 1
        for cyc in self.cycles():
            order = np.lcm(order, len(cyc))
        return int(order)

    def matrix(self) -> np.ndarray:
        """Permutation matrix ``P`` with ``P e_i = e_{p(i)}``, so ``P(p*q) = P(p) P(q)``."""
        d = self.degree
        P = np.zeros((d, d))
        P[list(self.mapping), list(range(d))] = 1.0
        return P

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        out = Permutation.identity(self.degree)
        for _ in range(k):
            out = out * self
        return out


# ---------------------------------------------------------------------------
# Words and presentations
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(\^(-?\d+))?('*)$")


@dataclass(frozen=True)
class Word:
    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        for label, exp in self.letters:
            if exp not in (1, -1):
                raise InputError(f"word exponents must be +1 or -1, got {exp} on {label!r}")

    @classmethod
    def parse(cls, text: str, labels: Iterable[str] | None = None) -> "Word":
        """Parse ``"a c c c a c"``, ``"c'"`` (inverse) or ``"c^3 a^-1"`` (expanded powers)."""
        allowed = None if labels is None else set(labels)
        letters: list[tuple[str, int]] = []
        for tok in text.split():
            m = _TOKEN.match(tok)
            if m is None:
                raise ParseError(f"bad word token {tok!r} in {text!r}")
            label, _, power, primes = m.groups()
            if allowed is not None and label not in allowed:
                raise ParseError(f"unknown generator {label!r} in {text!r}")
            k = int(power) if power is not None else 1
            if len(primes) % 2:
                k = -k
            sign = 1 if k > 0 else -1
            letters.extend([(label, sign)] * abs(k))
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((lbl, -e) for lbl, e in reversed(self.letters)))

    def labels(self) -> set[str]:
        return {lbl for lbl, _ in self.letters}

    def __str__(self) -> str:
        return " ".join(lbl if e == 1 else f"{lbl}'" for lbl, e in self.letters)


@dataclass(frozen=True)
class Presentation:
    """Absolute presentation: generators, words equal to e, words not equal to e."""

    generator_labels: tuple[str, ...]
    relations: tuple[Word, ...]
    irrelations: tuple[Word, ...] = ()

    def __post_init__(self):
        labels = set(self.generator_labels)
        if len(labels) != len(self.generator_labels):
            raise InputError("duplicate generator labels")
        for w in self.relations + self.irrelations:
            if len(w) == 0:
                raise InputError("relations and irrelations must be non-empty words")
            if not w.labels() <= labels:
                raise InputError(f"word {w} uses undeclared labels {w.labels() - labels}")

    @classmethod
    def from_strings(
        cls, labels: Sequence[str], relations: Sequence[str], irrelations: Sequence[str] = ()
    ) -> "Presentation":
        labels = tuple(labels)
        return cls(
            labels,
            tuple(Word.parse(r, labels) for r in relations),
            tuple(Word.parse(r, labels) for r in irrelations),
        )


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    elements: tuple[Permutation, ...]
    mul_table: np.ndarray
    identity_index: int
    generator_indices: tuple[int, ...]
    generator_labels: tuple[str, ...] = ()
    inverses: np.ndarray = field(default=None, repr=False)
    words: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return self.elements[0].degree

    def mul(self, g: int, h: int) -> int:
        return int(self.mul_table[g, h])

    def inverse(self, g: int) -> int:
        return int(self.inverses[g])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse(g), -k
        acc = self.identity_index
        for _ in range(k):
            acc = self.mul(acc, g)
        return acc

    def index_of(self, perm: Permutation) -> int:
        return self._lookup()[perm.mapping]

    def _lookup(self) -> dict:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {p.mapping: i for i, p in enumerate(self.elements)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    @property
    def assignment(self) -> dict[str, int]:
        """Generator label -> element index."""
        return dict(zip(self.generator_labels, self.generator_indices))

    def element_word(self, g: int) -> Word:
        """A shortest positive word (shortlex over generator order) reaching ``g``."""
        labels = self.generator_labels or tuple(f"g{i}" for i in range(len(self.generator_indices)))
        return Word(tuple((labels[k], 1) for k in self.words[g]))

    def element_name(self, g: int) -> str:
        return str(self.element_word(g)) if g != self.identity_index else "e"

    def element_order(self, g: int) -> int:
        k, acc = 1, g
        while acc != self.identity_index:
            acc = self.mul(acc, g)
            k += 1
        return k

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        H = set(int(h) for h in subset)
        if self.identity_index not in H:
            return False
        return all(self.mul(g, self.inverse(h)) in H for g in H for h in H)

    def center(self) -> list[int]:
        T = self.mul_table
        return [g for g in range(self.order) if np.array_equal(T[g, :], T[:, g])]

    def subgroup_generated(self, gens: Iterable[int]) -> list[int]:
        gens = list(gens)
        seen = {self.identity_index}
        frontier = deque([self.identity_index])
        while frontier:
            x = frontier.popleft()
            for s in gens:
                y = self.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return sorted(seen)

    def left_cosets(self, subgroup: Iterable[int]) -> list[frozenset[int]]:
        H = sorted(set(int(h) for h in subgroup))
        if not self.is_subgroup(H):
            raise NotSubgroup(f"{H} is not closed under the group law")
        cosets: list[frozenset[int]] = []
        covered: set[int] = set()
        for g in range(self.order):
            if g in covered:
                continue
            c = frozenset(self.mul(g, h) for h in H)
            covered |= c
            cosets.append(c)
        return cosets

    def check_axioms(self) -> bool:
        """Exhaustive identity / inverse / associativity check on the table."""
        T = self.mul_table
        n = self.order
        e = self.identity_index
        r = np.arange(n)
        if T.min() < 0 or T.max() >= n:
            return False
        if not (np.array_equal(T[e], r) and np.array_equal(T[:, e], r)):
            return False
        if not np.all(T[r, self.inverses] == e) or not np.all(T[self.inverses, r] == e):
            return False
        return _assoc(T)


def _assoc(T: np.ndarray) -> bool:
    n = T.shape[0]
    for g in range(n):
        # lhs[h, k] = (g h) k ; rhs[h, k] = g (h k)
        if not np.array_equal(T[T[g, :], :], T[g, T]):
            return False
    return True


def closure(
    generators: Sequence[Permutation],
    max_order: int = DEFAULT_MAX_ORDER,
    labels: Sequence[str] | None = None,
) -> FiniteGroup:
    """Breadth-first closure of ``generators`` under composition.

    Element 0 is the identity and elements are numbered in BFS order of
    right multiplication by generators, so ``words`` holds shortlex-minimal
    words.  Raises :class:`ClosureExceeded` once more than ``max_order``
    elements appear.
    """
    generators = list(generators)
    if not generators:
        raise InputError("need at least one generator")
    degree = generators[0].degree
    if any(g.degree != degree for g in generators):
        raise DegreeMismatch(f"generator degrees {[g.degree for g in generators]}")
    if labels is not None and len(labels) != len(generators):
        raise InputError("one label per generator required")

    ident = Permutation.identity(degree)
    elements = [ident]
    words: list[tuple[int, ...]] = [()]
    parents = [0]
    index = {ident.mapping: 0}
    right = [[] for _ in generators]  # right[s][g] = index of g * s
    queue = deque([0])
    while queue:
        g = queue.popleft()
        for s, gen in enumerate(generators):
            gs = elements[g] * gen
            j = index.get(gs.mapping)
            if j is None:
                j = len(elements)
                if j >= max_order:
                    raise ClosureExceeded(f"group order exceeds max_order={max_order}")
                index[gs.mapping] = j
                elements.append(gs)
                words.append(words[g] + (s,))
                parents.append(g)
                queue.append(j)
            right[s].append(j)
    n = len(elements)
    right_arr = [np.asarray(col, dtype=np.int64) for col in right]

    # Column h of the table from its BFS parent: g*(h's * s) = (g*h's) * s
    table = np.empty((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    for h in range(1, n):
        table[:, h] = right_arr[words[h][-1]][table[:, parents[h]]]
    inverses = np.argmax(table == 0, axis=1)
    gen_idx = tuple(index[g.mapping] for g in generators)
    return FiniteGroup(
        elements=tuple(elements),
        mul_table=table,
        identity_index=0,
        generator_indices=gen_idx,
        generator_labels=tuple(labels) if labels is not None else (),
        inverses=inverses,
        words=tuple(words),
    )


def evaluate_word(G: FiniteGroup, word: Word, assignment: Mapping[str, int] | None = None) -> int:
    """Left-to-right product of ``word`` in ``G``; ``assignment`` maps labels to element indices."""
    if assignment is None:
        assignment = G.assignment
    acc = G.identity_index
    for label, exp in word.letters:
        if label not in assignment:
            raise UnassignedLabel(label)
        x = int(assignment[label])
        if exp == -1:
            x = G.inverse(x)
        acc = G.mul(acc, x)
    return acc


def regular_representation(G: FiniteGroup) -> dict[int, Permutation]:
    """Left translation ``g -> (i -> g*i)`` as permutations of degree ``|G|``."""
    return {g: Permutation(tuple(int(x) for x in G.mul_table[g])) for g in range(G.order)}


@dataclass(frozen=True)
class PresentationReport:
    relations_ok: list[bool]
    irrelations_ok: list[bool]

    @property
    def all_ok(self) -> bool:
        return all(self.relations_ok) and all(self.irrelations_ok)


def verify_presentation(
    G: FiniteGroup, P: Presentation, assignment: Mapping[str, int] | None = None
) -> PresentationReport:
    e = G.identity_index
    return PresentationReport(
        relations_ok=[evaluate_word(G, w, assignment) == e for w in P.relations],
        irrelations_ok=[evaluate_word(G, w, assignment) != e for w in P.irrelations],
    )


# ---------------------------------------------------------------------------
# Group spec files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    name: str
    degree: int
    generators: dict[str, Permutation]
    presentation: Presentation

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.generators)

    def build(self, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
        return closure(list(self.generators.values()), max_order=max_order, labels=self.labels)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "degree": self.degree,
            "generators": {k: list(v.mapping) for k, v in self.generators.items()},
            "relations": [str(w) for w in self.presentation.relations],
            "irrelations": [str(w) for w in self.presentation.irrelations],
        }


def group_spec_from_dict(data: Mapping) -> GroupSpec:
    try:
        degree = int(data["degree"])
        gens = {str(k): Permutation(tuple(v)) for k, v in data["generators"].items()}
        name = str(data.get("name", "group"))
        rels = list(data.get("relations", []))
        irrs = list(data.get("irrelations", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid group spec: {exc}") from exc
    for label, p in gens.items():
        if p.degree != degree:
            raise DegreeMismatch(f"generator {label!r} has degree {p.degree}, file declares {degree}")
    pres = Presentation.from_strings(tuple(gens), rels, irrs)
    return GroupSpec(name=name, degree=degree, generators=gens, presentation=pres)


BUILTIN_GROUPS = ("c2", "c3", "c4", "c8", "d4", "c2xd4")


def builtin_path(name: str) -> Path:
    return Path(str(resources.files("qgrouprep") / "data" / f"{name}.json"))


def load_group_spec(source: str | Path) -> GroupSpec:
    """Load a group spec from a JSON path or a builtin name (``c2xd4``, ``c8``, ...)."""
    path = Path(source)
    if not path.exists() and str(source) in BUILTIN_GROUPS:
        path = builtin_path(str(source))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParseError(f"no such group spec: {source}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {source}: {exc}") from exc
    return group_spec_from_dict(data)


def cyclic_group(n: int) -> FiniteGroup:
    gen = Permutation(tuple((i + 1) % n for i in range(n))) if n > 1 else Permutation((0,))
    return closure([gen], labels=["g"])


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon; for n=4 the generators are (1 2 3 0) and (0 3 2 1)."""
    rot = Permutation(tuple((i + 1) % n for i in range(n)))
    ref = Permutation(tuple((-i) % n for i in range(n)))
    return closure([ref, rot], labels=["b", "c"])
