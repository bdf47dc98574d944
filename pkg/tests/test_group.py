import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qgrouprep.errors import (
    ClosureExceeded,
    DegreeMismatch,
    InputError,
    NotSubgroup,
    ParseError,
    UnassignedLabel,
)
from qgrouprep.group import (
    BUILTIN_GROUPS,
    Permutation,
    Presentation,
    Word,
    closure,
    cyclic_group,
    dihedral_group,
    evaluate_word,
    group_spec_from_dict,
    load_group_spec,
    regular_representation,
    verify_presentation,
)


def brute_closure(gens):
    """Reference: keep multiplying every known element by every known element."""
    seen = {Permutation.identity(gens[0].degree).mapping} | {g.mapping for g in gens}
    while True:
        new = {
            tuple(p[q[i]] for i in range(len(p)))
            for p, q in itertools.product(seen, repeat=2)
        } - seen
        if not new:
            return seen
        seen |= new


perms = st.integers(1, 7).flatmap(lambda n: st.permutations(range(n)).map(Permutation))


# -- permutations -----------------------------------------------------------


def test_compose_right_factor_first():
    p = Permutation((1, 2, 0))
    q = Permutation((0, 2, 1))
    assert (p * q).mapping == tuple(p(q(i)) for i in range(3))


def test_from_cycles_and_cycles_roundtrip():
    p = Permutation.from_cycles(6, [(0, 3, 1), (4, 5)])
    assert p.mapping == (3, 0, 2, 1, 5, 4)
    assert p.cycles() == [(0, 3, 1), (4, 5)]
    assert p.order() == 6


def test_permutation_matrix_sends_basis_vectors():
    p = Permutation((2, 0, 1))
    M = p.matrix()
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1
        assert np.argmax(M @ e) == p(i)


def test_bad_permutation_rejected():
    with pytest.raises(InputError):
        Permutation((0, 0, 1))


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)))))
def test_matrix_is_homomorphism(pair):
    p, q = Permutation(pair[0]), Permutation(pair[1])
    np.testing.assert_array_equal((p * q).matrix(), p.matrix() @ q.matrix())


@given(perms)
def test_inverse_and_power(p):
    assert (p * p.inverse()).is_identity()
    assert (p ** p.order()).is_identity()
    assert (p**-1).mapping == p.inverse().mapping


# -- words ------------------------------------------------------------------


def test_word_parse_forms():
    assert Word.parse("a c c c a c").letters == tuple((x, 1) for x in "acccac")
    assert Word.parse("c'").letters == (("c", -1),)
    assert Word.parse("c^3 a^-1").letters == (("c", 1),) * 3 + (("a", -1),)
    assert str(Word.parse("a b'")) == "a b'"


def test_word_parse_rejects_unknown_label():
    with pytest.raises(ParseError):
        Word.parse("a x", labels="ab")


def test_word_inverse():
    w = Word.parse("a b' c")
    assert str(w.inverse()) == "c' b a'"


# -- closure ----------------------------------------------------------------


@pytest.mark.parametrize("name", BUILTIN_GROUPS)
def test_closure_matches_brute_force(name):
    spec = load_group_spec(name)
    G = spec.build()
    assert {e.mapping for e in G.elements} == brute_closure(list(spec.generators.values()))
    assert G.check_axioms()
    assert G.elements[G.identity_index].is_identity()


@pytest.mark.parametrize("name, order", [("c2", 2), ("c3", 3), ("c4", 4), ("c8", 8), ("d4", 8), ("c2xd4", 16)])
def test_builtin_orders(name, order):
    assert load_group_spec(name).build().order == order


def test_mul_table_agrees_with_composition(c2xd4):
    G = c2xd4
    for g in range(G.order):
        for h in range(G.order):
            assert G.elements[G.mul(g, h)] == G.elements[g] * G.elements[h]


def test_element_words_evaluate_to_elements(c2xd4):
    G = c2xd4
    for g in range(G.order):
        assert evaluate_word(G, G.element_word(g)) == g


def test_closure_limit():
    with pytest.raises(ClosureExceeded):
        closure([Permutation((1, 2, 3, 4, 5, 0))], max_order=4)


def test_closure_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        closure([Permutation((1, 0)), Permutation((1, 2, 0))])


@given(st.lists(st.integers(2, 5).flatmap(lambda n: st.permutations(range(5))), min_size=1, max_size=3))
def test_closure_is_group(gens):
    gens = [Permutation(g) for g in gens]
    G = closure(gens)
    assert {e.mapping for e in G.elements} == brute_closure(gens)
    T = G.mul_table
    assert all(sorted(row) == list(range(G.order)) for row in T)
    for g in range(G.order):
        assert G.mul(g, G.inverse(g)) == G.identity_index


def test_cyclic_and_dihedral():
    assert cyclic_group(5).order == 5
    assert dihedral_group(4).order == 8
    assert dihedral_group(5).order == 10


# -- presentation -----------------------------------------------------------


def test_c2xd4_presentation(c2xd4, c2xd4_spec):
    rep = verify_presentation(c2xd4, c2xd4_spec.presentation)
    assert len(rep.relations_ok) == 6 and all(rep.relations_ok)
    assert len(rep.irrelations_ok) == 4 and all(rep.irrelations_ok)


def test_broken_relation_detected(c2xd4):
    P = Presentation.from_strings("abc", ["c c"], ["c c c c"])
    rep = verify_presentation(c2xd4, P)
    assert rep.relations_ok == [False]
    assert rep.irrelations_ok == [False]
    assert not rep.all_ok


def test_unassigned_label(c2xd4):
    with pytest.raises(UnassignedLabel):
        evaluate_word(c2xd4, Word.parse("z"))


def test_center_of_c2xd4(c2xd4):
    names = {c2xd4.element_name(g) for g in c2xd4.center()}
    assert len(names) == 4 and "e" in names and "a" in names


def test_cosets_partition(c2xd4):
    H = c2xd4.center()
    cosets = c2xd4.left_cosets(H)
    assert len(cosets) == 4
    assert sorted(g for c in cosets for g in c) == list(range(16))


def test_not_subgroup(c2xd4):
    with pytest.raises(NotSubgroup):
        c2xd4.left_cosets([0, c2xd4.generator_indices[2]])


def test_regular_representation_is_faithful_homomorphism(c2xd4):
    reg = regular_representation(c2xd4)
    assert len({p.mapping for p in reg.values()}) == 16
    for g, h in itertools.product(range(16), repeat=2):
        assert reg[g] * reg[h] == reg[c2xd4.mul(g, h)]


# -- spec files -------------------------------------------------------------


def test_spec_roundtrip(c2xd4_spec):
    again = group_spec_from_dict(json.loads(json.dumps(c2xd4_spec.to_dict())))
    assert again.build().order == 16
    assert [str(w) for w in again.presentation.relations] == [str(w) for w in c2xd4_spec.presentation.relations]


def test_spec_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_group_spec(bad)
    with pytest.raises(ParseError):
        load_group_spec(tmp_path / "missing.json")
    with pytest.raises(DegreeMismatch):
        group_spec_from_dict({"degree": 3, "generators": {"a": [1, 0]}})
    with pytest.raises(ParseError):
        group_spec_from_dict({"generators": {}})
