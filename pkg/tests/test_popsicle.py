from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.popsicle import (PopsicleType, Unstable, ainfinity_terms, census,
                            enumerate_broken_types, enumerate_codim1, moduli_dim,
                            stratum_dimension, tree_to_triple)


@st.composite
def types(draw, kmax=5, fmax=3):
    k = draw(st.integers(1, kmax))
    F = draw(st.sets(st.integers(1, k), max_size=min(fmax, k)))
    if k + len(F) < 2:
        F = {1}
    return k, tuple(sorted(F))


def test_dimension_examples():
    assert moduli_dim(1, (1,)) == 0   # the strip with one sprinkle is a single point
    assert moduli_dim(2) == 0
    assert moduli_dim(3) == 1
    assert moduli_dim(3, (1, 2)) == 3
    with pytest.raises(Unstable):
        moduli_dim(1)
    with pytest.raises(ValueError):
        moduli_dim(2, (3,))


def test_weights_validated():
    PopsicleType(2, frozenset({1}), (3, 1, 1))
    with pytest.raises(ValueError):
        PopsicleType(2, frozenset({1}), (2, 1, 1))


@pytest.mark.parametrize("k", range(2, 7))
def test_dissection_counts(k):
    # faces of the associahedron: dissections of a (k+1)-gon with c diagonals
    for c in range(0, k - 1):
        exp = comb(k - 2, c) * comb(k + c, c) // (c + 1)
        assert len(enumerate_broken_types(k, (), codim=c)) == exp


@pytest.mark.parametrize("k", range(2, 7))
def test_associahedron_facets(k):
    assert len(enumerate_codim1(k)) == k * (k - 1) // 2 - 1


def test_three_inputs_census():
    c = census(3)
    assert [(s["i"], s["j"]) for s in c["codim1"]] == [(0, 2), (1, 3)]
    assert c["family2"] == 0


@given(types())
def test_codim_one_trees_match_triples(t):
    k, F = t
    trees = enumerate_broken_types(k, F, codim=1)
    triples = sorted((s.i, s.j, tuple(sorted(s.F1))) for s in enumerate_codim1(k, F))
    from_trees = sorted((i, j, tuple(sorted(F1))) for i, j, F1 in map(tree_to_triple, trees))
    assert from_trees == triples


@given(types(kmax=4))
def test_stratum_dimensions(t):
    k, F = t
    d = moduli_dim(k, F)
    for tree in enumerate_broken_types(k, F):
        assert stratum_dimension(tree) == d - (len(tree.vertices()) - 1)


@given(types())
def test_family_two_is_sym_nontrivial_and_excluded(t):
    k, F = t
    terms = {(x.i, x.j, x.F1) for x in ainfinity_terms(k, F)}
    trees = {tree_to_triple(tr): tr for tr in enumerate_broken_types(k, F, codim=1)}
    for s in enumerate_codim1(k, F):
        assert (s.family == 2) == trees[(s.i, s.j, s.F1)].sym_nontrivial()
        assert ((s.i, s.j, s.F1) in terms) == (s.family == 1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_unflavored_terms_are_all_intervals(k):
    got = {(t.i, t.j) for t in ainfinity_terms(k)}
    assert got == {(i, j) for i in range(k) for j in range(i + 1, k + 1)}


def test_term_kinds():
    kinds = {(t.i, t.j): t.kinds for t in ainfinity_terms(3)}
    assert kinds[(0, 3)] == ("output_strip",)
    assert kinds[(1, 2)] == ("input_strip",)
    assert kinds[(0, 2)] == ("interior",)
