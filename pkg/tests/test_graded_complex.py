import random

import pytest
from hypothesis import given

from rfkit.exact_linalg import QQ, SparseMatrix
from rfkit.graded_complex import (DSquareNonzero, NotAChainMap, ChainMap, chain_map_defect,
                                  chain_map_space, complex_from_json, complex_to_json, cone,
                                  cone_sequence, direct_sum, dualize, homology, identity_map,
                                  is_acyclic, is_quasi_isomorphism, make_complex,
                                  random_chain_map, shift, verify_exact, verify_long_exact,
                                  zero_map)

from strategies import complexes, rngs


def _nz(h):
    return {k: d for k, d in h.items() if d}


def test_two_term_complex():
    C = make_complex({0: 1, 1: 1}, {0: SparseMatrix.identity(1)})
    assert is_acyclic(C)
    D = make_complex({-1: 1, 0: 2, 1: 1}, {-1: SparseMatrix.from_dense([[1], [0]])})
    assert _nz(homology(D)) == {0: 1, 1: 1}


def test_d_squared_rejected():
    d = SparseMatrix.identity(1)
    with pytest.raises(DSquareNonzero):
        make_complex({0: 1, 1: 1, 2: 1}, {0: d, 1: d})


def test_non_chain_map_rejected():
    C = make_complex({0: 1, 1: 1}, {0: SparseMatrix.identity(1)})
    with pytest.raises(NotAChainMap):
        ChainMap(C, C, {0: SparseMatrix.identity(1)})


@given(complexes())
def test_euler_characteristic(C):
    h = homology(C)
    assert sum((-1) ** k * d for k, d in h.items()) == C.euler_characteristic()


@given(complexes())
def test_shift_and_dual(C):
    h = _nz(homology(C))
    assert _nz(homology(shift(C, 3))) == {k - 3: d for k, d in h.items()}
    assert _nz(homology(dualize(C))) == {-k: d for k, d in h.items()}


@given(complexes())
def test_cone_of_identity_is_acyclic(C):
    assert is_acyclic(cone(identity_map(C)))
    assert is_quasi_isomorphism(identity_map(C))


@given(complexes(), complexes())
def test_cone_of_zero_splits(X, Y):
    if X.field != Y.field:
        return
    hz = homology(cone(zero_map(X, Y)))
    hx, hy = homology(X), homology(Y)
    for k in set(hz) | {k - 1 for k in hx} | set(hy):
        assert hz.get(k, 0) == hx.get(k + 1, 0) + hy.get(k, 0)


@given(complexes(), complexes(), rngs)
def test_cone_sequences_are_exact(X, Y, rng):
    if X.field != Y.field:
        return
    f = random_chain_map(rng, X, Y)
    assert chain_map_defect(f) is None
    C, i, p = cone_sequence(f)
    assert verify_exact([i, p], ends=True).passed
    assert verify_long_exact(i, p, -4, 4).passed


@given(complexes(), complexes())
def test_direct_sum_homology(X, Y):
    if X.field != Y.field:
        return
    h = homology(direct_sum(X, Y))
    hx, hy = homology(X), homology(Y)
    for k in set(h) | set(hx) | set(hy):
        assert h.get(k, 0) == hx.get(k, 0) + hy.get(k, 0)


@given(complexes())
def test_json_round_trip(C):
    D = complex_from_json(complex_to_json(C), C.field)
    assert D.spaces == C.spaces
    assert all(D.d(k) == C.d(k) for k in C.degrees())


def test_chain_map_space_identity_dimension():
    # maps between two copies of K -> K (iso) commuting with d: a 1-parameter family
    C = make_complex({0: 1, 1: 1}, {0: SparseMatrix.identity(1)})
    assert len(chain_map_space(C, C)) == 1
