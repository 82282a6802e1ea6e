import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from rfkit.exact_linalg import (QQ, Field, Reducer, SparseMatrix, cohomology_at, image_basis,
                                kernel_basis, parse_field, rank, rref, solve)

small_ints = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c),
                               min_size=r, max_size=r)))


@given(matrices())
def test_rank_matches_sympy(rows):
    assert rank(SparseMatrix.from_dense(rows)) == sympy.Matrix(rows).rank()


def _span_size_mod(rows, p):
    """Number of distinct vectors A x over F_p, by enumeration."""
    ncols = len(rows[0])
    seen = set()
    for x in itertools.product(range(p), repeat=ncols):
        seen.add(tuple(sum(a * b for a, b in zip(r, x)) % p for r in rows))
    return len(seen)


@given(matrices(3, 3), st.sampled_from([2, 3, 5]))
def test_rank_mod_p_by_enumeration(rows, p):
    r = rank(SparseMatrix.from_dense(rows, Field(p)))
    assert p ** r == _span_size_mod(rows, p)


@given(matrices())
def test_kernel_and_image(rows):
    M = SparseMatrix.from_dense(rows)
    K = kernel_basis(M)
    assert len(K) + rank(M) == M.ncols
    for v in K:
        assert not M.apply(v)
    assert len(image_basis(M)) == rank(M)


@given(matrices(), st.lists(small_ints, min_size=5, max_size=5))
def test_solve_consistent_systems(rows, x):
    M = SparseMatrix.from_dense(rows)
    x = {i: Fraction(v) for i, v in enumerate(x[:M.ncols]) if v}
    b = M.apply(x)
    y = solve(M, b)
    assert y is not None and M.apply(y) == b


def test_solve_inconsistent():
    M = SparseMatrix.from_dense([[1, 0], [0, 0]])
    assert solve(M, {1: Fraction(1)}) is None


def test_rref_pivots():
    piv, _ = rref(SparseMatrix.from_dense([[0, 2, 4], [0, 1, 2], [1, 0, 0]]))
    assert sorted(piv) == [0, 1]


def test_reducer_membership():
    R = Reducer(QQ)
    assert R.add({0: Fraction(1), 1: Fraction(1)})
    assert not R.add({0: Fraction(2), 1: Fraction(2)})
    assert R.contains({0: Fraction(-1), 1: Fraction(-1)})
    assert R.rank == 1


def test_cohomology_dimension_of_point_complex():
    # K --0--> K --id--> K: H at the middle is zero
    d_in = SparseMatrix.from_dense([[0]])
    d_out = SparseMatrix.from_dense([[1]])
    assert cohomology_at(d_in, d_out)[0] == 0


def test_fields():
    assert parse_field("q") is QQ
    F7 = parse_field("fp:7")
    assert F7.norm(Fraction(1, 2)) == 4
    with pytest.raises(ValueError):
        parse_field("fp:6")
    with pytest.raises(ValueError):
        parse_field("r")


def test_composition_with_matmul():
    A = SparseMatrix.from_dense([[1, 2], [3, 4]])
    B = SparseMatrix.from_dense([[0, 1], [1, 0]])
    assert (A @ B).to_dense() == [[2, 1], [4, 3]]
