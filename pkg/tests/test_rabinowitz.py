import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.cy_pairing import frobenius_family
from rfkit.exact_linalg import Field
from rfkit.graded_complex import ChainMap, homology, identity_map, random_chain_map
from rfkit.limit_systems import constant_system
from rfkit.rabinowitz import (SIGN_TERMS, DegreeMismatch, IndexOutOfWindow, MissingOperation,
                              OperationFamily, WeightMismatch, ab_complex, all_tuples,
                              assemble_mu, basis_tuples, build_rfc, check_trivial_identity,
                              continuation_rank_bound, dg_family, dropped_sign_terms,
                              family_from_json, family_system, family_to_json, pr_A,
                              rfh_expected_for_zero, verify_ainfinity)

from strategies import system_pairs


def _nz(h):
    return {k: d for k, d in h.items() if d}


def _rfc_of(fam, n, window=(-3, 3)):
    lo, hi = window
    sm, sp = family_system(fam, lo, 0), family_system(fam, 1, hi)
    c01 = ChainMap(sm.levels[0], sp.levels[1], family_system(fam, 0, 1).cmap(0).blocks)
    return build_rfc(sm, sp, c01, n)


@pytest.mark.parametrize("lam", [1, 0])
def test_dg_fixture_is_ainfinity(lam):
    fam = dg_family(lam)
    assert verify_ainfinity(fam, all_tuples(fam, 3, [0])).passed


def test_dg_fixture_over_f3():
    fam = dg_family(1, Field(3))
    assert verify_ainfinity(fam, all_tuples(fam, 2, [0, 1])).passed


@pytest.mark.parametrize("term", [t for t in SIGN_TERMS if t != "flavor"])
def test_dropped_sign_terms_are_detected(term):
    fam = dg_family(1)
    with dropped_sign_terms(term):
        assert not verify_ainfinity(fam, all_tuples(fam, 3, [0])).passed


def test_flavor_term_is_inert_without_flavored_products():
    fam = dg_family(1)
    for xs in all_tuples(fam, 3, [0]):
        a = assemble_mu(len(xs), fam, xs)
        with dropped_sign_terms("flavor"):
            assert assemble_mu(len(xs), fam, xs) == a


def test_product_entry_flip_detected():
    fam = dg_family(1)
    T = {ix: dict(o) for ix, o in fam.ops[(2, frozenset())].items()}
    T[(1, 2)][3] = -T[(1, 2)][3]
    bad = fam.with_op((2, frozenset()), T)
    rep = verify_ainfinity(bad, all_tuples(bad, 3, [0]))
    assert not rep.passed
    assert all("terms" in e for e in rep.failures())


def test_trivial_identity_on_basis_tuples():
    fam = dg_family(1)
    for k in (2, 3):
        for xs in basis_tuples(fam, k, [0, 1]):
            assert check_trivial_identity(fam, [next(iter(x)) for x in xs])


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("lam", [1, 0])
def test_cone_matches_ab_model(n, lam):
    for fam in (dg_family(lam), frobenius_family(n, lam)[0]):
        R = _rfc_of(fam, n)
        AB = ab_complex(fam, (-3, 3))
        R.ab_isomorphism(AB)
        assert _nz(R.rfh()) == _nz(homology(AB))
        assert R.ses_report.passed


def test_identity_continuation_kills_rfh():
    assert not _nz(_rfc_of(dg_family(1), 2).rfh())


def test_zero_continuation_dimensions():
    R = _rfc_of(dg_family(0), 2)
    assert _nz(R.rfh()) == _nz(rfh_expected_for_zero(R)) == {-2: 1, -1: 2, 0: 1}


@given(system_pairs())
def test_rank_bound_on_random_data(data):
    field, W, sm, sp, rng = data
    c01 = random_chain_map(rng, sm.levels[0], sp.levels[1])
    R = build_rfc(sm, sp, c01, rng.randint(1, 3))
    assert continuation_rank_bound(R).passed
    assert R.ses_report.passed


def test_rank_bound_attained_by_identity():
    from rfkit.graded_complex import random_complex
    from rfkit.exact_linalg import QQ
    C = random_complex(random.Random(2), QQ, {0: 3, 1: 2})
    R = build_rfc(constant_system(C, -2, 0), constant_system(C, 1, 2), identity_map(C), 2)
    h = homology(C)
    assert all(e["rank_c"] == h.get(e["degree"], 0) for e in continuation_rank_bound(R).entries)


def _windowed_dg(lo, hi):
    """The dg fixture written out weight by weight on [lo, hi]."""
    u = dg_family(1)
    levels = {w: u.base for w in range(lo, hi + 1)}
    ops = {}
    for (k, F), T in u.ops.items():
        for ws in itertools.product(range(lo, hi + 1), repeat=k):
            w0 = sum(ws) + len(F)
            if lo <= w0 <= hi:
                ops[(k, tuple(sorted(F)), (w0,) + ws)] = T
    return OperationFamily(levels, ops, (lo, hi))


def test_windowed_family_and_missing_operations():
    # flagged inputs push output weights up: w0 = w1 + w2 + |F| <= 4 here
    fam = _windowed_dg(-1, 4)
    assert verify_ainfinity(fam, all_tuples(fam, 2, [0, 1])).passed
    small = _windowed_dg(-2, 2)
    with pytest.raises(MissingOperation) as e:
        verify_ainfinity(small, all_tuples(small, 2, [0, 1]))
    assert e.value.args[0].startswith("operation k=2")


def test_validation_errors():
    with pytest.raises(WeightMismatch):
        OperationFamily({0: [0], 1: [0]}, {(1, (), (1, 0)): {}}, (0, 1))
    with pytest.raises(DegreeMismatch):
        OperationFamily({0: [0, 1]}, {(1, (), (0, 0)): {(0,): {0: 1}}}, (0, 0))
    with pytest.raises(ValueError):
        OperationFamily({0: [0]}, {(2, (1, 1), (2, 0, 0)): {}}, (0, 2))
    fam = OperationFamily({0: [0]}, {(2, (1, 1), (2, 0, 0)): {}}, (0, 2), allow_sym=True)
    assert fam.sym_ops and not fam.ops


def test_projection_outside_window():
    with pytest.raises(IndexOutOfWindow):
        pr_A({("A", 5, 0): 1}, 5, window=(-3, 3))


@pytest.mark.parametrize("fam", [dg_family(1), _windowed_dg(-1, 1)])
def test_family_json_round_trip(fam):
    back = family_from_json(family_to_json(fam))
    assert family_to_json(back) == family_to_json(fam)
