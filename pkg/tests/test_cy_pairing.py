import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.cy_pairing import (FiniteCategoryPresentation, HypothesisFailed, Inconsistent,
                              NotACycle, bifunctoriality_check, chain_pairings, cy_scalar,
                              duality_slopes, frobenius_category, frobenius_family,
                              nondegenerate, pairing_setup, path_algebra_paths, scaled_pairing,
                              target, trace_pairing, trivial_extension, verify_diagram)
from rfkit.graded_complex import homology, is_quasi_isomorphism
from rfkit.limit_systems import choose_slopes


def _a(m, n):
    vs = [str(i) for i in range(1, m + 1)]
    return trivial_extension(vs, path_algebra_paths(vs, list(zip(vs, vs[1:]))), n)


def _unit_pairing(cat, n):
    return trace_pairing(cat, n, {X: {0: 1} for X in cat.objects})


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("lam", [1, 0])
def test_diagram_commutes_and_five_lemma_fires(n, lam):
    fam, psi = frobenius_family(n, lam)
    S = pairing_setup(fam, n, psi, (-3, 3))
    a, b, g = chain_pairings(S)
    rep = verify_diagram(a, b, g, S.i, S.p, n)
    assert rep.passed
    five = [e for e in rep.entries if e.get("check") == "five_lemma"][0]
    assert not five.get("skipped") and is_quasi_isomorphism(b)


def test_truncated_duality_dimensions():
    # beta-bar is a quasi-isomorphism onto the shifted dual
    n = 3
    fam, psi = frobenius_family(n, 0)
    S = pairing_setup(fam, n, psi, (-3, 3))
    h = {k: d for k, d in homology(S.rfc).items() if d}
    hd = {k: d for k, d in homology(target(S.rfc, n)).items() if d}
    assert h == hd


def test_psi_must_be_a_cycle_functional():
    fam, _ = frobenius_family(3, 1)
    with pytest.raises(NotACycle):
        pairing_setup(fam, 3, {3: 1}, (-3, 3))


@pytest.mark.parametrize("n", [3, 4])
def test_scalars(n):
    F = frobenius_category(n)
    P = _unit_pairing(F, n)
    assert cy_scalar(F, P, scaled_pairing(P, {"X": 2}), n) == 2
    A2 = _a(2, n)
    P = _unit_pairing(A2, n)
    assert cy_scalar(A2, P, scaled_pairing(P, {"1": 3, "2": 3}), n) == 3
    with pytest.raises(Inconsistent) as e:
        cy_scalar(A2, P, scaled_pairing(P, {"1": 2, "2": 3}), n)
    assert set(e.value.witness) == {"1", "2"}


@given(st.integers(1, 6), st.sampled_from([3, 4]))
def test_uniform_scaling_recovered_on_a3(c, n):
    A3 = _a(3, n)
    P = _unit_pairing(A3, n)
    assert cy_scalar(A3, P, scaled_pairing(P, {X: c for X in A3.objects}), n) == c


def test_disconnected_category_fails_hypothesis():
    cat = trivial_extension(["1", "2"], path_algebra_paths(["1", "2"], []), 3)
    P = _unit_pairing(cat, 3)
    with pytest.raises(HypothesisFailed):
        cy_scalar(cat, P, P, 3)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_trace_pairings_nondegenerate(m):
    cat = _a(m, 3)
    assert not cat.check_laws()
    for blocks in _unit_pairing(cat, 3).values():
        for M in blocks.values():
            assert nondegenerate(M)[0]


@given(st.integers(0, 10 ** 6))
def test_bifunctoriality(seed):
    rng = random.Random(seed)
    n = rng.choice([3, 4])
    cat = _a(rng.randint(1, 3), n)
    assert bifunctoriality_check(cat, _unit_pairing(cat, n), n, 20, rng).passed


def test_mixed_scaling_breaks_identity_two():
    A2 = _a(2, 3)
    P = scaled_pairing(_unit_pairing(A2, 3), {"1": 2, "2": 3})
    rep = bifunctoriality_check(A2, P, 3, 100, random.Random(1))
    assert {e["identity"] for e in rep.failures()} == {2}


def test_category_json_round_trip():
    cat = _a(3, 3)
    back = FiniteCategoryPresentation.from_json(cat.to_json())
    assert back.hom == cat.hom and back.to_json() == cat.to_json()
    assert cat.to_json()["schema_version"] == 1


def test_duality_slopes():
    spec = {1, Fraction(3, 2)}
    st_ = choose_slopes({("0", "1"): spec}, (-4, 4))
    sig, rep = duality_slopes(st_, spec, ("0", "1"), 4)
    assert rep.passed
    assert sig[1] == -st_.tau("0", "1", 1) + st_.tau0
