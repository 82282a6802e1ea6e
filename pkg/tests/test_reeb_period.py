from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.reeb_period import (HamiltonianProfile, HyperbolicBlock, InvalidProfile,
                               NonIsolatedCrossing, RotationBlock, ZeroMaslov, action_at,
                               chord_radii, degree_windows, good_pair_check, load_periods,
                               periodic_family, rs_index, window_bound)

F = Fraction


def sq(r_end):
    # h = (r - 1)^2 on [1, r_end]
    return HamiltonianProfile(["1", str(r_end)], [["1", "-2", "1"]])


def test_actions_of_square_profile():
    p = sq(2)
    assert p.nu == 2
    assert [action_at(p, r) for r in ("1", "3/2", "2")] == [0, F(-5, 4), -3]
    assert chord_radii(p, [1]) == [(F(3, 2), 1, F(-5, 4))]
    assert chord_radii(p, [5]) == []


def test_linear_extension():
    p = sq(2)
    assert p.h(3) == 1 + 2 and p.dh(3) == 2


@pytest.mark.parametrize("bp,cs", [
    (["1"], []),
    (["2", "3"], [["0", "0", "1"]]),
    (["1", "1"], [["0", "0", "1"]]),
    (["1", "2"], [["0", "0", "-1"]]),
    (["1", "2", "3"], [["1", "-2", "1"], ["0", "0", "1"]]),
    (["1", "2"], [["0", "-4", "1"]]),
    (["1", "2"], [["0", "1"]]),
])
def test_invalid_profiles(bp, cs):
    with pytest.raises(InvalidProfile):
        HamiltonianProfile(bp, cs)


def test_toml_round_trip():
    p = HamiltonianProfile.from_toml('[profile]\nbreakpoints = ["1", "2"]\n'
                                     'coefficients = [["1", "-2", "1"]]\n')
    d = p.to_dict()
    assert d["slope"] == "2"
    assert HamiltonianProfile(d["breakpoints"], d["coefficients"]).to_dict() == d
    assert load_periods('periods = ["3", "1", "3/2"]') == [1, F(3, 2), 3]
    with pytest.raises(ValueError):
        load_periods("x = 1")


def test_good_and_bad_pairs():
    spec = [1, F(3, 2), 3]
    ok, rep = good_pair_check(sq(2), sq(3), spec)
    assert ok and rep.passed
    assert not good_pair_check(sq(3), sq(2), spec)[0]
    other = HamiltonianProfile(["1", "3"], [["0", "0", "1"]])
    assert not good_pair_check(sq(2), other, spec)[0]


@given(st.fractions(min_value=1, max_value=5), st.fractions(min_value=1, max_value=5))
def test_action_strictly_decreasing(a, b):
    p = HamiltonianProfile(["1", "2", "5"], [["1", "-2", "1"], ["5", "-6", "2"]])
    if a < b:
        assert action_at(p, a) > action_at(p, b) or b > p.r_nu
    # beyond r_nu the action is constant -r_nu nu + h(r_nu)
    assert action_at(p, 6) == action_at(p, 7)


def test_two_piece_profile_is_c1():
    p = HamiltonianProfile(["1", "2", "5"], [["1", "-2", "1"], ["5", "-6", "2"]])
    assert p.dh(2) == 2 and p.nu == 14


def test_index_normalizations():
    assert rs_index([RotationBlock.linear(0, 1)]) == 2
    assert rs_index([RotationBlock.linear(0, F(1, 2))]) == 1
    assert rs_index([RotationBlock.constant(F(1, 2))]) == 0
    assert rs_index([HyperbolicBlock(F(2))]) == 0
    with pytest.raises(NonIsolatedCrossing):
        rs_index([RotationBlock.constant(1)])
    with pytest.raises(ValueError):
        HyperbolicBlock(F(1))


endpoints = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@given(endpoints, endpoints, endpoints)
def test_index_additive_under_concatenation(a, b, c):
    if len({a, b, c}) < 3:
        return
    ab, bc = RotationBlock.linear(a, b), RotationBlock.linear(b, c)
    assert rs_index([ab.then(bc)]) == rs_index([ab]) + rs_index([bc])


@given(endpoints, endpoints, endpoints, endpoints)
def test_index_additive_under_direct_sum(a, b, c, d):
    if a == b or c == d:
        return
    x, y = RotationBlock.linear(a, b), RotationBlock.linear(c, d)
    assert rs_index([x, y]) == rs_index([x]) + rs_index([y])
    assert rs_index([x]) == -rs_index([RotationBlock.linear(b, a)])


def test_windows_example_and_zero_maslov():
    assert degree_windows(2, 0, 1, -4) == {4}
    with pytest.raises(ZeroMaslov):
        degree_windows(0, 0, 1, 0)


@given(st.integers(-5, 5).filter(bool), st.integers(-10, 10), st.integers(0, 12),
       st.integers(-30, 30))
def test_window_matches_brute_force(mu, A, span, d):
    B = A + span
    brute = {m for m in range(2, 200) if A - (m - 2) * mu <= d <= B - (m - 2) * mu}
    got = degree_windows(mu, A, B, d)
    assert got == brute
    assert len(got) <= window_bound(mu, A, B)


def test_periodic_family_stops_at_slope():
    p = sq(3)
    fam = periodic_family(p, F(1, 2), 1, 0, 2, 10)
    assert [f["m"] for f in fam] == [0, 1, 2, 3]
    assert [f["degree"] for f in fam] == [0, -2, -4, -6]
    acts = [f["action"] for f in fam]
    assert all(x > y for x, y in zip(acts, acts[1:]))
