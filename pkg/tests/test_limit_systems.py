import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.exact_linalg import QQ, Field, SparseMatrix
from rfkit.graded_complex import GradedComplex, homology, make_complex, random_complex
from rfkit.limit_systems import (IndexOutOfWindow, check_slopes, choose_slopes, certify_tower,
                                 colimit_dimension, constant_system, cotelescope,
                                 cotelescope_subcomplex, direct_limit_homology,
                                 inverse_limit_homology, limit_dimension, quotient_tower,
                                 random_system, system_from_json, system_to_json, telescope)

from strategies import complexes, system_pairs


def _nz(h):
    return {k: d for k, d in h.items() if d}


def _dsq(C):
    return all((C.d(k + 1) @ C.d(k)).is_zero() for k in C.degrees())


D = make_complex({-1: 1, 0: 2, 1: 1}, {-1: SparseMatrix.from_dense([[1], [0]])})


def test_slopes_example():
    st_ = choose_slopes({(0, 1): {1, "3/2"}}, (-3, 3))
    assert st_.a == Fraction(5, 2)
    assert st_.tau("0", "1", 1) == Fraction(5, 2)
    assert st_.tau("0", "1", -1) == Fraction(-5, 2) - st_.eps
    assert -st_.eps < st_.tau0 < 0
    assert check_slopes(st_, {(0, 1): {1, "3/2"}}).passed


def test_slopes_empty_spectra():
    st_ = choose_slopes({}, (-2, 3))
    assert st_.a == 1


@given(st.lists(st.fractions(min_value=Fraction(1, 10), max_value=5), min_size=1, max_size=4),
       st.integers(1, 4))
def test_slopes_always_pass(spec, W):
    spectra = {(0, 1): set(spec), (1, 0): set(spec[:1]), (0, 0): set(spec[-1:])}
    st_ = choose_slopes(spectra, (-W, W))
    assert check_slopes(st_, spectra).passed


def test_constant_identity_systems():
    hT = _nz(homology(telescope(constant_system(D, 1, 3), 3)))
    hC = _nz(homology(cotelescope(constant_system(D, -3, 0), 3, 3)))
    assert hT == hC == _nz(homology(D)) == {0: 1, 1: 1}


def test_zero_systems():
    # the limits vanish; the truncations keep only the unpaired end level
    z = constant_system(D, -3, 3, 0)
    zp, zm = z.restricted(1, 3), z.restricted(-3, 0)
    for k in (0, 1):
        assert direct_limit_homology(zp, k, 3).dim == 0
        assert inverse_limit_homology(zm, k, 3).dim == 0
        assert not direct_limit_homology(zp, k, 3).stabilized
    assert _nz(homology(telescope(zp, 3))) == _nz(homology(D))
    assert _nz(homology(cotelescope(zm, 3))) == _nz(homology(D))


def test_constant_limits():
    s = constant_system(D, 1, 4)
    r = direct_limit_homology(s, 0, 4)
    assert (r.dim, r.stable_from, r.stabilized) == (1, 1, True)
    t = constant_system(D, -4, 0)
    assert inverse_limit_homology(t, 1, 4).dim == 1


@given(system_pairs())
def test_d_squared_zero(data):
    field, W, sm, sp, rng = data
    n = rng.randint(0, 3)
    assert _dsq(telescope(sp, W))
    assert _dsq(cotelescope(sm, W, n))


@given(system_pairs())
def test_telescope_matches_stabilized_colimit(data):
    field, W, sm, sp, rng = data
    hT = homology(telescope(sp, W))
    for k in sp.degrees():
        r = direct_limit_homology(sp, k, W)
        # the finite colimit of the whole diagram is H^k(level W)
        assert colimit_dimension(sp, k, 1, W) == hT.get(k, 0)
        if r.stabilized:
            assert hT.get(k, 0) == r.dim


@given(system_pairs())
def test_cotelescope_matches_stabilized_limit(data):
    field, W, sm, sp, rng = data
    hC = homology(cotelescope(sm, W))
    for k in sm.degrees():
        r = inverse_limit_homology(sm, k, W)
        assert limit_dimension(sm, k, -W, 0) == hC.get(k, 0)
        if r.stabilized:
            assert hC.get(k, 0) == r.dim


@given(system_pairs())
def test_tower_certificates(data):
    field, W, sm, sp, rng = data
    cot = cotelescope(sm, W)
    for w in range(W + 1):
        assert certify_tower(cot, w).passed
    for v in range(W):
        assert not _nz(homology(cotelescope_subcomplex(cot, v)))


@given(system_pairs(max_window=3))
def test_telescope_stable_under_isomorphic_extension(data):
    # append an identity level: the truncated homology does not change
    field, W, sm, sp, rng = data
    from rfkit.graded_complex import identity_map
    from rfkit.limit_systems import DirectedSystem
    levels = dict(sp.levels)
    levels[W + 1] = levels[W]
    maps = dict(sp.maps)
    maps[W] = identity_map(levels[W])
    ext = DirectedSystem(levels, maps)
    assert _nz(homology(telescope(ext, W + 1))) == _nz(homology(telescope(sp, W)))


def test_corrupted_tower_step_is_caught():
    rng = random.Random(3)
    C = random_complex(rng, QQ, {0: 2, 1: 1})
    cot = cotelescope(constant_system(C, -3, 0), 3)
    # drop the -a q^v entries at level -2: the step v = 1 loses its cone of the identity
    diffs = {}
    for k in cot.degrees():
        M = cot.d(k)
        src, tgt = cot.labels[k], {l: r for r, l in enumerate(cot.labels.get(k + 1, []))}
        rows = {r: dict(cs) for r, cs in M.rows.items()}
        for c, (part, w, i) in enumerate(src):
            if part == "a" and w == -2:
                rows.get(tgt.get(("qv", w, i)), {}).pop(c, None)
        diffs[k] = SparseMatrix(M.nrows, M.ncols, QQ, {r: cs for r, cs in rows.items() if cs})
    bad = GradedComplex(cot.spaces, diffs, QQ, cot.labels, check=False)
    bad.window, bad.n = cot.window, cot.n
    rep = certify_tower(bad, 3)
    failed = [e["step"] for e in rep.failures() if "step" in e]
    assert failed == [1]
    assert certify_tower(cot, 3).passed


def test_quotient_tower_window():
    cot = cotelescope(constant_system(D, -2, 0), 2)
    with pytest.raises(IndexOutOfWindow):
        quotient_tower(cot, 3, 0)
    Q, ok = quotient_tower(cot, 2, 1)
    assert ok is True


def test_json_round_trip():
    s = random_system(random.Random(5), Field(5), -2, 2)
    t = system_from_json(system_to_json(s), Field(5))
    assert sorted(t.levels) == sorted(s.levels)
    assert all(t.cmap(w).block(k) == s.cmap(w).block(k)
               for w in range(-2, 2) for k in s.degrees())
