import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfkit.exact_linalg import Field
from rfkit.ginzburg import (DimensionTooSmall, Ginzburg, NotATree, condition3_report,
                            dimension_table, load_quiver, path_quiver, quiver, star_quiver)
from rfkit.graded_complex import cohomology


def _brute_paths(G, v, w, d):
    """Every composable word from v to w of degree d, up to the length cap.

    Walks are extended one generator at a time with no degree pruning.
    """
    cap = G.length_cap(d)
    out = set()
    frontier = [(v, ())]
    for _ in range(cap + 1):
        nxt = []
        for x, word in frontier:
            if x == w and sum(G.gens[g][2] for g in word) == d:
                out.add((v, word))
            for g, (s, t, _) in G.gens.items():
                if s == x:
                    # composition is right to left: the newest generator goes in front
                    nxt.append((t, (g,) + word))
        frontier = nxt
    return out


def test_a2_generators():
    G = Ginzburg(path_quiver(2), 3)
    names = {G.gen_name(g): G.gens[g][2] for g in G.gens}
    assert names == {"a12": 0, "a12*": -1, "t1": -2, "t2": -2}
    assert G.differential_table() == {"t1": [(1, "a12*.a12")], "t2": [(-1, "a12.a12*")]}


def test_single_vertex_generators():
    G = Ginzburg(quiver(["0"], []), 3)
    assert [G.gen_name(g) for g in G.gens] == ["t0"]
    assert G.differential_table() == {"t0": []}


def test_rejections():
    with pytest.raises(NotATree):
        quiver(["1", "2", "3"], [("1", "2"), ("2", "3"), ("3", "1")])
    with pytest.raises(DimensionTooSmall):
        Ginzburg(path_quiver(2), 2)


def test_a2_path_cells():
    G = Ginzburg(path_quiver(2), 3)
    assert [G.render(p) for p in G.enumerate_paths("1", "1", 0)] == ["e1"]
    assert [G.render(p) for p in G.enumerate_paths("1", "1", -1)] == ["a12*.a12"]


@pytest.mark.parametrize("m", range(0, 5))
def test_single_vertex_cells(m):
    G = Ginzburg(quiver(["0"], []), 3)
    assert len(G.enumerate_paths("0", "0", -2 * m)) == 1
    assert len(G.enumerate_paths("0", "0", -2 * m - 1)) == 0


@pytest.mark.parametrize("Q,n,D", [(path_quiver(2), 3, -4), (path_quiver(3), 3, -3),
                                   (star_quiver(3), 4, -2)])
def test_enumeration_against_brute_force(Q, n, D):
    G = Ginzburg(Q, n)
    for v, w in itertools.product(Q.vertices, repeat=2):
        for d in range(D, 1):
            assert set(G.enumerate_paths(v, w, d)) == _brute_paths(G, v, w, d)


def test_a2_cohomology():
    G = Ginzburg(path_quiver(2), 3)
    h = G.hom_dims("1", "1", (-6, 0))
    assert h == {-6: 0, -5: 1, -4: 0, -3: 1, -2: 0, -1: 0, 0: 1}


def test_single_vertex_cohomology():
    G = Ginzburg(quiver(["0"], []), 3)
    h = G.hom_dims("0", "0", (-8, 0))
    assert h == {k: (1 if k % 2 == 0 else 0) for k in range(-8, 1)}


@pytest.mark.parametrize("Q,n", [(path_quiver(2), 3), (path_quiver(3), 3), (path_quiver(2), 4)])
def test_block_ranks_match_full_complex(Q, n):
    G = Ginzburg(Q, n)
    for v, w in itertools.product(Q.vertices, repeat=2):
        C = G.piece(v, w, (-6, 0))
        h = G.hom_dims(v, w, (-5, 0))
        for k in range(-5, 1):
            assert h[k] == cohomology(C, k)[0]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_characteristic_independence(p):
    Q = path_quiver(3)
    a = Ginzburg(Q, 3).hom_dims("1", "3", (-5, 0))
    b = Ginzburg(Q, 3, Field(p)).hom_dims("1", "3", (-5, 0))
    assert a == b


@given(st.integers(0, 10 ** 6))
def test_leibniz_on_random_paths(seed):
    rng = random.Random(seed)
    G = Ginzburg(rng.choice([path_quiver(2), path_quiver(3), star_quiver(3)]), rng.choice([3, 4]))
    vs = G.Q.vertices
    u, v, w = (rng.choice(vs) for _ in range(3))
    ps = G.enumerate_paths(u, v, rng.randint(-4, 0))
    qs = G.enumerate_paths(v, w, rng.randint(-4, 0))
    if ps and qs:
        # multiply(p, q) means q first: q goes w <- v, p goes v <- u in that order
        p, q = rng.choice(qs), rng.choice(ps)
        assert G.leibniz_holds(p, q)


@pytest.mark.parametrize("Q", [path_quiver(2), path_quiver(3)])
def test_d_squared(Q):
    G = Ginzburg(Q, 3)
    for v, w in itertools.product(Q.vertices, repeat=2):
        C = G.piece(v, w, (-6, 0))
        for k in C.degrees():
            assert (C.d(k + 1) @ C.d(k)).is_zero()


def test_shortest_paths_certified():
    G = Ginzburg(path_quiver(3), 3)
    c = G.certify_shortest("1", "3")
    assert c["path"] == "a23.a12" and c["degree"] == 0 and c["nonzero"]
    c = G.certify_shortest("3", "1")
    assert c["path"] == "a12*.a23*" and c["degree"] == -2 and c["nonzero"]


@pytest.mark.parametrize("Q,n", [(path_quiver(2), 3), (path_quiver(3), 3), (star_quiver(3), 4)])
def test_condition3(Q, n):
    r = condition3_report(Q, n, (-6, 0))
    assert r.passed
    assert {e["check"] for e in r.entries} == {"finite", "H0", "shortest_path", "adjacent_nonzero"}


def test_star_support_spacing():
    # at n = 4 the degrees are 0, -2 and -3, so -1 is never reached
    G = Ginzburg(star_quiver(3), 4)
    for v, w in itertools.product(G.Q.vertices, repeat=2):
        assert not G.enumerate_paths(v, w, -1)
    assert [G.render(p) for p in G.enumerate_paths("0", "0", -3)] == ["t0"]


def test_load_quiver_and_table():
    Q, n = load_quiver('vertices = ["1", "2"]\narrows = [["1", "2"]]\nn = 3\n')
    rows = dimension_table(Ginzburg(Q, n), (-2, 0))
    assert {(r["source"], r["target"], r["degree"]): r["hom_dim"] for r in rows
            if r["source"] == r["target"] == "1"} == {("1", "1", -2): 0, ("1", "1", -1): 0,
                                                      ("1", "1", 0): 1}
    with pytest.raises(ValueError):
        load_quiver('vertices = ["1"]\n')
