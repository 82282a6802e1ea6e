"""Directed systems of finite complexes, telescopes and cotelescopes.

Levels are indexed by integers w and ``maps[w]`` goes from level w to
level w+1.  The positive side (w >= 1) builds the telescope modelling
wrapped Floer cohomology; the non-positive side (w <= 0) builds the
cotelescope modelling wrapped Floer homology.  Both are truncated at a
finite window, and limit-type answers come with a stabilization flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact_linalg import QQ, Field, SparseMatrix, block_matrix, rank
from .graded_complex import (ChainMap, GradedComplex, HomologyBasis, Report,
                             chain_map_defect, chainmap_from_json, chainmap_to_json,
                             complex_from_json, complex_to_json, homology, induced_map,
                             is_acyclic, random_chain_map, random_complex, restrict,
                             NotAChainMap)


class IndexOutOfWindow(IndexError):
    pass


def _sign(e):
    return -1 if e % 2 else 1


# ---------------------------------------------------------------- slopes

@dataclass
class SlopeTable:
    a: Fraction
    eps: Fraction
    tau0: Fraction
    window: Tuple[int, int]
    table: Dict[Tuple[str, str], Dict[int, Fraction]]

    def tau(self, i, j, w) -> Fraction:
        return self.table[(i, j)][w]


def _slope(a, eps, tau0, w):
    if w >= 1:
        return w * a
    if w <= -1:
        return w * a - eps
    return tau0


def choose_slopes(spectra: Dict[Tuple[str, str], Iterable], window: Tuple[int, int]) -> SlopeTable:
    """Slopes avoiding the spectra, increasing, unbounded and superadditive.

    a = max(spectra) + 1, eps = min(a, smallest period) / 2, tau_w = w a for
    w >= 1, w a - eps for w <= -1 and tau_0 = -eps / 2.
    """
    spec = {tuple(map(str, k)): {Fraction(x) for x in v} for k, v in spectra.items()}
    allv = set().union(*spec.values()) if spec else set()
    if any(x <= 0 for x in allv):
        raise ValueError("spectra must be positive")
    a = max(allv) + 1 if allv else Fraction(1)
    gap = min(allv) if allv else a
    eps = min(a, gap) / 2
    tau0 = -eps / 2
    objs = sorted({o for k in spec for o in k})
    pairs = [(i, j) for i in objs for j in objs] or []
    lo, hi = window
    table = {p: {w: _slope(a, eps, tau0, w) for w in range(lo, hi + 1)} for p in pairs}
    st = SlopeTable(a, eps, tau0, window, table)
    rep = check_slopes(st, spec)
    if not rep.passed:  # pragma: no cover - the construction guarantees this
        raise AssertionError(rep.failures())
    return st


def check_slopes(st: SlopeTable, spectra) -> Report:
    """Conditions (a)-(d) by exhaustive scan of the window."""
    rep = Report("slope conditions")
    lo, hi = st.window
    objs = sorted({o for k in st.table for o in k})
    spec = {tuple(map(str, k)): {Fraction(x) for x in v} for k, v in spectra.items()}
    for (i, j), seq in st.table.items():
        S = spec.get((i, j), set())
        for w, t in seq.items():
            if t in S:
                rep.add(False, condition="a", pair=(i, j), w=w)
        ws = sorted(seq)
        inc = all(seq[u] < seq[v] for u, v in zip(ws, ws[1:]))
        rep.add(inc, condition="b-increasing", pair=(i, j))
        if lo <= 0 <= hi:
            rep.add(seq[0] < 0, condition="b-tau0", pair=(i, j))
        if hi >= 1:
            rep.add(seq[1] > 0, condition="b-tau1", pair=(i, j))
        # unbounded: consecutive gaps bounded below by a fixed positive step
        step = min((seq[v] - seq[u] for u, v in zip(ws, ws[1:])), default=None)
        rep.add(step is None or step >= st.eps / 2, condition="c", pair=(i, j))
    for i in objs:
        for j in objs:
            for k in objs:
                for v in range(lo, hi + 1):
                    for w in range(lo, hi + 1):
                        if not lo <= v + w <= hi:
                            continue
                        lhs = st.table[(j, k)][w] + st.table[(i, j)][v]
                        if lhs > st.table[(i, k)][v + w]:
                            rep.add(False, condition="d", triple=(i, j, k), v=v, w=w)
    if rep.passed:
        rep.add(True, condition="all")
    return rep


# ---------------------------------------------------------------- systems

class DirectedSystem:
    """Levels level[w] and continuation chain maps maps[w]: level[w] -> level[w+1]."""

    def __init__(self, levels: Dict[int, GradedComplex], maps: Dict[int, ChainMap],
                 check: bool = True):
        self.levels = dict(levels)
        self.maps = dict(maps)
        fields = {c.field for c in self.levels.values()}
        if len(fields) > 1:
            raise ValueError("levels over different fields")
        self.field = fields.pop() if fields else QQ
        for w, f in self.maps.items():
            if w not in self.levels or w + 1 not in self.levels:
                raise ValueError(f"map {w} needs levels {w} and {w + 1}")
            if f.source is not self.levels[w] or f.target is not self.levels[w + 1]:
                raise ValueError(f"map {w} has the wrong endpoints")
            if check:
                bad = chain_map_defect(f)
                if bad is not None:
                    raise NotAChainMap(bad, f"continuation {w}")

    def cmap(self, w: int) -> ChainMap:
        f = self.maps.get(w)
        if f is None:
            return ChainMap(self.levels[w], self.levels[w + 1], {}, check=False, name=f"c{w}")
        return f

    def window(self) -> Tuple[int, int]:
        ws = sorted(self.levels)
        return ws[0], ws[-1]

    def degrees(self) -> List[int]:
        return sorted(set().union(*[c.spaces for c in self.levels.values()])) if self.levels else []

    def restricted(self, lo, hi) -> "DirectedSystem":
        lv = {w: c for w, c in self.levels.items() if lo <= w <= hi}
        mp = {w: f for w, f in self.maps.items() if lo <= w and w + 1 <= hi}
        return DirectedSystem(lv, mp, check=False)


def constant_system(C: GradedComplex, lo: int, hi: int, scalar=1) -> DirectedSystem:
    """Every level equal to C, every map ``scalar`` times the identity."""
    levels = {w: C for w in range(lo, hi + 1)}
    maps = {w: ChainMap(C, C, {k: SparseMatrix.identity(n, C.field).scale(scalar)
                              for k, n in C.spaces.items()}, name=f"c{w}")
            for w in range(lo, hi)}
    return DirectedSystem(levels, maps)


def system_to_json(sys: DirectedSystem) -> dict:
    return {"levels": {str(w): complex_to_json(c) for w, c in sorted(sys.levels.items())},
            "maps": {str(w): chainmap_to_json(f) for w, f in sorted(sys.maps.items())}}


def system_from_json(obj: dict, field: Field = QQ) -> DirectedSystem:
    levels = {int(w): complex_from_json(c, field) for w, c in obj["levels"].items()}
    maps = {int(w): chainmap_from_json(m, levels[int(w)], levels[int(w) + 1], name=f"c{w}")
            for w, m in obj.get("maps", {}).items()}
    return DirectedSystem(levels, maps)


# ---------------------------------------------------------------- telescope

def _check_levels(sys, needed):
    missing = [w for w in needed if w not in sys.levels]
    if missing:
        raise IndexOutOfWindow(f"levels {missing} missing from the system")


def telescope(sys: DirectedSystem, W: int) -> GradedComplex:
    """Truncated telescope on  sum_{w<=W} C_w + sum_{w<W} C_w q,  |q| = -1.

    d(a) = (-1)^{|a|} d_w a,  d(b q) = (-1)^{|b|} (c_w b - b + (d_w b) q).
    Labels are ("a", w, i) and ("bq", w, i), i indexing level w in CF degree.
    """
    if W < 1:
        raise IndexOutOfWindow("telescope window must be >= 1")
    _check_levels(sys, range(1, W + 1))
    for w in range(1, W):
        bad = chain_map_defect(sys.cmap(w))
        if bad is not None:
            raise NotAChainMap(bad, f"continuation {w}")
    F = sys.field
    degs = sys.restricted(1, W).degrees()
    # degree k contains a-parts of CF degree k and bq-parts of CF degree k+1
    lab = {}
    for k in sorted(set(degs) | {k - 1 for k in degs}):
        labs = [("a", w, i) for w in range(1, W + 1) for i in range(sys.levels[w].dim(k))]
        labs += [("bq", w, i) for w in range(1, W) for i in range(sys.levels[w].dim(k + 1))]
        if labs:
            lab[k] = labs
    spaces = {k: len(v) for k, v in lab.items()}
    pos = {k: {l: j for j, l in enumerate(v)} for k, v in lab.items()}
    diffs = {}
    for k in spaces:
        rows: Dict[int, Dict[int, object]] = {}
        tgt = pos.get(k + 1, {})

        def put(r, c, v):
            rows.setdefault(r, {})[c] = rows.get(r, {}).get(c, 0) + v

        for c, l in enumerate(lab[k]):
            part, w, i = l
            if part == "a":
                s = _sign(k)
                for r, v in sys.levels[w].d(k).column(i).items():
                    put(tgt[("a", w, r)], c, s * v)
            else:
                s = _sign(k + 1)  # CF degree of b
                for r, v in sys.cmap(w).block(k + 1).column(i).items():
                    put(tgt[("a", w + 1, r)], c, s * v)
                put(tgt[("a", w, i)], c, -s)
                for r, v in sys.levels[w].d(k + 1).column(i).items():
                    put(tgt[("bq", w, r)], c, s * v)
        diffs[k] = SparseMatrix(spaces.get(k + 1, 0), spaces[k], F, rows)
    return GradedComplex(spaces, diffs, F, lab)


def cotelescope(sys: DirectedSystem, W: int, n: int = 0) -> GradedComplex:
    """Truncated cotelescope on levels -W..0 (the quotient Q_W).

    Spaces: a-parts at levels -W..0 in their own degree and q^v-parts at
    levels -W+1..0 one degree up.  With b = a-part of degree k:
      d(a_w) = (-1)^k (d a_w + c(a_w) q^v_{w+1} - a_w q^v_w),
      d(b q^v) = (-1)^{|b|} (d b) q^v.
    Degrees are cohomological; the homological index of degree k is n - k.
    """
    if W < 0:
        raise IndexOutOfWindow("cotelescope window must be >= 0")
    _check_levels(sys, range(-W, 1))
    for w in range(-W, 0):
        bad = chain_map_defect(sys.cmap(w))
        if bad is not None:
            raise NotAChainMap(bad, f"continuation {w}")
    F = sys.field
    degs = sys.restricted(-W, 0).degrees()
    lab = {}
    for k in sorted(set(degs) | {k + 1 for k in degs}):
        labs = [("a", w, i) for w in range(-W, 1) for i in range(sys.levels[w].dim(k))]
        labs += [("qv", w, i) for w in range(-W + 1, 1) for i in range(sys.levels[w].dim(k - 1))]
        if labs:
            lab[k] = labs
    spaces = {k: len(v) for k, v in lab.items()}
    pos = {k: {l: j for j, l in enumerate(v)} for k, v in lab.items()}
    diffs = {}
    for k in spaces:
        rows: Dict[int, Dict[int, object]] = {}
        tgt = pos.get(k + 1, {})

        def put(r, c, v):
            rows.setdefault(r, {})[c] = rows.get(r, {}).get(c, 0) + v

        for c, l in enumerate(lab[k]):
            part, w, i = l
            if part == "a":
                s = _sign(k)
                for r, v in sys.levels[w].d(k).column(i).items():
                    put(tgt[("a", w, r)], c, s * v)
                if w <= -1:
                    for r, v in sys.cmap(w).block(k).column(i).items():
                        put(tgt[("qv", w + 1, r)], c, s * v)
                if w >= -W + 1:
                    put(tgt[("qv", w, i)], c, -s)
            else:
                s = _sign(k - 1)
                for r, v in sys.levels[w].d(k - 1).column(i).items():
                    put(tgt[("qv", w, r)], c, s * v)
        diffs[k] = SparseMatrix(spaces.get(k + 1, 0), spaces[k], F, rows)
    C = GradedComplex(spaces, diffs, F, lab)
    C.n = n
    C.window = W
    return C


def cotelescope_subcomplex(cot: GradedComplex, v: int) -> GradedComplex:
    """D^v: the a- and q^v-parts at levels -v..0 (acyclic for every v >= 0)."""
    return restrict(cot, lambda l: l[1] >= -v)


def homological_dims(C: GradedComplex, n: int) -> Dict[int, int]:
    """Relabel cohomological degrees k as homological n - k."""
    return {n - k: d for k, d in homology(C).items()}


# ---------------------------------------------------------------- limits

@dataclass
class LimitResult:
    dim: int
    stable_from: int
    stabilized: bool
    level_dims: Dict[int, int]


def _iso(f: ChainMap, k: int) -> bool:
    hs, ht = HomologyBasis(f.source, k), HomologyBasis(f.target, k)
    return hs.dim == ht.dim and (hs.dim == 0 or rank(induced_map(f, k, hs, ht)) == hs.dim)


def direct_limit_homology(sys: DirectedSystem, k: int, W: int) -> LimitResult:
    """Image-stabilized colimit of H^k(level_w), w = 1..W.

    The dimension is that of the image of H^k(level_{W-1}) in H^k(level_W)
    (all of H^k(level_1) when W = 1).  ``stable_from`` is the least w0 such
    that every transition from w0 on is an isomorphism in degree k.
    """
    _check_levels(sys, range(1, W + 1))
    dims = {w: HomologyBasis(sys.levels[w], k).dim for w in range(1, W + 1)}
    if W == 1:
        return LimitResult(dims[1], 1, True, dims)
    dim = rank(induced_map(sys.cmap(W - 1), k))
    w0 = W
    while w0 > 1 and _iso(sys.cmap(w0 - 1), k):
        w0 -= 1
    return LimitResult(dim, w0, w0 < W, dims)


def inverse_limit_homology(sys: DirectedSystem, k: int, W: int) -> LimitResult:
    """Image-stabilized limit of the tower H^k(level_w), w = -W..0.

    Dually to the direct case, the dimension is the rank of
    H^k(level_{-W}) -> H^k(level_{-W+1}); ``stable_from`` is the largest
    depth from which every deeper transition is an isomorphism.
    """
    _check_levels(sys, range(-W, 1))
    dims = {w: HomologyBasis(sys.levels[w], k).dim for w in range(-W, 1)}
    if W == 0:
        return LimitResult(dims[0], 0, True, dims)
    dim = rank(induced_map(sys.cmap(-W), k))
    w0 = -W
    while w0 < -1 and _iso(sys.cmap(w0), k):
        w0 += 1
    # w0 is the shallowest level reached by isomorphisms from the bottom
    return LimitResult(dim, w0, w0 > -W, dims)


def colimit_dimension(sys: DirectedSystem, k: int, lo: int, hi: int) -> int:
    """dim of the colimit of the finite diagram H^k(lo) -> ... -> H^k(hi).

    Computed as the cokernel of  sum_{w<hi} H_w -> sum_w H_w,  x -> x - c(x).
    """
    hb = {w: HomologyBasis(sys.levels[w], k) for w in range(lo, hi + 1)}
    off, tot = {}, 0
    for w in range(lo, hi + 1):
        off[w] = tot
        tot += hb[w].dim
    cols = []
    for w in range(lo, hi):
        M = induced_map(sys.cmap(w), k, hb[w], hb[w + 1])
        for j in range(hb[w].dim):
            col = {off[w] + j: sys.field.one}
            for r, v in M.column(j).items():
                col[off[w + 1] + r] = sys.field.neg(v)
            cols.append(col)
    return tot - rank(SparseMatrix.from_columns(cols, tot, sys.field))


def limit_dimension(sys: DirectedSystem, k: int, lo: int, hi: int) -> int:
    """dim of the limit of the finite tower: compatible families (x_w)."""
    hb = {w: HomologyBasis(sys.levels[w], k) for w in range(lo, hi + 1)}
    off, tot = {}, 0
    for w in range(lo, hi + 1):
        off[w] = tot
        tot += hb[w].dim
    rows: Dict[int, Dict[int, object]] = {}
    roff = 0
    for w in range(lo, hi):
        M = induced_map(sys.cmap(w), k, hb[w], hb[w + 1])
        for r in range(hb[w + 1].dim):
            row = {off[w + 1] + r: sys.field.one}
            for c, v in M.rows.get(r, {}).items():
                row[off[w] + c] = sys.field.neg(v)
            rows[roff + r] = row
        roff += hb[w + 1].dim
    return tot - rank(SparseMatrix(roff, tot, sys.field, rows))


# ---------------------------------------------------------------- tower

def quotient_tower(cot: GradedComplex, w: int, v: int):
    """Q_w^v and a certificate that Q_w^v -> Q_w^{v+1} is a quasi-isomorphism.

    Q_w^v keeps the a-parts at levels -w..-v-1 and q^v-parts at -w+1..-v-1.
    The step kernel (level -v-1, both parts) is a shifted cone of the
    identity; the step is certified by checking that kernel is acyclic.
    For v = w - 1 there is no further step and the certificate is True.
    """
    W = getattr(cot, "window", None)
    if W is None:
        raise ValueError("not a cotelescope")
    if not (0 <= w <= W and -1 <= v < w):
        raise IndexOutOfWindow(f"need -1 <= v < w <= {W}, got w={w}, v={v}")

    def keep(l, vv):
        part, lvl, _ = l
        if part == "a":
            return -w <= lvl <= -vv - 1
        return -w + 1 <= lvl <= -vv - 1

    Q = restrict(cot, lambda l: keep(l, v))
    if v == w - 1:
        return Q, True
    K = restrict(cot, lambda l: l[1] == -v - 1 and keep(l, v))
    return Q, is_acyclic(K)


def certify_tower(cot: GradedComplex, w: int) -> Report:
    """Run every step of Q_w = Q_w^{-1} -> ... -> Q_w^{w-1} = level_{-w}."""
    rep = Report("quotient tower")
    dims = []
    for v in range(-1, w):
        Q, ok = quotient_tower(cot, w, v)
        h = homology(Q)
        dims.append(h)
        rep.add(ok, step=v, homology={str(k): d for k, d in sorted(h.items()) if d})
    norm = [{k: d for k, d in h.items() if d} for h in dims]
    rep.add(all(x == norm[0] for x in norm), check="homology constant along the tower")
    return rep


def random_system(rng, field: Field, lo: int, hi: int, max_dim: int = 6,
                  degrees: Sequence[int] = (-1, 0, 1)) -> DirectedSystem:
    """Random levels of total dimension <= max_dim with random continuations."""
    levels = {}
    for w in range(lo, hi + 1):
        total = rng.randint(1, max_dim)
        dims = {k: 0 for k in degrees}
        for _ in range(total):
            dims[rng.choice(list(degrees))] += 1
        levels[w] = random_complex(rng, field, dims)
    maps = {w: random_chain_map(rng, levels[w], levels[w + 1], name=f"c{w}")
            for w in range(lo, hi)}
    return DirectedSystem(levels, maps)
