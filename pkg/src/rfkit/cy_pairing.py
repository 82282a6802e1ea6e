"""Calabi-Yau pairings on Rabinowitz complexes and on finite categories.

Chain level.  Given an operation family on one object, a window (lo, hi)
and a degree-n functional psi on the level-0 complex, the product
mu-check^2 followed by pr_{B,0} and psi gives
    beta(y, x) = psi(pr_{B,0} mu-check^2(x_1 = x, x_2 = y)),
a pairing RFC^{n-1-k} x RFC^k -> K.  Restricting the inputs to the
telescope part CW^+ (levels >= 1, a subcomplex i: CW^+ -> RFC) and the
cotelescope part CW^- (levels <= 0, the quotient p: RFC -> CW^-) gives
alpha and gamma.  All three are turned into chain maps into
    D(C) = shift(dualize(C), -(n-1)),
whose degree-k piece is (C^{n-1-k})^*, by the sign (-1)^{deg x}.

Homology level.  A FiniteCategoryPresentation stores graded Hom
dimensions, composition tensors and identities; pairings on it are
matrices pair[(X, Y)][d] with rows indexing Hom^{n-1-d}(Y, X) and
columns indexing Hom^d(X, Y).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact_linalg import QQ, Field, SparseMatrix, rank
from .graded_complex import (ChainMap, GradedComplex, Report, chain_map_defect, dual_map,
                             dualize, is_quasi_isomorphism, restrict, shift, shift_map,
                             NotAChainMap)
from .limit_systems import SlopeTable
from .rabinowitz import (OperationFamily, UniformFamily, ab_complex, assemble_mu, pr_B)


class NotACycle(ValueError):
    def __init__(self, degree, witness):
        super().__init__(f"psi does not vanish on the boundary of basis vector {witness} "
                         f"(degree {degree})")
        self.degree, self.witness = degree, witness


class HypothesisFailed(ValueError):
    def __init__(self, which, detail=""):
        super().__init__(f"hypothesis failed: {which} {detail}".strip())
        self.which = which


class Inconsistent(ValueError):
    def __init__(self, witness, values):
        super().__init__(f"scalars disagree between objects {witness}: {values}")
        self.witness, self.values = witness, values


def _sign(e):
    return -1 if e % 2 else 1


# ---------------------------------------------------------------- chain level

@dataclass
class PairingSetup:
    fam: OperationFamily
    n: int
    psi: Dict[int, object]
    window: Tuple[int, int]
    rfc: GradedComplex
    cw_plus: GradedComplex
    cw_minus: GradedComplex
    i: ChainMap
    p: ChainMap


def _sub_map(sub: GradedComplex, C: GradedComplex, into: bool, name: str) -> ChainMap:
    """Inclusion sub -> C (into=True) or projection C -> sub, matched by labels."""
    field = C.field
    blocks = {}
    for k in C.degrees():
        pos = {l: j for j, l in enumerate(C.labels.get(k, []))}
        labs = sub.labels.get(k, [])
        rows = {}
        for j, l in enumerate(labs):
            if into:
                rows.setdefault(pos[l], {})[j] = field.one
            else:
                rows.setdefault(j, {})[pos[l]] = field.one
        shape = (C.dim(k), sub.dim(k)) if into else (sub.dim(k), C.dim(k))
        blocks[k] = SparseMatrix(shape[0], shape[1], field, rows)
    if into:
        return ChainMap(sub, C, blocks, name=name)
    return ChainMap(C, sub, blocks, name=name)


def check_psi(fam: OperationFamily, psi: Dict[int, object], n: int) -> None:
    """psi has degree n on level 0 and vanishes on boundaries (raises NotACycle)."""
    degs = fam.level_degrees(0)
    for i in psi:
        if psi[i] and degs[i] != n:
            raise ValueError(f"psi is nonzero on basis vector {i} of degree {degs[i]} != {n}")
    T = fam.lookup(1, frozenset(), (0, 0))
    for i, d in enumerate(degs):
        if d != n - 1:
            continue
        val = sum((v * psi.get(o, 0) for o, v in T.get((i,), {}).items()), 0)
        if fam.field.norm(val) != 0:
            raise NotACycle(d, i)


def pairing_setup(fam: OperationFamily, n: int, psi: Dict[int, object],
                  window: Tuple[int, int]) -> PairingSetup:
    lo, hi = window
    if not (lo <= -1 and hi >= 2):
        raise ValueError("window must contain levels -1..2")
    check_psi(fam, psi, n)
    R = ab_complex(fam, window)
    plus = restrict(R, lambda l: l[1] >= 1)
    minus = restrict(R, lambda l: l[1] <= 0)
    return PairingSetup(fam, n, dict(psi), window, R, plus, minus,
                        _sub_map(plus, R, True, "i"), _sub_map(minus, R, False, "p"))


def target(C: GradedComplex, n: int) -> GradedComplex:
    """D(C) = shift(dualize(C), -(n-1)); its degree-k basis is dual to C^{n-1-k}."""
    return shift(dualize(C), -(n - 1))


def _psi_B0(S: PairingSetup, x1_lab, x2_lab) -> object:
    one = S.fam.field.one
    out = assemble_mu(2, S.fam, [{x1_lab: one}, {x2_lab: one}])
    comp = pr_B(out, 0)
    return S.fam.field.norm(sum((v * S.psi.get(i, 0) for i, v in comp.items()), 0))


def beta_value(S: PairingSetup, y_lab, x_lab):
    """beta(y, x) = psi(pr_{B,0} mu-check^2(x_1 = x, x_2 = y)) on basis labels."""
    return _psi_B0(S, x_lab, y_lab)


def _pairing_map(S: PairingSetup, src: GradedComplex, other: GradedComplex, value, name):
    """Chain map src -> D(other), x -> (-1)^{|x|} value(y, x)."""
    T = target(other, S.n)
    blocks = {}
    for k in src.degrees():
        ys = other.labels.get(S.n - 1 - k, [])
        rows: Dict[int, Dict[int, object]] = {}
        for c, x in enumerate(src.labels[k]):
            for r, y in enumerate(ys):
                v = value(y, x)
                if v:
                    rows.setdefault(r, {})[c] = _sign(k) * v
        blocks[k] = SparseMatrix(T.dim(k), src.dim(k), S.fam.field, rows)
    f = ChainMap(src, T, blocks, check=False, name=name)
    bad = chain_map_defect(f)
    if bad is not None:
        raise NotAChainMap(bad, name)
    return f


def chain_pairings(S: PairingSetup):
    """(alpha-bar, beta-bar, gamma-bar) as chain maps into the shifted duals.

    alpha-bar: CW^+ -> D(CW^-),  x -> (-1)^{|x|} beta(lift(.), i x)
    beta-bar:  RFC  -> D(RFC),   x -> (-1)^{|x|} beta(., x)
    gamma-bar: CW^- -> D(CW^+),  y -> (-1)^{|y|} psi pr_{B,0} mu^2(x_1 = lift y, x_2 = i .)
    Lifts use the same labels; the choice does not matter because products
    of two telescope elements land at levels >= 2.
    """
    a = _pairing_map(S, S.cw_plus, S.cw_minus, lambda y, x: beta_value(S, y, x), "alpha")
    b = _pairing_map(S, S.rfc, S.rfc, lambda y, x: beta_value(S, y, x), "beta")
    g = _pairing_map(S, S.cw_minus, S.cw_plus, lambda xp, y: _psi_B0(S, y, xp), "gamma")
    return a, b, g


def dual_shifted(f: ChainMap, n: int) -> ChainMap:
    """f^v[-(n-1)]: D(target) -> D(source)."""
    return shift_map(dual_map(f), -(n - 1))


def _compare(rep: Report, square: str, f: ChainMap, g: ChainMap):
    degs = sorted(set(f.source.degrees()))
    for k in degs:
        ok = f.block(k) == g.block(k)
        if not ok:
            diff = f.block(k) - g.block(k)
            rep.add(False, square=square, degree=k, entries=len(diff.entries()))
    if all(e.get("square") != square for e in rep.entries):
        rep.add(True, square=square, degrees=degs)


def verify_diagram(alpha: ChainMap, beta: ChainMap, gamma: ChainMap,
                   i: ChainMap, p: ChainMap, n: int) -> Report:
    """Both squares commute on the nose; five lemma on homology ranks."""
    rep = Report("pairing diagram")
    left = dual_shifted(p, n).compose(alpha)      # CW^+ -> D(RFC)
    right = beta.compose(i)
    _compare(rep, "alpha", left, right)
    left = gamma.compose(p)                        # RFC -> D(CW^+)
    right = dual_shifted(i, n).compose(beta)
    _compare(rep, "gamma", left, right)
    qa, qg = is_quasi_isomorphism(alpha), is_quasi_isomorphism(gamma)
    if qa and qg:
        rep.add(is_quasi_isomorphism(beta), check="five_lemma", alpha_qis=qa, gamma_qis=qg)
    else:
        rep.entries.append({"ok": True, "check": "five_lemma", "skipped": True,
                            "alpha_qis": qa, "gamma_qis": qg})
    return rep


def frobenius_family(n: int, lam=1, field: Field = QQ) -> Tuple[UniformFamily, Dict[int, object]]:
    """Levels span{1, x, u, v} in degrees (0, n, n-1, n), du = v, x^2 = 0.

    All products among x, u, v vanish, continuations are lam times the
    identity and psi is dual to x.
    """
    degs = [0, n, n - 1, n]
    mul = {(0, j): {j: 1} for j in range(4)}
    mul.update({(j, 0): {j: 1} for j in range(1, 4)})
    ops = {(1, ()): {(2,): {3: 1}},
           (1, (1,)): {(j,): {j: lam} for j in range(4)} if lam else {},
           (2, ()): mul}
    return UniformFamily(degs, ops, field), {1: field.one}


# ---------------------------------------------------------------- finite categories

def nondegenerate(P: SparseMatrix) -> Tuple[bool, dict]:
    r = rank(P)
    ok = P.nrows == P.ncols and r == P.nrows
    return ok, {"rows": P.nrows, "cols": P.ncols, "rank": r}


Vec = Dict[int, object]


class FiniteCategoryPresentation:
    """Graded Hom spaces with composition tensors and identities.

    ``hom[(X, Y)]`` maps degrees to dimensions.  ``comp[(X, Y, Z)]`` maps
    (deg g, deg f) to a tensor {(ig, if): {out: coeff}} giving g o f for
    f in Hom(X, Y), g in Hom(Y, Z).  ``ident[X]`` is the index of Id_X in
    Hom^0(X, X).
    """

    def __init__(self, objects, hom, comp, ident, field: Field = QQ, check: bool = True):
        self.objects = list(objects)
        self.field = field
        self.hom = {k: {int(d): int(m) for d, m in v.items() if m} for k, v in hom.items()}
        self.comp = {k: {tuple(dd): {tuple(ix): {int(o): field.norm(c) for o, c in outs.items()}
                                     for ix, outs in T.items()}
                         for dd, T in v.items()} for k, v in comp.items()}
        self.ident = dict(ident)
        if check:
            bad = self.check_laws()
            if bad:
                raise ValueError(f"category laws fail: {bad[0]}")

    def dim(self, X, Y, d) -> int:
        return self.hom.get((X, Y), {}).get(d, 0)

    def degrees(self, X, Y) -> List[int]:
        return sorted(self.hom.get((X, Y), {}))

    def compose(self, X, Y, Z, g: Vec, dg: int, f: Vec, df: int) -> Vec:
        """g o f for f in Hom^df(X, Y), g in Hom^dg(Y, Z)."""
        T = self.comp.get((X, Y, Z), {}).get((dg, df), {})
        out: Vec = {}
        for ig, a in g.items():
            for jf, b in f.items():
                for o, c in T.get((ig, jf), {}).items():
                    v = self.field.norm(out.get(o, 0) + a * b * c)
                    if v:
                        out[o] = v
                    else:
                        out.pop(o, None)
        return out

    def identity(self, X) -> Vec:
        return {self.ident[X]: self.field.one}

    def check_laws(self) -> List[dict]:
        bad = []
        one = self.field.one
        for X, Y in iproduct(self.objects, repeat=2):
            for d in self.degrees(X, Y):
                for j in range(self.dim(X, Y, d)):
                    f = {j: one}
                    if self.compose(X, Y, Y, self.identity(Y), 0, f, d) != f:
                        bad.append({"law": "left identity", "pair": (X, Y), "degree": d, "index": j})
                    if self.compose(X, X, Y, f, d, self.identity(X), 0) != f:
                        bad.append({"law": "right identity", "pair": (X, Y), "degree": d, "index": j})
        for X, Y, Z, U in iproduct(self.objects, repeat=4):
            for df in self.degrees(X, Y):
                for dg in self.degrees(Y, Z):
                    for dh in self.degrees(Z, U):
                        for a, b, c in iproduct(range(self.dim(X, Y, df)), range(self.dim(Y, Z, dg)),
                                                range(self.dim(Z, U, dh))):
                            f, g, h = {a: one}, {b: one}, {c: one}
                            gf = self.compose(X, Y, Z, g, dg, f, df)
                            hg = self.compose(Y, Z, U, h, dh, g, dg)
                            l = self.compose(X, Z, U, h, dh, gf, dg + df)
                            r = self.compose(X, Y, U, hg, dh + dg, f, df)
                            if l != r:
                                bad.append({"law": "associativity", "objects": (X, Y, Z, U),
                                            "degrees": (df, dg, dh), "indices": (a, b, c)})
        return bad

    def to_json(self) -> dict:
        s = self.field.to_str
        return {
            "schema_version": 1,
            "objects": self.objects,
            "hom": [{"source": X, "target": Y, "dims": {str(d): m for d, m in sorted(v.items())}}
                    for (X, Y), v in sorted(self.hom.items())],
            "composition": [{"objects": list(k), "degrees": list(dd),
                             "entries": [[ix[0], ix[1], o, s(c)] for ix, outs in sorted(T.items())
                                         for o, c in sorted(outs.items())]}
                            for k, v in sorted(self.comp.items()) for dd, T in sorted(v.items())],
            "identity": {X: i for X, i in sorted(self.ident.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field = QQ) -> "FiniteCategoryPresentation":
        hom = {(h["source"], h["target"]): {int(d): m for d, m in h["dims"].items()}
               for h in obj["hom"]}
        comp: Dict = {}
        for c in obj.get("composition", []):
            T = comp.setdefault(tuple(c["objects"]), {}).setdefault(tuple(c["degrees"]), {})
            for ig, jf, o, v in c["entries"]:
                T.setdefault((ig, jf), {})[o] = field(v) if isinstance(v, str) else field.norm(v)
        return cls(obj["objects"], hom, comp, obj["identity"], field)


def trivial_extension(objects: Sequence[str], paths: Dict[Tuple[str, str], List[Tuple]],
                      n: int, field: Field = QQ) -> FiniteCategoryPresentation:
    """Degree-0 algebra A plus its dual in degree n-1.

    ``paths[(X, Y)]`` lists basis paths X -> Y of A as tuples of arrow names
    in product order (empty tuple for the identity); composition is
    concatenation.  Hom(X, Y) = A(X, Y) in degree 0 and A(Y, X)^* in
    degree n-1; for phi in A(Y, X)^* and a path a, (phi a)(b) = phi(a b)
    and (a phi)(b) = phi(b a).
    """
    if n - 1 == 0:
        raise ValueError("n must differ from 1")
    A = {k: list(v) for k, v in paths.items()}
    pos = {k: {p: i for i, p in enumerate(v)} for k, v in A.items()}
    top = n - 1
    hom = {}
    for X, Y in iproduct(objects, repeat=2):
        d = {}
        if A.get((X, Y)):
            d[0] = len(A[(X, Y)])
        if A.get((Y, X)):
            d[top] = len(A[(Y, X)])
        if d:
            hom[(X, Y)] = d
    comp: Dict = {}
    for X, Y, Z in iproduct(objects, repeat=3):
        T: Dict = {}
        # a: X -> Y, b: Y -> Z, both in A: b o a = b a
        for ia, a in enumerate(A.get((X, Y), [])):
            for ib, b in enumerate(A.get((Y, Z), [])):
                ba = b + a
                if ba in pos.get((X, Z), {}):
                    T.setdefault((0, 0), {}).setdefault((ib, ia), {})[pos[(X, Z)][ba]] = 1
        # phi in A(Z, Y)^* (Hom^top(Y, Z)) after a in A(X, Y): (phi a)(c) = phi(a c), c: Z -> X
        for ia, a in enumerate(A.get((X, Y), [])):
            for ic, c in enumerate(A.get((Z, X), [])):
                ac = a + c
                if ac in pos.get((Z, Y), {}):
                    T.setdefault((top, 0), {}).setdefault((pos[(Z, Y)][ac], ia), {})[ic] = 1
        # b in A(Y, Z) after phi in A(Y, X)^* (Hom^top(X, Y)): (b phi)(c) = phi(c b), c: Z -> X
        for ib, b in enumerate(A.get((Y, Z), [])):
            for ic, c in enumerate(A.get((Z, X), [])):
                cb = c + b
                if cb in pos.get((Y, X), {}):
                    T.setdefault((0, top), {}).setdefault((ib, pos[(Y, X)][cb]), {})[ic] = 1
        if T:
            comp[(X, Y, Z)] = T
    ident = {X: pos[(X, X)][()] for X in objects}
    return FiniteCategoryPresentation(objects, hom, comp, ident, field)


def frobenius_category(n: int, field: Field = QQ) -> FiniteCategoryPresentation:
    """One object with End = K[x]/x^2, |x| = n - 1."""
    return trivial_extension(["X"], {("X", "X"): [()]}, n, field)


def path_algebra_paths(vertices: Sequence[str], arrows: Sequence[Tuple[str, str]]):
    """Basis paths of the path algebra of an acyclic quiver, keyed (source, target)."""
    out: Dict[Tuple[str, str], List[Tuple]] = {(v, v): [()] for v in vertices}
    frontier = [((v, v), ()) for v in vertices]
    while frontier:
        nxt = []
        for (s, t), p in frontier:
            for i, (a, b) in enumerate(arrows):
                if a == t:
                    q = (f"a{a}{b}",) + p
                    out.setdefault((s, b), []).append(q)
                    nxt.append(((s, b), q))
        frontier = nxt
    return out


def trace_pairing(cat: FiniteCategoryPresentation, n: int, traces: Dict[str, Vec]):
    """pair[(X, Y)][d][r][c] = tr_X(g_r o f_c), g_r in Hom^{n-1-d}(Y, X), f_c in Hom^d(X, Y)."""
    one = cat.field.one
    pair: Dict = {}
    for X, Y in iproduct(cat.objects, repeat=2):
        for d in cat.degrees(X, Y):
            e = n - 1 - d
            rows = {}
            for r in range(cat.dim(Y, X, e)):
                for c in range(cat.dim(X, Y, d)):
                    gf = cat.compose(X, Y, X, {r: one}, e, {c: one}, d)
                    v = cat.field.norm(sum((a * traces[X].get(o, 0) for o, a in gf.items()), 0))
                    if v:
                        rows.setdefault(r, {})[c] = v
            pair.setdefault((X, Y), {})[d] = SparseMatrix(cat.dim(Y, X, e), cat.dim(X, Y, d),
                                                         cat.field, rows)
    return pair


def scaled_pairing(pair, scale: Dict[str, object], field: Field = QQ):
    """Multiply pair[(X, Y)] by scale[X]."""
    return {k: {d: M.scale(field.norm(scale[k[0]])) for d, M in v.items()} for k, v in pair.items()}


def evaluate(pair, X, Y, d, g: Vec, f: Vec, field: Field = QQ):
    M = pair.get((X, Y), {}).get(d)
    if M is None:
        return 0
    tot = 0
    for r, c, v in M.entries():
        tot += g.get(r, 0) * v * f.get(c, 0)
    return field.norm(tot)


def _hom_graph(cat):
    adj = {X: set() for X in cat.objects}
    for (X, Y), dims in cat.hom.items():
        if X != Y and any(dims.values()):
            adj[X].add(Y)
            adj[Y].add(X)
    return adj


def cy_scalar(cat: FiniteCategoryPresentation, pairA, pairB, n: int,
              generators: Optional[Dict[str, Vec]] = None):
    """The constant c with pairB = c pairA, following the generator argument.

    Hypotheses: Hom^{n-1}(X, X) is one-dimensional for every object and the
    graph with an edge X - Y whenever Hom^*(X, Y) != 0 is connected.  For
    each object c_X = B(Id, f_X) / A(Id, f_X) with f_X spanning
    Hom^{n-1}(X, X); along each edge a pair (g, h) with A(g, h) != 0 is
    evaluated and must give c_X on the X side and c_Y on the Y side.
    """
    F = cat.field
    top = n - 1
    for X in cat.objects:
        if cat.dim(X, X, top) != 1:
            raise HypothesisFailed("one-dimensional", f"dim Hom^{top}({X},{X}) = {cat.dim(X, X, top)}")
    adj = _hom_graph(cat)
    seen, todo = {cat.objects[0]}, [cat.objects[0]]
    while todo:
        x = todo.pop()
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    if len(seen) != len(cat.objects):
        raise HypothesisFailed("connectivity", f"unreached {sorted(set(cat.objects) - seen)}")
    gens = generators or {X: {0: F.one} for X in cat.objects}
    c: Dict[str, object] = {}
    for X in cat.objects:
        a = evaluate(pairA, X, X, top, cat.identity(X), gens[X], F)
        if a == 0:
            raise HypothesisFailed("nondegenerate", f"A(Id, f_{X}) = 0")
        c[X] = F.div(evaluate(pairB, X, X, top, cat.identity(X), gens[X], F), a)
    for X in cat.objects:
        for Y in sorted(adj[X]):
            for d in cat.degrees(X, Y):
                M = pairA[(X, Y)][d]
                ent = M.entries()
                if not ent:
                    continue
                r, col, a = ent[0]
                b = evaluate(pairB, X, Y, d, {r: F.one}, {col: F.one}, F)
                ratio = F.div(b, a)
                if ratio != c[X] or c[X] != c[Y]:
                    raise Inconsistent((X, Y), {X: c[X], Y: c[Y], "edge": ratio})
                break
    return c[cat.objects[0]]


def _random_vec(rng, dim, field):
    return {i: field.norm(rng.randint(-3, 3)) for i in range(dim) if rng.random() < 0.8}


def bifunctoriality_check(cat: FiniteCategoryPresentation, pair, n: int, samples: int,
                          rng) -> Report:
    """Identities (1) pair(g, f) = pair_XX(Id, g o f) and (2) pair(g, f) = pair_YX(f, g)."""
    F = cat.field
    top = n - 1
    rep = Report("bifunctoriality")
    cells = [(X, Y, d) for X, Y in iproduct(cat.objects, repeat=2) for d in cat.degrees(X, Y)
             if cat.dim(Y, X, top - d)]
    bad1 = bad2 = 0
    for s in range(samples):
        if not cells:
            break
        X, Y, d = cells[rng.randrange(len(cells))]
        f = _random_vec(rng, cat.dim(X, Y, d), F)
        g = _random_vec(rng, cat.dim(Y, X, top - d), F)
        lhs = evaluate(pair, X, Y, d, g, f, F)
        gf = cat.compose(X, Y, X, g, top - d, f, d)
        one = evaluate(pair, X, X, top, cat.identity(X), gf, F)
        two = evaluate(pair, Y, X, top - d, f, g, F)
        if lhs != one:
            bad1 += 1
            rep.add(False, identity=1, objects=(X, Y), degree=d, f=f, g=g, lhs=str(lhs), rhs=str(one))
        if lhs != two:
            bad2 += 1
            rep.add(False, identity=2, objects=(X, Y), degree=d, f=f, g=g, lhs=str(lhs), rhs=str(two))
    if not bad1:
        rep.add(True, identity=1, samples=samples)
    if not bad2:
        rep.add(True, identity=2, samples=samples)
    return rep


# ---------------------------------------------------------------- slopes for the duality

def duality_slopes(st: SlopeTable, spec: Iterable, pair: Tuple[str, str], W: int) -> Tuple[Dict[int, Fraction], Report]:
    """sigma_{-w} in [tau_{-w}, -tau_w + tau_0] with [sigma_{-w}, -tau_w] free of Spec.

    Takes sigma_{-w} = -tau_w + tau_0, the right end of the allowed range,
    and checks both conditions and that the sequence decreases.
    """
    spec = sorted(Fraction(x) for x in spec)
    rep = Report("duality slopes")
    sig = {}
    for w in range(1, W + 1):
        tw, tmw = st.tau(*pair, w), st.tau(*pair, -w)
        s = -tw + st.tau0
        sig[w] = s
        rep.add(tmw <= s <= -tw + st.tau0, condition="range", w=w)
        hit = [x for x in spec if s <= x <= -tw]
        rep.add(not hit, condition="gap", w=w, hits=[str(x) for x in hit])
    ws = sorted(sig)
    rep.add(all(sig[u] > sig[v] for u, v in zip(ws, ws[1:])), condition="decreasing")
    return sig, rep
