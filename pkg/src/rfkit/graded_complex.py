"""Finite Z-graded cochain complexes (differential of degree +1).

A complex stores one dimension per degree and a matrix ``d[k]`` from degree
k to degree k+1.  Basis elements may carry hashable labels, which lets the
telescope and Rabinowitz constructions address pieces by (part, level, i).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .exact_linalg import (QQ, Field, Reducer, SparseMatrix, block_matrix,
                           cohomology_at, kernel_basis, rank)


class DSquareNonzero(ValueError):
    def __init__(self, degree):
        super().__init__(f"d^2 != 0 at degree {degree} (d[{degree + 1}] d[{degree}])")
        self.degree = degree


class NotAChainMap(ValueError):
    def __init__(self, degree, what="map"):
        super().__init__(f"{what} does not commute with differentials at degree {degree}")
        self.degree = degree
        self.what = what


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


class GradedComplex:
    """Cochain complex with finitely many nonzero spaces."""

    def __init__(self, spaces: Dict[int, int], diffs: Dict[int, SparseMatrix],
                 field: Field = QQ, labels: Optional[Dict[int, List[Hashable]]] = None,
                 check: bool = True):
        self.field = field
        self.spaces = {int(k): int(v) for k, v in spaces.items() if v}
        self.diffs: Dict[int, SparseMatrix] = {}
        for k, M in diffs.items():
            k = int(k)
            exp = (self.dim(k + 1), self.dim(k))
            if M.shape != exp:
                raise ValueError(f"d[{k}] has shape {M.shape}, expected {exp}")
            if not M.is_zero():
                self.diffs[k] = M
        if labels is not None:
            self.labels = {k: list(labels.get(k, [])) for k in self.spaces}
            for k, labs in self.labels.items():
                if len(labs) != self.spaces[k]:
                    raise ValueError(f"degree {k}: {len(labs)} labels for dim {self.spaces[k]}")
        else:
            self.labels = {k: list(range(n)) for k, n in self.spaces.items()}
        if check:
            for k in sorted(self.diffs):
                if k + 1 in self.diffs and not (self.diffs[k + 1] @ self.diffs[k]).is_zero():
                    raise DSquareNonzero(k)

    def dim(self, k: int) -> int:
        return self.spaces.get(k, 0)

    def d(self, k: int) -> SparseMatrix:
        M = self.diffs.get(k)
        if M is None:
            return SparseMatrix.zero(self.dim(k + 1), self.dim(k), self.field)
        return M

    def degrees(self) -> List[int]:
        return sorted(self.spaces)

    def support(self) -> Tuple[int, int]:
        ks = self.degrees()
        return (ks[0], ks[-1]) if ks else (0, -1)

    @cached_property
    def index(self) -> Dict[Hashable, Tuple[int, int]]:
        """label -> (degree, position)"""
        out = {}
        for k, labs in self.labels.items():
            for i, lab in enumerate(labs):
                out[lab] = (k, i)
        return out

    def total_dim(self) -> int:
        return sum(self.spaces.values())

    def euler_characteristic(self) -> int:
        return sum(_sign(k) * n for k, n in self.spaces.items())

    def __repr__(self):
        return f"GradedComplex({self.field.name}, {dict(sorted(self.spaces.items()))})"


def make_complex(spaces, differentials, field: Field = QQ, labels=None) -> GradedComplex:
    """Validated constructor; raises DSquareNonzero(k) at the failing junction."""
    return GradedComplex(spaces, differentials, field, labels)


def empty_complex(field: Field = QQ) -> GradedComplex:
    return GradedComplex({}, {}, field)


# ---------------------------------------------------------------- homology

def cohomology(C: GradedComplex, k: int):
    return cohomology_at(C.d(k - 1), C.d(k))


def homology(C: GradedComplex) -> Dict[int, int]:
    return {k: cohomology(C, k)[0] for k in C.degrees()}


def homology_dims(C: GradedComplex, lo: int, hi: int) -> Dict[int, int]:
    return {k: (cohomology(C, k)[0] if C.dim(k) else 0) for k in range(lo, hi + 1)}


def is_acyclic(C: GradedComplex) -> bool:
    return all(v == 0 for v in homology(C).values())


class HomologyBasis:
    """Cocycle representatives in one degree with a solver for classes."""

    def __init__(self, C: GradedComplex, k: int):
        self.k = k
        dim, reps = cohomology(C, k)
        self.dim = dim
        self.reps = reps
        self._red = Reducer(C.field)
        self._nb = 0
        for col in C.d(k - 1).columns():
            if col:
                self._red.add(col)
                self._nb += 1
        for r in reps:
            self._red.add(r)
        self._dk = C.d(k)

    def coords(self, z) -> Dict[int, object]:
        """Class of the cocycle ``z`` in the representative basis."""
        if self._dk.apply(z):
            raise ValueError("not a cocycle")
        combo = self._red.express(z)
        return {i - self._nb: v for i, v in combo.items() if i >= self._nb}


# ---------------------------------------------------------------- chain maps

class ChainMap:
    """Map X -> Y raising degree by ``degree_shift``; blocks[k]: X^k -> Y^{k+s}.

    The commutation rule is d_Y f = (-1)^s f d_X.
    """

    def __init__(self, source: GradedComplex, target: GradedComplex,
                 blocks: Dict[int, SparseMatrix], degree_shift: int = 0,
                 check: bool = True, name: str = "map"):
        self.source = source
        self.target = target
        self.shift = degree_shift
        self.name = name
        self.field = source.field
        self.blocks: Dict[int, SparseMatrix] = {}
        for k, M in blocks.items():
            exp = (target.dim(k + degree_shift), source.dim(k))
            if M.shape != exp:
                raise ValueError(f"{name} block {k} has shape {M.shape}, expected {exp}")
            if not M.is_zero():
                self.blocks[k] = M
        if check:
            bad = chain_map_defect(self)
            if bad is not None:
                raise NotAChainMap(bad, name)

    def block(self, k: int) -> SparseMatrix:
        M = self.blocks.get(k)
        if M is None:
            return SparseMatrix.zero(self.target.dim(k + self.shift), self.source.dim(k), self.field)
        return M

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other"""
        blocks = {k: self.block(k + other.shift) @ other.block(k) for k in other.source.degrees()}
        return ChainMap(other.source, self.target, blocks, self.shift + other.shift,
                        name=f"{self.name}*{other.name}")

    def __repr__(self):
        return f"ChainMap({self.name}, shift={self.shift})"


def chain_map_defect(f: ChainMap) -> Optional[int]:
    """First degree where d_Y f != (-1)^s f d_X, or None."""
    s = f.shift
    sign = _sign(s)
    for k in sorted(set(f.source.degrees()) | {k - 1 for k in f.source.degrees()}):
        lhs = f.target.d(k + s) @ f.block(k)
        rhs = f.block(k + 1) @ f.source.d(k)
        if sign < 0:
            rhs = -rhs
        if lhs != rhs:
            return k
    return None


def identity_map(C: GradedComplex) -> ChainMap:
    return ChainMap(C, C, {k: SparseMatrix.identity(n, C.field) for k, n in C.spaces.items()},
                    name="id")


def zero_map(X: GradedComplex, Y: GradedComplex) -> ChainMap:
    return ChainMap(X, Y, {}, name="zero")


def induced_map(f: ChainMap, k: int, hs: Optional[HomologyBasis] = None,
                ht: Optional[HomologyBasis] = None) -> SparseMatrix:
    """Matrix of H^k(X) -> H^{k+s}(Y) in representative bases."""
    hs = hs or HomologyBasis(f.source, k)
    ht = ht or HomologyBasis(f.target, k + f.shift)
    cols = [ht.coords(f.block(k).apply(z)) for z in hs.reps]
    return SparseMatrix.from_columns(cols, ht.dim, f.field)


def is_quasi_isomorphism(f: ChainMap) -> bool:
    for k in sorted(set(f.source.degrees()) | {k - f.shift for k in f.target.degrees()}):
        hs = HomologyBasis(f.source, k)
        ht = HomologyBasis(f.target, k + f.shift)
        if hs.dim != ht.dim:
            return False
        if hs.dim and rank(induced_map(f, k, hs, ht)) != hs.dim:
            return False
    return True


# ---------------------------------------------------------------- combinators

def cone(f: ChainMap) -> GradedComplex:
    """Cone(f)^k = X^{k+1} + Y^k with differential [[-d_X, 0], [f, d_Y]]."""
    if f.shift != 0:
        raise ValueError("cone needs a degree-preserving map")
    bad = chain_map_defect(f)
    if bad is not None:
        raise NotAChainMap(bad, f.name)
    X, Y = f.source, f.target
    degs = sorted({k - 1 for k in X.degrees()} | set(Y.degrees()))
    spaces, diffs, labels = {}, {}, {}
    for k in degs:
        spaces[k] = X.dim(k + 1) + Y.dim(k)
        labels[k] = [("x", lab) for lab in X.labels.get(k + 1, [])] + \
                    [("y", lab) for lab in Y.labels.get(k, [])]
    for k in degs:
        rs = [X.dim(k + 2), Y.dim(k + 1)]
        cs = [X.dim(k + 1), Y.dim(k)]
        diffs[k] = block_matrix([[-X.d(k + 1), None], [f.block(k + 1), Y.d(k)]], rs, cs, X.field)
    return GradedComplex(spaces, diffs, X.field, labels)


def cone_sequence(f: ChainMap) -> Tuple[GradedComplex, ChainMap, ChainMap]:
    """The canonical sequence Y -> Cone(f) -> X[1] (inclusion, projection)."""
    C = cone(f)
    X, Y = f.source, f.target
    X1 = shift(X, 1)
    inc, proj = {}, {}
    for k in C.degrees():
        nx, ny = X.dim(k + 1), Y.dim(k)
        inc[k] = SparseMatrix(nx + ny, ny, f.field, {nx + i: {i: 1} for i in range(ny)})
        proj[k] = SparseMatrix(nx, nx + ny, f.field, {i: {i: 1} for i in range(nx)})
    for k in Y.degrees():
        inc.setdefault(k, SparseMatrix.zero(C.dim(k), Y.dim(k), f.field))
    return C, ChainMap(Y, C, inc, name="inclusion"), ChainMap(C, X1, proj, name="projection")


def shift(C: GradedComplex, m: int) -> GradedComplex:
    """C[m]^k = C^{k+m}, differential scaled by (-1)^m."""
    s = _sign(m)
    spaces = {k - m: n for k, n in C.spaces.items()}
    diffs = {k - m: (M if s > 0 else -M) for k, M in C.diffs.items()}
    labels = {k - m: labs for k, labs in C.labels.items()}
    return GradedComplex(spaces, diffs, C.field, labels, check=False)


def dualize(C: GradedComplex) -> GradedComplex:
    """(C^v)^k = (C^{-k})^*, with (d phi) = -(-1)^{deg phi} phi o d."""
    spaces = {-k: n for k, n in C.spaces.items()}
    diffs = {}
    for k in spaces:
        # (C^v)^k -> (C^v)^{k+1} is the transpose of d: C^{-k-1} -> C^{-k}
        M = C.d(-k - 1).transpose()
        diffs[k] = M if k % 2 else -M
    labels = {-k: [("dual", lab) for lab in labs] for k, labs in C.labels.items()}
    return GradedComplex(spaces, diffs, C.field, labels, check=False)


def twist_sign(C: GradedComplex) -> GradedComplex:
    """Same spaces, differential d'(x) = (-1)^{deg x} d(x)."""
    diffs = {k: (M if k % 2 == 0 else -M) for k, M in C.diffs.items()}
    return GradedComplex(C.spaces, diffs, C.field, C.labels, check=False)


def shift_map(f: ChainMap, m: int) -> ChainMap:
    """f[m] between the shifted complexes (same blocks, relabeled)."""
    return ChainMap(shift(f.source, m), shift(f.target, m),
                    {k - m: M for k, M in f.blocks.items()}, f.shift, name=f"{f.name}[{m}]")


def dual_map(f: ChainMap) -> ChainMap:
    """f^v: Y^v -> X^v, phi -> phi o f (degree-preserving f)."""
    if f.shift != 0:
        raise ValueError("dual_map needs a degree-preserving map")
    Xd, Yd = dualize(f.source), dualize(f.target)
    blocks = {-k: M.transpose() for k, M in f.blocks.items()}
    return ChainMap(Yd, Xd, blocks, 0, name=f"{f.name}^v")


def restrict(C: GradedComplex, keep: Callable[[Hashable], bool]) -> GradedComplex:
    """Subquotient spanned by the labels satisfying ``keep``.

    Only meaningful when the kept labels span a difference of subcomplexes;
    the constructor re-checks d^2 = 0.
    """
    idx = {k: [i for i, lab in enumerate(labs) if keep(lab)] for k, labs in C.labels.items()}
    spaces = {k: len(v) for k, v in idx.items() if v}
    labels = {k: [C.labels[k][i] for i in idx[k]] for k in spaces}
    diffs = {}
    for k in spaces:
        if k + 1 in spaces:
            diffs[k] = C.d(k).submatrix(idx[k + 1], idx[k])
    return GradedComplex(spaces, diffs, C.field, labels)


def direct_sum(*cs: GradedComplex) -> GradedComplex:
    field = cs[0].field if cs else QQ
    degs = sorted(set().union(*[c.spaces for c in cs])) if cs else []
    spaces = {k: sum(c.dim(k) for c in cs) for k in degs}
    diffs = {k: block_matrix([[c.d(k) if i == j else None for j, c in enumerate(cs)]
                              for i, _ in enumerate(cs)],
                             [c.dim(k + 1) for c in cs], [c.dim(k) for c in cs], field)
             for k in degs}
    labels = {k: [(i, lab) for i, c in enumerate(cs) for lab in c.labels.get(k, [])] for k in degs}
    return GradedComplex(spaces, diffs, field, labels)


# ---------------------------------------------------------------- exactness

@dataclass
class Report:
    """PASS/FAIL report with per-item entries."""
    name: str
    passed: bool = True
    entries: List[dict] = dc_field(default_factory=list)

    def add(self, ok: bool, **info):
        info["ok"] = bool(ok)
        self.entries.append(info)
        if not ok:
            self.passed = False

    def failures(self):
        return [e for e in self.entries if not e["ok"]]

    def to_dict(self):
        return {"name": self.name, "status": "PASS" if self.passed else "FAIL",
                "entries": self.entries}


def verify_exact(sequence: Sequence[ChainMap], ends: bool = False) -> Report:
    """Check exactness at every interior slot of f_1, f_2, ... degreewise.

    With ``ends=True`` also check the first map is injective and the last is
    surjective, i.e. the sequence is short exact when padded by zeros.
    """
    rep = Report("exactness")
    for j in range(len(sequence) - 1):
        f, g = sequence[j], sequence[j + 1]
        mid = f.target
        for k in sorted(set(mid.degrees())):
            kin = k - f.shift
            comp = g.block(k) @ f.block(kin)
            im = rank(f.block(kin))
            ker = mid.dim(k) - rank(g.block(k))
            rep.add(comp.is_zero() and im == ker, slot=j + 1, degree=k, image=im, kernel=ker)
    if ends and sequence:
        f = sequence[0]
        for k in f.source.degrees():
            r = rank(f.block(k))
            rep.add(r == f.source.dim(k), slot=0, degree=k, image=0, kernel=f.source.dim(k) - r)
        g = sequence[-1]
        for k in g.target.degrees():
            r = rank(g.block(k - g.shift))
            rep.add(r == g.target.dim(k), slot=len(sequence), degree=k, image=r,
                    kernel=g.target.dim(k))
    return rep


def _lift(M: SparseMatrix, b):
    red = Reducer(M.field)
    for col in M.columns():
        red.add(col)
    return red.express(b)


def long_exact_sequence(i: ChainMap, p: ChainMap, lo: int, hi: int):
    """Homology maps of a short exact sequence A -i-> B -p-> C.

    Returns a list of (label, degree, matrix, source_dim, target_dim) in the
    order H^k(A) -> H^k(B) -> H^k(C) -> H^{k+1}(A) -> ... for k in [lo, hi].
    The connecting map is built by the snake construction.
    """
    A, B, C = i.source, i.target, p.target
    hb = {}

    def hbasis(X, k):
        key = (id(X), k)
        if key not in hb:
            hb[key] = HomologyBasis(X, k)
        return hb[key]

    out = []
    for k in range(lo, hi + 1):
        ha, hbb, hc, ha1 = hbasis(A, k), hbasis(B, k), hbasis(C, k), hbasis(A, k + 1)
        out.append(("i", k, induced_map(i, k, ha, hbb), ha.dim, hbb.dim))
        out.append(("p", k, induced_map(p, k, hbb, hc), hbb.dim, hc.dim))
        cols = []
        for z in hc.reps:
            b = _lift(p.block(k), z)
            db = B.d(k).apply(b)
            a = _lift(i.block(k + 1), db)
            if a is None:
                raise ValueError("sequence is not short exact")
            cols.append(ha1.coords(a))
        out.append(("delta", k, SparseMatrix.from_columns(cols, ha1.dim, A.field), hc.dim, ha1.dim))
    return out


def verify_long_exact(i: ChainMap, p: ChainMap, lo: int, hi: int) -> Report:
    """Exactness of the induced long sequence on homology over [lo, hi]."""
    seq = long_exact_sequence(i, p, lo, hi)
    rep = Report("long exact sequence")
    for (la, ka, Ma, _, ta), (lb, kb, Mb, sb, _) in zip(seq, seq[1:]):
        comp = Mb @ Ma
        im = rank(Ma)
        ker = sb - rank(Mb)
        rep.add(comp.is_zero() and im == ker, at=f"{la}{ka}->{lb}{kb}", image=im, kernel=ker)
    return rep


# ---------------------------------------------------------------- JSON

def _scalar_str(v) -> str:
    return str(v)


def complex_to_json(C: GradedComplex) -> dict:
    return {
        "spaces": {str(k): n for k, n in sorted(C.spaces.items())},
        "diffs": {str(k): [[r, c, _scalar_str(v)] for r, c, v in M.entries()]
                  for k, M in sorted(C.diffs.items())},
    }


def complex_from_json(obj: dict, field: Field = QQ) -> GradedComplex:
    spaces = {int(k): int(v) for k, v in obj.get("spaces", {}).items()}
    diffs = {}
    for k, ents in obj.get("diffs", {}).items():
        k = int(k)
        diffs[k] = SparseMatrix.from_entries(spaces.get(k + 1, 0), spaces.get(k, 0),
                                             [(r, c, field(str(v))) for r, c, v in ents], field)
    return make_complex(spaces, diffs, field)


def chainmap_to_json(f: ChainMap) -> dict:
    return {"shift": f.shift,
            "blocks": {str(k): [[r, c, _scalar_str(v)] for r, c, v in M.entries()]
                       for k, M in sorted(f.blocks.items())}}


def chainmap_from_json(obj: dict, X: GradedComplex, Y: GradedComplex, name="map") -> ChainMap:
    s = int(obj.get("shift", 0))
    blocks = {}
    for k, ents in obj.get("blocks", {}).items():
        k = int(k)
        blocks[k] = SparseMatrix.from_entries(Y.dim(k + s), X.dim(k),
                                              [(r, c, X.field(str(v))) for r, c, v in ents], X.field)
    return ChainMap(X, Y, blocks, s, name=name)


# ---------------------------------------------------------------- random data

def _random_entry(rng, field: Field, density: float):
    if rng.random() > density:
        return 0
    return field.norm(rng.choice((-2, -1, 1, 1, 2, 3)))


def random_complex(rng, field: Field, dims: Dict[int, int], density: float = 0.6) -> GradedComplex:
    """A complex with the given dimensions and a random differential.

    d^k is a random combination of rows spanning the left kernel of
    d^{k-1}, so d^k d^{k-1} = 0 by construction.
    """
    degs = sorted(k for k, n in dims.items() if n)
    diffs: Dict[int, SparseMatrix] = {}
    prev: Optional[SparseMatrix] = None
    for k in degs:
        nk, nk1 = dims[k], dims.get(k + 1, 0)
        if nk1 == 0:
            prev = None
            continue
        left = kernel_basis(prev.transpose()) if prev is not None else \
            [{i: field.one} for i in range(nk)]
        rows = {}
        for r in range(nk1):
            acc: Dict[int, object] = {}
            for v in left:
                a = _random_entry(rng, field, density)
                if a:
                    for c, x in v.items():
                        acc[c] = field.norm(acc.get(c, 0) + a * x)
            rows[r] = {c: x for c, x in acc.items() if x}
        prev = SparseMatrix(nk1, nk, field, rows)
        diffs[k] = prev
    return GradedComplex({k: dims[k] for k in degs}, diffs, field)


def chain_map_space(X: GradedComplex, Y: GradedComplex) -> List[Dict[int, SparseMatrix]]:
    """A basis of the degree-0 chain maps X -> Y (kernel of f -> d f - f d)."""
    field = X.field
    degs = sorted(set(X.degrees()) & set(Y.degrees()))
    offset, off = {}, 0
    for k in degs:
        offset[k] = off
        off += Y.dim(k) * X.dim(k)

    def var(k, r, c):
        return offset[k] + r * X.dim(k) + c

    eqs: Dict[int, Dict[int, object]] = {}
    row = 0
    for k in sorted(set(degs) | {k - 1 for k in degs}):
        dY, dX = Y.d(k), X.d(k)
        for r in range(Y.dim(k + 1)):
            for c in range(X.dim(k)):
                eq: Dict[int, object] = {}
                if k in offset:
                    for (i, j, v) in dY.entries():
                        if i == r:
                            eq[var(k, j, c)] = field.norm(eq.get(var(k, j, c), 0) + v)
                if k + 1 in offset:
                    for (i, j, v) in dX.entries():
                        if j == c:
                            eq[var(k + 1, r, i)] = field.norm(eq.get(var(k + 1, r, i), 0) - v)
                eq = {a: b for a, b in eq.items() if b}
                if eq:
                    eqs[row] = eq
                    row += 1
    M = SparseMatrix(row, off, field, eqs)
    out = []
    for v in kernel_basis(M):
        blocks = {}
        for k in degs:
            rows: Dict[int, Dict[int, object]] = {}
            for r in range(Y.dim(k)):
                for c in range(X.dim(k)):
                    x = v.get(var(k, r, c))
                    if x:
                        rows.setdefault(r, {})[c] = x
            blocks[k] = SparseMatrix(Y.dim(k), X.dim(k), field, rows)
        out.append(blocks)
    return out


def random_chain_map(rng, X: GradedComplex, Y: GradedComplex, density: float = 0.6,
                     name: str = "map") -> ChainMap:
    field = X.field
    acc: Dict[int, SparseMatrix] = {}
    for blocks in chain_map_space(X, Y):
        a = _random_entry(rng, field, density)
        if not a:
            continue
        for k, B in blocks.items():
            acc[k] = acc[k] + B.scale(a) if k in acc else B.scale(a)
    return ChainMap(X, Y, acc, name=name)
