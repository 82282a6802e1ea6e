"""The Rabinowitz complex and its A-infinity operations.

Two descriptions of the same complex live here.

* ``build_rfc`` forms the mapping cone of c = i o c01 o pi from the
  cotelescope to the telescope of two directed systems.
* ``ab_complex`` writes it as A + Bq with A and B indexed by levels w in a
  window, and the differential obtained from ``assemble_mu`` at k = 1.

Elements of the A/B description are sparse dicts keyed by (part, w, i)
with part "A" or "B"; the degree of ("A", w, i) is the degree of basis
vector i at level w, and ("B", w, i) sits one lower because |q| = -1.

Operation data are raw counts m^{k,F,w}.  The signed operations are
mu_A^{k,F,w} = (-1)^* m^{k,F,w} with
    * = sum_j j deg x_j + sum_{j in F} sum_{m > j} (deg x_m - 1),
and mu_B^{k,F,w} is the sum over f in F of (-1)^{*_f} mu_A^{k,F-f,w^f},
*_f = sum_{l > f} (deg x_l - 1).  Inputs are listed as (x_1, ..., x_k),
x_1 being the rightmost tensor factor.
"""

from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from .exact_linalg import QQ, Field, SparseMatrix, rank
from .graded_complex import (ChainMap, GradedComplex, HomologyBasis, Report, chain_map_defect,
                             cone_sequence, homology, induced_map, verify_exact,
                             verify_long_exact, NotAChainMap)
from .limit_systems import (DirectedSystem, IndexOutOfWindow, cotelescope, telescope)
from .popsicle import ainfinity_terms


class WeightMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class MissingOperation(KeyError):
    def __init__(self, k, F, w):
        super().__init__(f"operation k={k} F={sorted(F)} w={tuple(w)} not supplied")
        self.k, self.F, self.w = k, frozenset(F), tuple(w)


def _sign(e):
    return -1 if e % 2 else 1


Element = Dict[Tuple[str, int, int], object]
Tensor = Dict[Tuple[int, ...], Dict[int, object]]


# ---------------------------------------------------------------- cone model

@dataclass
class RabinowitzComplex:
    cw_minus: GradedComplex
    cw_plus: GradedComplex
    c: ChainMap
    total: GradedComplex
    n: int
    inclusion: ChainMap
    projection: ChainMap
    ses_report: Report
    c01: ChainMap
    window: Tuple[int, int]

    def rfh(self) -> Dict[int, int]:
        return homology(self.total)

    def element(self, k: int, vec) -> Element:
        """A degree-k vector of the cone written in A/B coordinates (signs included)."""
        out = {}
        for i, v in vec.items():
            lab, s = self.to_ab(k, self.total.labels[k][i])
            out[lab] = s * v
        return out

    def to_ab(self, k: int, lab):
        """A/B label and sign of a degree-k cone basis vector.

        Telescope vectors keep their sign; a cotelescope vector of cone
        degree k picks up (-1)^(k+1), which turns the cone differential into
        the truncated mu-check^1.
        """
        side, (part, w, i) = lab
        sysm = self.cw_minus.system if side == "x" else self.cw_plus.system
        if side == "y":
            new, ldeg, s = ("A" if part == "a" else "B"), (k if part == "a" else k + 1), 1
        else:
            new, ldeg, s = ("B" if part == "a" else "A"), (k + 1 if part == "a" else k), _sign(k + 1)
        gi = getattr(sysm.levels[w], "global_index", None)
        return (new, w, gi[(ldeg, i)] if gi else i), s

    def ab_isomorphism(self, ab: GradedComplex) -> ChainMap:
        """The signed relabelling from the cone to ``ab_complex`` on the same window."""
        blocks = {}
        for k in self.total.degrees():
            pos = {l: j for j, l in enumerate(ab.labels.get(k, []))}
            rows: Dict[int, Dict[int, object]] = {}
            for c, lab in enumerate(self.total.labels[k]):
                t, s = self.to_ab(k, lab)
                rows.setdefault(pos[t], {})[c] = s
            blocks[k] = SparseMatrix(ab.dim(k), self.total.dim(k), self.total.field, rows)
        return ChainMap(self.total, ab, blocks, name="cone->AB")


def build_rfc(sys_minus: DirectedSystem, sys_plus: DirectedSystem, c01: ChainMap, n: int,
              W_minus: Optional[int] = None, W_plus: Optional[int] = None) -> RabinowitzComplex:
    """Cone of c = i o c01 o pi : CW_{n-*} -> CW^*.

    pi picks the level-0 a-part of the cotelescope and i puts a vector of
    level 1 into the telescope.  The windows default to the full systems.
    """
    if W_minus is None:
        W_minus = -min(sys_minus.levels)
    if W_plus is None:
        W_plus = max(sys_plus.levels)
    bad = chain_map_defect(c01)
    if bad is not None:
        raise NotAChainMap(bad, "c01")
    if c01.source is not sys_minus.levels[0] or c01.target is not sys_plus.levels[1]:
        raise ValueError("c01 must go from level 0 to level 1")
    cm = cotelescope(sys_minus, W_minus, n)
    cp = telescope(sys_plus, W_plus)
    blocks = {}
    for k in cm.degrees():
        rows: Dict[int, Dict[int, object]] = {}
        tpos = {l: j for j, l in enumerate(cp.labels.get(k, []))}
        for col, lab in enumerate(cm.labels[k]):
            part, w, i = lab
            if part == "a" and w == 0:
                for r, v in c01.block(k).column(i).items():
                    rows.setdefault(tpos[("a", 1, r)], {})[col] = v
        blocks[k] = SparseMatrix(cp.dim(k), cm.dim(k), cm.field, rows)
    cm.system, cp.system = sys_minus, sys_plus
    c = ChainMap(cm, cp, blocks, name="c")
    total, inc, proj = cone_sequence(c)
    rep = verify_exact([inc, proj], ends=True)
    lo, hi = total.support()
    les = verify_long_exact(inc, proj, lo - 1, hi + 1)
    rep.entries.extend(dict(e, sequence="homology") for e in les.entries)
    rep.passed = rep.passed and les.passed
    return RabinowitzComplex(cm, cp, c, total, n, inc, proj, rep, c01, (-W_minus, W_plus))


def rfh_expected_for_zero(rfc: RabinowitzComplex) -> Dict[int, int]:
    """dim HW^k + dim HW_{n-1-k}: the cone of the zero map."""
    hp, hm = homology(rfc.cw_plus), homology(rfc.cw_minus)
    ks = set(hp) | {k - 1 for k in hm}
    return {k: hp.get(k, 0) + hm.get(k + 1, 0) for k in ks}


def continuation_rank_bound(rfc: RabinowitzComplex) -> Report:
    """rank c_* <= rank (c01)_* <= min(dim H(level 0), dim H(level 1)) per degree."""
    rep = Report("continuation rank bound")
    f = rfc.c01
    degs = sorted(set(f.source.degrees()) | set(f.target.degrees()))
    for k in degs:
        h0 = HomologyBasis(f.source, k).dim
        h1 = HomologyBasis(f.target, k).dim
        r01 = rank(induced_map(f, k))
        rc = rank(induced_map(rfc.c, k))
        rep.add(rc <= r01 <= min(h0, h1), degree=k, rank_c=rc, rank_c01=r01,
                dim_h_level0=h0, dim_h_level1=h1)
    return rep


# ---------------------------------------------------------------- operation data

def _key_F(F) -> FrozenSet[int]:
    return frozenset(int(x) for x in F)


class OperationFamily:
    """Raw counts m^{k,F,w} on levels with graded bases.

    ``levels`` maps w to the list of basis degrees of that level.  ``ops``
    maps (k, F, (w0, w1, ..., wk)) to a tensor {(i1, ..., ik): {out: coeff}}.
    Inside ``weight_range`` a missing key means the zero operation; a lookup
    with any weight outside raises MissingOperation.

    Flavors with repeated entries (tuples such as (1, 1)) describe sprinkles
    sharing a geodesic.  They are refused unless ``allow_sym`` is set, and
    even then they are kept aside and never used.
    """

    uniform = False

    def __init__(self, levels: Dict[int, Sequence[int]], ops: Dict, weight_range: Tuple[int, int],
                 field: Field = QQ, allow_sym: bool = False):
        self.field = field
        self.levels = {int(w): list(d) for w, d in levels.items()}
        self.weight_range = tuple(weight_range)
        self.ops: Dict[Tuple[int, FrozenSet[int], Tuple[int, ...]], Tensor] = {}
        self.sym_ops: Dict = {}
        for (k, F, w), T in ops.items():
            Ft = tuple(F)
            if len(set(Ft)) != len(Ft):
                if not allow_sym:
                    raise ValueError(f"flavor {Ft} is not injective (Sym-nontrivial)")
                self.sym_ops[(k, Ft, tuple(w))] = T
                continue
            F = _key_F(F)
            w = tuple(int(x) for x in w)
            self._validate(k, F, w, T)
            self.ops[(k, F, w)] = {tuple(ix): {int(o): field.norm(v) for o, v in outs.items()}
                                   for ix, outs in T.items()}

    def _validate(self, k, F, w, T):
        if len(w) != k + 1:
            raise WeightMismatch(f"k={k} needs {k + 1} weights, got {w}")
        if w[0] != sum(w[1:]) + len(F):
            raise WeightMismatch(f"w0={w[0]} != {sum(w[1:])} + |F|={len(F)}")
        if not F <= set(range(1, k + 1)):
            raise ValueError(f"flavor {sorted(F)} not inside 1..{k}")
        for ix, outs in T.items():
            if len(ix) != k:
                raise ValueError(f"input tuple {ix} has the wrong length")
            dsum = sum(self.degree(w[j + 1], ix[j]) for j in range(k))
            for o, v in outs.items():
                if v and self.degree(w[0], o) != dsum + 2 - k - len(F):
                    raise DegreeMismatch(f"op {(k, sorted(F), w)}: output {o} has degree "
                                         f"{self.degree(w[0], o)}, expected {dsum + 2 - k - len(F)}")

    def degree(self, w: int, i: int) -> int:
        return self.level_degrees(w)[i]

    def level_degrees(self, w: int) -> List[int]:
        try:
            return self.levels[w]
        except KeyError:
            raise MissingOperation(1, (), (w, w)) from None

    def in_range(self, w) -> bool:
        lo, hi = self.weight_range
        return all(lo <= x <= hi for x in w)

    def lookup(self, k: int, F: FrozenSet[int], w: Tuple[int, ...]) -> Tensor:
        if not self.in_range(w):
            raise MissingOperation(k, F, w)
        return self.ops.get((k, F, w), {})

    def keys(self):
        return sorted(self.ops, key=lambda t: (t[0], sorted(t[1]), t[2]))

    def with_op(self, key, tensor) -> "OperationFamily":
        ops = {k: v for k, v in self.ops.items()}
        ops[key] = tensor
        return OperationFamily(self.levels, ops, self.weight_range, self.field)


class UniformFamily(OperationFamily):
    """The same level and the same operations at every weight.

    ``ops`` maps (k, F) to a tensor; the operation at weights (w0, w1..wk)
    is that tensor whenever w0 = w1 + ... + wk + |F|.
    """

    uniform = True

    def __init__(self, degrees: Sequence[int], ops: Dict, field: Field = QQ,
                 allow_sym: bool = False):
        self.field = field
        self.base = list(degrees)
        self.weight_range = (None, None)
        self.ops = {}
        self.sym_ops = {}
        for (k, F), T in ops.items():
            Ft = tuple(F)
            if len(set(Ft)) != len(Ft):
                if not allow_sym:
                    raise ValueError(f"flavor {Ft} is not injective (Sym-nontrivial)")
                self.sym_ops[(k, Ft)] = T
                continue
            F = _key_F(F)
            w = (len(F),) + (0,) * k
            self._validate(k, F, w, T)
            self.ops[(k, F)] = {tuple(ix): {int(o): field.norm(v) for o, v in outs.items()}
                                for ix, outs in T.items()}

    @property
    def levels(self):
        return _AllLevels(self.base)

    def level_degrees(self, w):
        return self.base

    def in_range(self, w):
        return True

    def lookup(self, k, F, w):
        if w[0] != sum(w[1:]) + len(F):
            raise WeightMismatch(f"w0={w[0]} != {sum(w[1:])} + |F|={len(F)}")
        return self.ops.get((k, F), {})

    def keys(self):
        return sorted(self.ops, key=lambda t: (t[0], sorted(t[1])))

    def with_op(self, key, tensor):
        ops = dict(self.ops)
        ops[key] = tensor
        return UniformFamily(self.base, ops, self.field)


class _AllLevels(dict):
    def __init__(self, base):
        super().__init__()
        self.base = base

    def __getitem__(self, w):
        return self.base

    def __contains__(self, w):
        return True


def family_system(fam: OperationFamily, lo: int, hi: int) -> DirectedSystem:
    """Levels with differential m^{1,{}} and continuations m^{1,{1}}."""
    F = fam.field
    levels = {}
    for w in range(lo, hi + 1):
        degs = fam.level_degrees(w)
        bydeg: Dict[int, List[int]] = {}
        for i, d in enumerate(degs):
            bydeg.setdefault(d, []).append(i)
        pos = {i: (d, bydeg[d].index(i)) for i, d in enumerate(degs)}
        T = fam.lookup(1, frozenset(), (w, w))
        rows: Dict[int, Dict[Tuple, Dict]] = {}
        diffs = {}
        for (i,), outs in T.items():
            d, c = pos[i]
            for o, v in outs.items():
                d2, r = pos[o]
                diffs.setdefault(d, {}).setdefault(r, {})[c] = v
        spaces = {d: len(ix) for d, ix in bydeg.items()}
        mats = {d: SparseMatrix(spaces.get(d + 1, 0), spaces[d], F, rows)
                for d, rows in diffs.items()}
        C = GradedComplex(spaces, mats, F)
        C.basis_index = pos
        C.global_index = {v: i for i, v in pos.items()}
        levels[w] = C
    maps = {}
    for w in range(lo, hi):
        T = fam.lookup(1, frozenset({1}), (w + 1, w))
        src, tgt = levels[w], levels[w + 1]
        blocks: Dict[int, Dict] = {}
        for (i,), outs in T.items():
            d, c = src.basis_index[i]
            for o, v in outs.items():
                _, r = tgt.basis_index[o]
                blocks.setdefault(d, {}).setdefault(r, {})[c] = v
        mats = {d: SparseMatrix(tgt.dim(d), src.dim(d), F, rows) for d, rows in blocks.items()}
        maps[w] = ChainMap(src, tgt, mats, name=f"c{w}")
    return DirectedSystem(levels, maps)


# ---------------------------------------------------------------- assembly

def element_degree(fam: OperationFamily, lab) -> int:
    part, w, i = lab
    return fam.degree(w, i) - (1 if part == "B" else 0)


def _add(acc: Element, lab, v, norm):
    nv = norm(acc.get(lab, 0) + v)
    if nv == 0:
        acc.pop(lab, None)
    else:
        acc[lab] = nv


# Terms of the sign exponents.  ``dropped_sign_terms`` lets tests remove one
# of them to confirm that the verifier notices.
SIGN_TERMS = ("position", "flavor", "flag", "q", "koszul")
_DROPPED: set = set()


@contextlib.contextmanager
def dropped_sign_terms(*names):
    bad = set(names) - set(SIGN_TERMS)
    if bad:
        raise ValueError(f"unknown sign terms {sorted(bad)}")
    old = set(_DROPPED)
    _DROPPED.update(names)
    try:
        yield
    finally:
        _DROPPED.clear()
        _DROPPED.update(old)


def _term(name, e):
    return 0 if name in _DROPPED else e


def _mu_A_basis(fam, k, F, ws, ixs, degs):
    """Signed mu_A^{k,F} on basis inputs; returns (w0, {out: coeff})."""
    w0 = sum(ws) + len(F)
    T = fam.lookup(k, F, (w0,) + tuple(ws))
    outs = T.get(tuple(ixs))
    if not outs:
        return w0, {}
    e = _term("position", sum((j + 1) * degs[j] for j in range(k)))
    for j in F:
        e += _term("flavor", sum(degs[m] - 1 for m in range(j, k)))  # inputs m+1 > j
    s = _sign(e)
    return w0, {o: s * v for o, v in outs.items()}


def mu_basis_terms(fam: OperationFamily, labs: Sequence[Tuple[str, int, int]]):
    """Contributions of mu-check^k on one tuple of basis inputs.

    Yields (part, f, label, coeff): part "A" or "B"; f is None for the A part
    and the flagged input whose q was removed for each B summand.  For k = 1
    the A part also carries the term (-1)^{|bq|} b coming from q itself.
    """
    k = len(labs)
    F = frozenset(j + 1 for j, l in enumerate(labs) if l[0] == "B")
    ws = [l[1] for l in labs]
    ixs = [l[2] for l in labs]
    cf = [fam.degree(l[1], l[2]) for l in labs]      # degrees without q
    rf = [cf[j] - (1 if labs[j][0] == "B" else 0) for j in range(k)]  # degrees in RFC
    w0, outs = _mu_A_basis(fam, k, F, ws, ixs, cf)
    for o, v in outs.items():
        yield ("A", None, ("A", w0, o), v)
    if k == 1 and labs[0][0] == "B":
        yield ("A", None, ("A", ws[0], ixs[0]), _sign(_term("q", rf[0])))
    for f in sorted(F):
        ef = _term("flag", sum(rf[l] - 1 for l in range(f, k)))     # inputs l > f
        w0f, outs = _mu_A_basis(fam, k, F - {f}, ws, ixs, cf)
        s = _sign(ef)
        for o, v in outs.items():
            yield ("B", f, ("B", w0f, o), s * v)


def _expand(x: Element):
    return sorted(x.items())


def assemble_mu(k: int, ops: OperationFamily, inputs: Sequence[Element],
                part: Optional[str] = None, only_f: Optional[int] = "any") -> Element:
    """mu-check^k(x_k, ..., x_1) with ``inputs = (x_1, ..., x_k)``.

    ``part`` restricts to the A or the B part; ``only_f`` (with part="B")
    keeps the summand where the q of input f was removed.
    """
    if len(inputs) != k:
        raise ValueError(f"expected {k} inputs, got {len(inputs)}")
    norm = ops.field.norm
    acc: Element = {}
    for combo in itertools.product(*[_expand(x) for x in inputs]):
        labs = [c[0] for c in combo]
        coef = 1
        for c in combo:
            coef = coef * c[1]
        for p, f, lab, v in mu_basis_terms(ops, labs):
            if part is not None and p != part:
                continue
            if only_f != "any" and f != only_f:
                continue
            _add(acc, lab, coef * v, norm)
    return acc


def pr(x: Element, part: str, w0: int, window: Optional[Tuple[int, int]] = None) -> Dict[int, object]:
    if window is not None:
        lo, hi = window
        ok = (lo + 1 <= w0 <= hi) if part == "A" else (lo <= w0 <= hi - 1)
        if not ok:
            raise IndexOutOfWindow(f"pr_{part}({w0}) outside window {window}")
    return {lab[2]: v for lab, v in sorted(x.items()) if lab[0] == part and lab[1] == w0}


def pr_A(x: Element, w0: int, window=None):
    """pr_{A,w0}((a_w) + (b_w) q) = a_{w0}"""
    return pr(x, "A", w0, window)


def pr_B(x: Element, w0: int, window=None):
    """pr_{B,w0}((a_w) + (b_w) q) = b_{w0}"""
    return pr(x, "B", w0, window)


def in_window(lab, window) -> bool:
    lo, hi = window
    part, w, _ = lab
    return (lo + 1 <= w <= hi) if part == "A" else (lo <= w <= hi - 1)


def ab_labels(fam: OperationFamily, window: Tuple[int, int]) -> Dict[int, List]:
    lo, hi = window
    out: Dict[int, List] = {}
    for w in range(lo, hi + 1):
        for i, d in enumerate(fam.level_degrees(w)):
            if lo + 1 <= w:
                out.setdefault(d, []).append(("A", w, i))
            if w <= hi - 1:
                out.setdefault(d - 1, []).append(("B", w, i))
    return {k: sorted(v) for k, v in out.items()}


def ab_complex(fam: OperationFamily, window: Tuple[int, int]) -> GradedComplex:
    """RFC in A/B coordinates: A at levels lo+1..hi, B at lo..hi-1.

    The differential is mu-check^1 with outputs leaving the window dropped.
    """
    labels = ab_labels(fam, window)
    spaces = {k: len(v) for k, v in labels.items()}
    pos = {k: {l: j for j, l in enumerate(v)} for k, v in labels.items()}
    diffs = {}
    for k, labs in labels.items():
        rows: Dict[int, Dict[int, object]] = {}
        tgt = pos.get(k + 1, {})
        for c, lab in enumerate(labs):
            out = assemble_mu(1, fam, [{lab: fam.field.one}])
            for l2, v in out.items():
                if in_window(l2, window):
                    rows.setdefault(tgt[l2], {})[c] = v
        diffs[k] = SparseMatrix(spaces.get(k + 1, 0), spaces[k], fam.field, rows)
    C = GradedComplex(spaces, diffs, fam.field, labels)
    C.window = tuple(window)
    return C


# ---------------------------------------------------------------- A-infinity

def _homogeneous_degree(fam, x: Element) -> int:
    degs = {element_degree(fam, lab) for lab in x}
    if len(degs) > 1:
        raise ValueError("inputs must be homogeneous")
    return degs.pop() if degs else 0


def _flags(x: Element) -> FrozenSet[str]:
    return frozenset(lab[0] for lab in x)


def ainfinity_contributions(fam: OperationFamily, xs: Sequence[Element]):
    """Per-term contributions (i, j, F1) to the A-infinity expression.

    Inputs must be homogeneous and each purely A or purely B, so that the
    flavor F of the tuple is defined.  The sum runs over the index set of
    ``popsicle.ainfinity_terms``; F1 is the flavor consumed by the inner
    operation, and a leftover flagged input f puts q on its output.
    """
    k = len(xs)
    degs = [_homogeneous_degree(fam, x) for x in xs]
    F = set()
    for j, x in enumerate(xs):
        fl = _flags(x)
        if len(fl) > 1:
            raise ValueError("inputs must be purely A or purely B")
        if fl == {"B"}:
            F.add(j + 1)
    out = []
    for t in ainfinity_terms(k, frozenset(F)):
        i, j, F1 = t.i, t.j, t.F1
        inner_F = F & set(range(i + 1, j + 1))
        rest = inner_F - F1
        inner_in = list(xs[i:j])
        if rest:
            (f,) = rest
            inner = assemble_mu(j - i, fam, inner_in, part="B", only_f=f - i)
        else:
            inner = assemble_mu(j - i, fam, inner_in, part="A")
        sgn = _sign(_term("koszul", sum(d - 1 for d in degs[:i])))
        if not inner:
            out.append((t, {}))
            continue
        outer_in = list(xs[:i]) + [inner] + list(xs[j:])
        val = assemble_mu(k - (j - i) + 1, fam, outer_in)
        if sgn < 0:
            val = {l: fam.field.neg(v) for l, v in val.items()}
        out.append((t, val))
    return out


def ainfinity_total(fam, xs) -> Element:
    norm = fam.field.norm
    tot: Element = {}
    for _, val in ainfinity_contributions(fam, xs):
        for l, v in val.items():
            _add(tot, l, v, norm)
    return tot


def verify_ainfinity(ops: OperationFamily, tuples: Iterable[Sequence[Element]]) -> Report:
    """Evaluate the projected A-infinity identities on each tuple.

    For every tuple and every weight a0 where the total has a component,
    pr_{A,a0} and pr_{B,a0} of the total must vanish.  Failures list the
    (i, j, F1) terms contributing at the failing projection.
    """
    rep = Report("A-infinity")
    n = 0
    for xs in tuples:
        n += 1
        contribs = ainfinity_contributions(ops, xs)
        norm = ops.field.norm
        tot: Element = {}
        for _, val in contribs:
            for l, v in val.items():
                _add(tot, l, v, norm)
        if not tot:
            continue
        for part, a0 in sorted({(l[0], l[1]) for l in tot}):
            offending = []
            for t, val in contribs:
                if any(l[0] == part and l[1] == a0 for l in val):
                    offending.append({"i": t.i, "j": t.j, "F1": sorted(t.F1)})
            rep.add(False, tuple=[sorted(map(list, x)) for x in xs], projection=part, a0=a0,
                    terms=offending)
    if rep.passed:
        rep.add(True, tuples=n)
    return rep


def basis_tuples(fam: OperationFamily, k: int, weights: Sequence[int], parts=("A", "B")):
    """All k-tuples of basis elements with weights from ``weights``."""
    singles = []
    for w in weights:
        for i in range(len(fam.level_degrees(w))):
            for p in parts:
                singles.append({(p, w, i): fam.field.one})
    return itertools.product(singles, repeat=k)


# ---------------------------------------------------------------- the q-derivative

def partial_q(fam: OperationFamily, tensor: List[Tuple[object, Tuple]]):
    """d_q on a tensor  sum coeff * (c^1, ..., c^k)  of basis labels.

    d_q(c^k ... c^1) = sum_i (-1)^{sum_{j>i}(deg c^j - 1)} c^k ... d_q(c^i) ... c^1
    with d_q(b q) = b and d_q(a) = 0.
    """
    norm = fam.field.norm
    acc: Dict[Tuple, object] = {}
    for coeff, labs in tensor:
        degs = [element_degree(fam, l) for l in labs]
        for i, l in enumerate(labs):
            if l[0] != "B":
                continue
            s = _sign(sum(d - 1 for d in degs[i + 1:]))
            new = tuple(labs[:i]) + (("A", l[1], l[2]),) + tuple(labs[i + 1:])
            v = norm(acc.get(new, 0) + s * coeff)
            if v == 0:
                acc.pop(new, None)
            else:
                acc[new] = v
    return [(v, labs) for labs, v in sorted(acc.items())]


def check_trivial_identity(fam: OperationFamily, labs: Sequence) -> bool:
    """mu-check_B^k(c) = mu-check_A^k(d_q c) on a basis tuple with k >= 2."""
    k = len(labs)
    one = fam.field.one
    lhs = assemble_mu(k, fam, [{l: one} for l in labs], part="B")
    rhs: Element = {}
    for coeff, new in partial_q(fam, [(one, tuple(labs))]):
        val = assemble_mu(k, fam, [{l: one} for l in new], part="A")
        for l, v in val.items():
            _add(rhs, ("B",) + l[1:], coeff * v, fam.field.norm)
    return lhs == rhs


# ---------------------------------------------------------------- JSON

def _key_str(k, F, w=None) -> str:
    s = f"{k}/{','.join(map(str, sorted(F)))}"
    return s if w is None else s + "/" + ",".join(map(str, w))


def _parse_key(s: str):
    parts = s.split("/")
    if len(parts) not in (2, 3):
        raise ValueError(f"operation key {s!r} is not of the form k/F or k/F/w")
    k = int(parts[0])
    F = tuple(int(x) for x in parts[1].split(",") if x.strip())
    w = tuple(int(x) for x in parts[2].split(",")) if len(parts) == 3 else None
    return k, F, w


def _tensor_json(T, field):
    return [[list(ix), o, field.to_str(v)] for ix, outs in sorted(T.items()) for o, v in sorted(outs.items())]


def _tensor_from(entries, field):
    T: Tensor = {}
    for ix, o, v in entries:
        T.setdefault(tuple(ix), {})[int(o)] = field(v) if isinstance(v, str) else field.norm(v)
    return T


def family_to_json(fam: OperationFamily) -> dict:
    F = fam.field
    if fam.uniform:
        return {"uniform": True, "degrees": list(fam.base),
                "ops": {_key_str(k, Fl): _tensor_json(T, F) for (k, Fl), T in sorted(
                    fam.ops.items(), key=lambda t: (t[0][0], sorted(t[0][1])))}}
    return {"uniform": False, "weight_range": list(fam.weight_range),
            "levels": {str(w): d for w, d in sorted(fam.levels.items())},
            "ops": {_key_str(k, Fl, w): _tensor_json(T, F) for (k, Fl, w), T in sorted(
                fam.ops.items(), key=lambda t: (t[0][0], sorted(t[0][1]), t[0][2]))}}


def family_from_json(obj: dict, field: Field = QQ) -> OperationFamily:
    ops = {}
    for key, entries in obj.get("ops", {}).items():
        k, F, w = _parse_key(key)
        T = _tensor_from(entries, field)
        if obj.get("uniform", False):
            ops[(k, F)] = T
        else:
            if w is None:
                raise ValueError(f"operation key {key!r} needs weights")
            ops[(k, F, w)] = T
    if obj.get("uniform", False):
        return UniformFamily(obj["degrees"], ops, field)
    return OperationFamily({int(w): d for w, d in obj["levels"].items()}, ops,
                           tuple(obj["weight_range"]), field)


def dg_family(lam=1, field: Field = QQ) -> UniformFamily:
    """Lambda[e] (x) K[y]/y^2 with |e| = -1, |y| = 0, de = y; continuations lam * id.

    Basis 1, e, y, ey in degrees 0, -1, 0, -1.
    """
    mul = {(0, j): {j: 1} for j in range(4)}
    mul.update({(j, 0): {j: 1} for j in range(1, 4)})
    mul.update({(1, 2): {3: 1}, (2, 1): {3: 1}})
    ops = {(1, ()): {(1,): {2: 1}}, (2, ()): mul}
    if lam:
        ops[(1, (1,))] = {(j,): {j: lam} for j in range(4)}
    return UniformFamily([0, -1, 0, -1], ops, field)


def all_tuples(fam: OperationFamily, k_max: int, weights: Sequence[int]):
    out = []
    for k in range(1, k_max + 1):
        out.extend(basis_tuples(fam, k, weights))
    return out
