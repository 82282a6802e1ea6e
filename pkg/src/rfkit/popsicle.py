"""Popsicle combinatorics: dimensions, broken types and codimension-one strata.

A popsicle type is (k, F, w): k inputs, a flavor set F of inputs carrying
a sprinkle, and weights.  Broken types are planar rooted trees whose
leaves are the inputs 1..k, each vertex v carrying the sprinkles F_v that
sit on it.  A vertex is stable when val(v) + |F_v| >= 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

STAR = "*"  # label of the new boundary puncture of the outer popsicle


class Unstable(ValueError):
    pass


def _fset(F) -> FrozenSet[int]:
    return frozenset(int(x) for x in (F or ()))


def _check(k: int, F) -> FrozenSet[int]:
    F = _fset(F)
    if k < 1:
        raise Unstable(f"k={k} < 1")
    if not F <= set(range(1, k + 1)):
        raise ValueError(f"flavor {sorted(F)} not inside 1..{k}")
    if k + len(F) < 2:
        raise Unstable(f"k + |F| = {k + len(F)} < 2")
    return F


@dataclass(frozen=True)
class PopsicleType:
    k: int
    F: FrozenSet[int]
    w: Tuple[int, ...] = ()

    def __post_init__(self):
        _check(self.k, self.F)
        if self.w:
            if len(self.w) != self.k + 1:
                raise ValueError("weight vector needs k+1 entries (w0, w1, ..., wk)")
            if self.w[0] != sum(self.w[1:]) + len(self.F):
                raise ValueError("weights violate w0 = w1 + ... + wk + |F|")


def moduli_dim(k: int, F=()) -> int:
    """k - 2 + |F| for a stable type."""
    F = _check(k, F)
    return k - 2 + len(F)


# ---------------------------------------------------------------- codim 1

@dataclass(frozen=True)
class Stratum:
    i: int
    j: int
    F1: FrozenSet[int]
    family: int            # 1: flavor injective, 2: Sym-nontrivial (vanishes)
    outer_labels: Tuple    # boundary labels of the outer popsicle {0..i, *, j+1..k}
    outer_flavor: Tuple    # flavor of the outer popsicle in those labels

    def to_dict(self):
        return {"i": self.i, "j": self.j, "F1": sorted(self.F1), "family": self.family,
                "outer_labels": list(self.outer_labels), "outer_flavor": list(self.outer_flavor)}


def _outer(k, i, j, F, F1):
    labels = tuple(range(0, i + 1)) + (STAR,) + tuple(range(j + 1, k + 1))
    inner = set(range(i + 1, j + 1))
    moved = (F & inner) - F1
    flav = tuple(sorted(x for x in F if x not in inner)) + ((STAR,) * len(moved))
    return labels, flav


def enumerate_codim1(k: int, F=()) -> List[Stratum]:
    """Codimension-one strata (i, j, F1) of the compactified moduli space.

    The inner popsicle has the j-i inputs i+1..j and flavor F1; the outer
    one keeps the other inputs plus the new puncture *, which carries the
    sprinkles of (F & {i+1..j}) - F1.  Both vertices must be stable:
      outer: (k - (j-i) + 2) + |F - F1| >= 3,   inner: (j-i) + 1 + |F1| >= 3.
    """
    F = _check(k, F)
    out = []
    for i in range(0, k):
        for j in range(i + 1, k + 1):
            inner = F & set(range(i + 1, j + 1))
            for r in range(len(inner) + 1):
                for F1 in combinations(sorted(inner), r):
                    F1 = frozenset(F1)
                    if k - (j - i) + 2 + len(F - F1) < 3:
                        continue
                    if (j - i) + 1 + len(F1) < 3:
                        continue
                    fam = 1 if len(inner - F1) <= 1 else 2
                    labels, flav = _outer(k, i, j, F, F1)
                    out.append(Stratum(i, j, F1, fam, labels, flav))
    return out


# ---------------------------------------------------------------- A-infinity terms

@dataclass(frozen=True)
class CompositionTerm:
    """Inner operation on inputs i+1..j with flavor F1, fed to an outer one."""
    i: int
    j: int
    F1: FrozenSet[int]
    kinds: Tuple[str, ...]  # subset of ("interior", "output_strip", "input_strip")

    @property
    def inner_arity(self):
        return self.j - self.i

    def outer_arity(self, k):
        return k - (self.j - self.i) + 1

    def to_dict(self):
        return {"i": self.i, "j": self.j, "F1": sorted(self.F1), "kinds": list(self.kinds)}


def ainfinity_terms(k: int, F=()) -> List[CompositionTerm]:
    """Index set of the A-infinity relation for flavor F.

    All (i, j, F1) with at most one sprinkle of the inner range passed to the
    outer operation and no stability requirement, so that the semi-stable
    strip breakings (inner or outer operation of arity one) are included.
    """
    F = _fset(F)
    if k + len(F) < 2 and k != 1:
        raise Unstable(f"k + |F| = {k + len(F)} < 2")
    out = []
    for i in range(0, k):
        for j in range(i + 1, k + 1):
            inner = F & set(range(i + 1, j + 1))
            for r in range(len(inner) + 1):
                for F1 in combinations(sorted(inner), r):
                    F1 = frozenset(F1)
                    if len(inner - F1) > 1:
                        continue
                    kinds = []
                    if j - i == k:
                        kinds.append("output_strip")
                    if j - i == 1:
                        kinds.append("input_strip")
                    if not kinds:
                        kinds.append("interior")
                    out.append(CompositionTerm(i, j, F1, tuple(kinds)))
    return out


# ---------------------------------------------------------------- broken types

@dataclass(frozen=True)
class Node:
    children: Tuple[Union[int, "Node"], ...]
    sprinkles: FrozenSet[int]

    @property
    def valence(self):
        return len(self.children) + 1

    def leaves(self) -> Tuple[int, ...]:
        out = []
        for c in self.children:
            out.extend(c.leaves() if isinstance(c, Node) else (c,))
        return tuple(out)

    def vertices(self) -> List["Node"]:
        out = [self]
        for c in self.children:
            if isinstance(c, Node):
                out.extend(c.vertices())
        return out

    def sym_nontrivial(self) -> bool:
        """Some vertex has two sprinkles entering through the same child."""
        for v in self.vertices():
            seen = set()
            for c in v.children:
                lv = set(c.leaves() if isinstance(c, Node) else (c,))
                hit = lv & v.sprinkles
                if len(hit) > 1:
                    return True
                seen |= hit
        return False

    def render(self) -> str:
        parts = [c.render() if isinstance(c, Node) else str(c) for c in self.children]
        sp = "" if not self.sprinkles else "{" + ",".join(map(str, sorted(self.sprinkles))) + "}"
        return "(" + " ".join(parts) + ")" + sp


def _compositions(n: int):
    """Ordered splittings of range(n) into consecutive nonempty blocks."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield ((0, first),) + tuple((a + first, b + first) for a, b in rest)


def _subsets(s):
    s = sorted(s)
    for r in range(len(s) + 1):
        for c in combinations(s, r):
            yield frozenset(c)


def _trees(leaves: Tuple[int, ...], pending: FrozenSet[int]) -> List[Node]:
    """Stable trees over ``leaves`` whose pending sprinkles sit at or below the root."""
    out = []
    for here in _subsets(pending):
        below = pending - here
        for comp in _compositions(len(leaves)):
            val = len(comp) + 1
            if val + len(here) < 3:
                continue
            options: List[List[Union[int, Node]]] = [[]]
            ok = True
            for a, b in comp:
                block = leaves[a:b]
                sub = below & set(block)
                choices: List[Union[int, Node]] = []
                if len(block) == 1 and not sub:
                    choices.append(block[0])
                if not (len(comp) == 1 and not here and not sub):
                    choices.extend(_trees(block, frozenset(sub)))
                if not choices:
                    ok = False
                    break
                options = [o + [c] for o in options for c in choices]
            if not ok:
                continue
            for o in options:
                out.append(Node(tuple(o), here))
    return out


def enumerate_broken_types(k: int, F=(), codim: Optional[int] = None) -> List[Node]:
    """All stable broken types of R^{k+1,F}; codimension = #vertices - 1."""
    F = _check(k, F)
    trees = _trees(tuple(range(1, k + 1)), F)
    seen, out = set(), []
    for t in trees:
        if t in seen:
            continue
        seen.add(t)
        if codim is None or len(t.vertices()) - 1 == codim:
            out.append(t)
    return out


def stratum_dimension(t: Node) -> int:
    return sum(v.valence - 3 + len(v.sprinkles) for v in t.vertices())


def tree_to_triple(t: Node) -> Tuple[int, int, FrozenSet[int]]:
    """(i, j, F1) of a two-vertex tree."""
    subs = [c for c in t.children if isinstance(c, Node)]
    if len(subs) != 1 or len(t.vertices()) != 2:
        raise ValueError("not a two-vertex tree")
    lv = subs[0].leaves()
    return lv[0] - 1, lv[-1], subs[0].sprinkles


# ---------------------------------------------------------------- census

def census(k: int, F=()) -> dict:
    F = _check(k, F)
    strata = enumerate_codim1(k, F)
    terms = ainfinity_terms(k, F)
    return {
        "k": k,
        "flavor": sorted(F),
        "dimension": moduli_dim(k, F),
        "codim1": [s.to_dict() for s in strata],
        "family1": sum(1 for s in strata if s.family == 1),
        "family2": sum(1 for s in strata if s.family == 2),
        "ainfinity_terms": [t.to_dict() for t in terms],
    }
