"""Ginzburg dg algebra of a tree quiver and its graded pieces e_w G e_v.

Generators of the doubled quiver: an arrow a: s -> t of degree 0, its
reverse a*: t -> s of degree 2 - n, and a loop t_v of degree 1 - n at each
vertex.  Paths are written in product order, so the leftmost generator is
applied last (b a means a then b).  The differential kills a and a* and
sends
    d t_v = sum_{s(a) = v} a* a  -  sum_{t(b) = v} b b*,
extended by the Leibniz rule with sign (-1)^(degree of everything to the
left).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .exact_linalg import QQ, Field, Reducer, SparseMatrix, solve
from .graded_complex import GradedComplex, Report, cohomology

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class NotATree(ValueError):
    pass


class DimensionTooSmall(ValueError):
    pass


Gen = Tuple[str, object]            # ("a", i), ("s", i) for a_i*, ("t", v)
Path = Tuple[str, Tuple[Gen, ...]]  # (start vertex, generators in product order)


@dataclass(frozen=True)
class TreeQuiver:
    vertices: Tuple[str, ...]
    arrows: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise NotATree("repeated vertex")
        for s, t in self.arrows:
            if s not in vs or t not in vs:
                raise NotATree(f"arrow {s}->{t} uses an unknown vertex")
            if s == t:
                raise NotATree(f"loop at {s}")
        if len(self.arrows) != len(self.vertices) - 1:
            raise NotATree(f"{len(self.arrows)} arrows on {len(self.vertices)} vertices")
        if self.vertices and len(_component(self.vertices[0], self.arrows)) != len(vs):
            raise NotATree("underlying graph is disconnected")


def _component(v, arrows):
    adj: Dict[str, List[str]] = {}
    for s, t in arrows:
        adj.setdefault(s, []).append(t)
        adj.setdefault(t, []).append(s)
    seen, todo = {v}, [v]
    while todo:
        x = todo.pop()
        for y in adj.get(x, []):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def quiver(vertices: Sequence, arrows: Sequence) -> TreeQuiver:
    return TreeQuiver(tuple(str(v) for v in vertices), tuple((str(s), str(t)) for s, t in arrows))


def path_quiver(m: int) -> TreeQuiver:
    """A_m: 1 -> 2 -> ... -> m."""
    return quiver(range(1, m + 1), [(i, i + 1) for i in range(1, m)])


def star_quiver(leaves: int = 3) -> TreeQuiver:
    """Center 0 with arrows to leaves 1..leaves (the D_4 shape for 3 leaves)."""
    return quiver(range(0, leaves + 1), [(0, i) for i in range(1, leaves + 1)])


def load_quiver(text: str) -> Tuple[TreeQuiver, int]:
    """Parse ``vertices = [...]``, ``arrows = [[s, t], ...]``, ``n = ...`` from TOML."""
    data = tomllib.loads(text)
    try:
        return quiver(data["vertices"], data.get("arrows", [])), int(data["n"])
    except KeyError as e:
        raise ValueError(f"missing key {e.args[0]!r}") from None


class Ginzburg:
    """The dg algebra G_Q with generator degrees (0, 2 - n, 1 - n)."""

    def __init__(self, Q: TreeQuiver, n: int, field: Field = QQ):
        if n < 3:
            raise DimensionTooSmall(f"n = {n} < 3")
        self.Q, self.n, self.field = Q, n, field
        self.gens: Dict[Gen, Tuple[str, str, int]] = {}   # gen -> (source, target, degree)
        for i, (s, t) in enumerate(Q.arrows):
            self.gens[("a", i)] = (s, t, 0)
            self.gens[("s", i)] = (t, s, 2 - n)
        for v in Q.vertices:
            self.gens[("t", v)] = (v, v, 1 - n)
        self._out: Dict[str, List[Gen]] = {v: [] for v in Q.vertices}
        for g, (s, _, _) in self.gens.items():
            self._out[s].append(g)
        for v in self._out:
            self._out[v].sort(key=_gen_key)
        self._cache: Dict[Tuple[str, int], Dict[Tuple[str, int], List[Path]]] = {}
        self.overflow: Dict[Tuple[str, int], int] = {}  # paths longer than the cap (must be 0)

    # ---- generators and paths

    def gen_name(self, g: Gen) -> str:
        kind, x = g
        if kind == "t":
            return f"t{x}"
        s, t = self.Q.arrows[x]
        return f"a{s}{t}" + ("*" if kind == "s" else "")

    def degree(self, p: Path) -> int:
        return sum(self.gens[g][2] for g in p[1])

    def end(self, p: Path) -> str:
        return self.gens[p[1][0]][1] if p[1] else p[0]

    def render(self, p: Path) -> str:
        return ".".join(self.gen_name(g) for g in p[1]) if p[1] else f"e{p[0]}"

    def differential_table(self) -> Dict[str, List[Tuple[int, str]]]:
        out = {}
        for v in self.Q.vertices:
            terms = self.d_gen(("t", v))
            out[self.gen_name(("t", v))] = [(c, ".".join(self.gen_name(g) for g in w))
                                           for w, c in terms]
        return out

    def d_gen(self, g: Gen) -> List[Tuple[Tuple[Gen, ...], int]]:
        if g[0] != "t":
            return []
        v = g[1]
        terms = []
        for i, (s, t) in enumerate(self.Q.arrows):
            if s == v:
                terms.append(((("s", i), ("a", i)), 1))
            if t == v:
                terms.append(((("a", i), ("s", i)), -1))
        return terms

    def d(self, p: Path) -> Dict[Path, object]:
        out: Dict[Path, object] = {}
        left = 0
        for r, g in enumerate(p[1]):
            for word, c in self.d_gen(g):
                q = (p[0], p[1][:r] + word + p[1][r + 1:])
                v = self.field.norm(out.get(q, 0) + (-1) ** (left % 2) * c)
                if v:
                    out[q] = v
                else:
                    out.pop(q, None)
            left += self.gens[g][2]
        return out

    def multiply(self, p: Path, q: Path) -> Optional[Path]:
        """p q (q first); None when the endpoints do not match."""
        if self.end(q) != p[0]:
            return None
        return (q[0], p[1] + q[1])

    def _times(self, x: Dict[Path, object], y: Dict[Path, object]) -> Dict[Path, object]:
        out: Dict[Path, object] = {}
        for p, a in x.items():
            for q, b in y.items():
                r = self.multiply(p, q)
                if r is not None:
                    v = self.field.norm(out.get(r, 0) + a * b)
                    if v:
                        out[r] = v
                    else:
                        out.pop(r, None)
        return out

    def leibniz_holds(self, p: Path, q: Path) -> bool:
        """d(pq) = d(p) q + (-1)^{deg p} p d(q) for composable p, q."""
        pq = self.multiply(p, q)
        if pq is None:
            return True
        lhs = self.d(pq)
        rhs = self._times(self.d(p), {q: self.field.one})
        s = -1 if self.degree(p) % 2 else 1
        for r, v in self._times({p: self.field.one}, self.d(q)).items():
            nv = self.field.norm(rhs.get(r, 0) + s * v)
            if nv:
                rhs[r] = nv
            else:
                rhs.pop(r, None)
        return lhs == rhs

    def length_cap(self, D: int) -> int:
        """Longest path of degree >= D (every negative generator costs >= n - 2)."""
        neg = math.ceil(abs(min(D, 0)) / (self.n - 2))
        return (neg + 1) * (len(self.Q.vertices) - 1) + neg

    def _from(self, v: str, D: int) -> Dict[Tuple[str, int], List[Path]]:
        """All paths out of v with degree >= D, bucketed by (end, degree)."""
        for (u, D2), table in self._cache.items():
            if u == v and D2 <= D:
                return table
        cap = self.length_cap(D)
        table: Dict[Tuple[str, int], List[Path]] = {}
        overflow = 0
        stack = [(v, (), 0)]
        while stack:
            cur, word, deg = stack.pop()
            table.setdefault((cur, deg), []).append((v, word))
            for g in self._out[cur]:
                nd = deg + self.gens[g][2]
                if nd >= D:
                    if len(word) >= cap:
                        overflow += 1
                    else:
                        stack.append((self.gens[g][1], (g,) + word, nd))
        self.overflow[(v, D)] = overflow
        for b in table.values():
            b.sort(key=lambda p: (len(p[1]), [_gen_key(g) for g in p[1]]))
        self._cache[(v, D)] = table
        return table

    def enumerate_paths(self, v: str, w: str, d: int) -> List[Path]:
        """All paths v -> w of degree d, sorted; empty for d > 0."""
        if d > 0:
            return []
        return list(self._from(v, d).get((w, d), []))

    def block_key(self, p: Path) -> Tuple[int, int]:
        """(#a + #t, #a* + #t): preserved by d, so e_w G e_v splits along it."""
        na = ns = nt = 0
        for g in p[1]:
            if g[0] == "a":
                na += 1
            elif g[0] == "s":
                ns += 1
            else:
                nt += 1
        return na + nt, ns + nt

    # ---- complexes

    def piece(self, v: str, w: str, window: Tuple[int, int]) -> GradedComplex:
        """e_w G e_v on degrees D-1..hi; cohomology is exact on D..hi."""
        D, hi = window
        degs = list(range(D - 1, min(hi, 0) + 1))
        bases = {k: self.enumerate_paths(v, w, k) for k in degs}
        spaces = {k: len(b) for k, b in bases.items()}
        diffs = {}
        for k in degs[:-1]:
            pos = {p: i for i, p in enumerate(bases[k + 1])}
            rows: Dict[int, Dict[int, object]] = {}
            for c, p in enumerate(bases[k]):
                for q, x in self.d(p).items():
                    rows.setdefault(pos[q], {})[c] = x
            diffs[k] = SparseMatrix(spaces[k + 1], spaces[k], self.field, rows)
        C = GradedComplex(spaces, diffs, self.field,
                          labels={k: [self.render(p) for p in b] for k, b in bases.items()})
        C.paths = bases
        return C

    def _block_rank(self, v: str, w: str, k: int) -> int:
        """Rank of d: degree k -> k+1 on e_w G e_v, summed over blocks."""
        if k >= 0:
            return 0
        src = self.enumerate_paths(v, w, k)
        blocks: Dict[Tuple[int, int], List[Path]] = {}
        for p in src:
            blocks.setdefault(self.block_key(p), []).append(p)
        total = 0
        for ps in blocks.values():
            red = Reducer(self.field, track=False)
            col: Dict[Path, int] = {}
            for p in ps:
                red.add({col.setdefault(q, len(col)): x for q, x in self.d(p).items()})
            total += red.rank
        return total

    def hom_dims(self, v: str, w: str, window: Tuple[int, int]) -> Dict[int, int]:
        D, hi = window
        out = {}
        for k in range(D, hi + 1):
            n_k = len(self.enumerate_paths(v, w, k))
            out[k] = n_k - self._block_rank(v, w, k) - self._block_rank(v, w, k - 1) if n_k else 0
        return out

    def shortest_path(self, v: str, w: str) -> Path:
        """The unique reduced path v -> w in the tree, using a or a* per edge."""
        prev: Dict[str, Tuple[str, Gen]] = {}
        seen, todo = {v}, deque([v])
        while todo:
            x = todo.popleft()
            for g in self._out[x]:
                if g[0] == "t":
                    continue
                y = self.gens[g][1]
                if y not in seen:
                    seen.add(y)
                    prev[y] = (x, g)
                    todo.append(y)
        word: Tuple[Gen, ...] = ()
        x = w
        while x != v:
            x, g = prev[x]
            word = word + (g,)
        return (v, word)

    def certify_shortest(self, v: str, w: str) -> dict:
        """The shortest path is a cocycle and not a coboundary."""
        p = self.shortest_path(v, w)
        k = self.degree(p)
        C = self.piece(v, w, (k, k))
        idx = C.paths[k].index(p)
        cocycle = not self.d(p)
        vec = {idx: self.field.one}
        exact = solve(C.d(k - 1), vec) is not None
        return {"path": self.render(p), "degree": k, "cocycle": cocycle,
                "coboundary": exact, "nonzero": cocycle and not exact}


def _gen_key(g: Gen):
    return (g[0], str(g[1]))


def build_ginzburg(Q: TreeQuiver, n: int, field: Field = QQ) -> Ginzburg:
    return Ginzburg(Q, n, field)


def dimension_table(G: Ginzburg, window: Tuple[int, int]) -> List[dict]:
    rows = []
    for v in G.Q.vertices:
        for w in G.Q.vertices:
            C = G.piece(v, w, window)
            for k in range(window[0], min(window[1], 0) + 1):
                rows.append({"source": v, "target": w, "degree": k,
                             "chain_dim": C.dim(k), "hom_dim": cohomology(C, k)[0]})
    return rows


def condition3_report(Q: TreeQuiver, n: int, window: Tuple[int, int], field: Field = QQ) -> Report:
    """Finite Hom in every degree, H^0(e_v G e_v) = 1, nonzero shortest-path classes.

    Finiteness is witnessed by the path counts together with the fact that
    no path of degree >= D exceeds the length cap.
    """
    G = Ginzburg(Q, n, field)
    rep = Report("condition 3")
    D, hi = window
    adj = {frozenset(a) for a in Q.arrows}
    for v in Q.vertices:
        G._from(v, D)
        for w in Q.vertices:
            counts = {k: len(G.enumerate_paths(v, w, k)) for k in range(D, hi + 1)}
            rep.add(G.overflow[(v, D)] == 0, check="finite", source=v, target=w,
                    chain_dims={str(k): c for k, c in sorted(counts.items())},
                    cap=G.length_cap(D), overflow=G.overflow[(v, D)])
            if v == w and D <= 0 <= hi:
                h0 = G.hom_dims(v, v, (0, 0))[0]
                rep.add(h0 == 1, check="H0", vertex=v, dim=h0)
            cert = G.certify_shortest(v, w)
            rep.add(cert["nonzero"], check="shortest_path", source=v, target=w, **cert)
            if frozenset((v, w)) in adj:
                rep.add(cert["nonzero"], check="adjacent_nonzero", source=v, target=w,
                        witness=cert["path"], degree=cert["degree"])
    return rep
