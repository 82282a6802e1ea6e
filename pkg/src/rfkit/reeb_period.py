"""Radial Hamiltonian profiles, chord radii and index bookkeeping.

A profile is h on [1, r_nu] given by quadratic pieces c0 + c1 r + c2 r^2
(c2 > 0, joined C^1), extended linearly with slope nu = h'(r_nu) beyond.
The action of a chord at radius r is A(r) = -r h'(r) + h(r), strictly
decreasing on the convex part since A' = -r h''.

Rotation blocks t -> R(2 pi theta(t)) with theta piecewise linear carry a
Robbin-Salamon index computed from crossings theta(t) in Z: signature 2
sign(theta') at interior crossings and half of that at the ends of each
linear segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from .graded_complex import Report

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class NonIsolatedCrossing(ValueError):
    pass


class ZeroMaslov(ValueError):
    pass


class InvalidProfile(ValueError):
    pass


def Q(x) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    c: Tuple[Fraction, Fraction, Fraction]

    def h(self, r):
        c0, c1, c2 = self.c
        return c0 + c1 * r + c2 * r * r

    def dh(self, r):
        return self.c[1] + 2 * self.c[2] * r


class HamiltonianProfile:
    """Convex piecewise-quadratic profile on [1, r_nu], linear beyond."""

    def __init__(self, breakpoints: Sequence, coefficients: Sequence[Sequence]):
        br = [Q(b) for b in breakpoints]
        if len(br) < 2 or br[0] != 1:
            raise InvalidProfile("breakpoints must start at 1 and have at least two entries")
        if any(a >= b for a, b in zip(br, br[1:])):
            raise InvalidProfile("breakpoints must increase")
        if len(coefficients) != len(br) - 1:
            raise InvalidProfile("need one coefficient triple per interval")
        self.pieces = [Piece(a, b, tuple(Q(x) for x in cs)) for a, b, cs in
                       zip(br, br[1:], coefficients)]
        for p in self.pieces:
            if len(p.c) != 3:
                raise InvalidProfile("coefficients are (c0, c1, c2)")
            if p.c[2] <= 0:
                raise InvalidProfile(f"h'' = {2 * p.c[2]} is not positive on [{p.lo}, {p.hi}]")
        for p, q in zip(self.pieces, self.pieces[1:]):
            if p.h(p.hi) != q.h(q.lo) or p.dh(p.hi) != q.dh(q.lo):
                raise InvalidProfile(f"pieces do not join C^1 at r = {p.hi}")
        if self.pieces[0].dh(1) < 0:
            raise InvalidProfile("h'(1) < 0")
        self.r_nu = br[-1]
        self.nu = self.pieces[-1].dh(self.r_nu)

    @classmethod
    def from_toml(cls, text: str) -> "HamiltonianProfile":
        data = tomllib.loads(text)
        prof = data.get("profile", data)
        return cls(prof["breakpoints"], prof["coefficients"])

    def to_dict(self) -> dict:
        return {"breakpoints": [str(p.lo) for p in self.pieces] + [str(self.r_nu)],
                "coefficients": [[str(x) for x in p.c] for p in self.pieces],
                "slope": str(self.nu)}

    def _piece(self, r) -> Optional[Piece]:
        for p in self.pieces:
            if p.lo <= r <= p.hi:
                return p
        return None

    def h(self, r) -> Fraction:
        r = Q(r)
        if r < 1:
            raise ValueError("profiles live on r >= 1")
        if r > self.r_nu:
            return self.pieces[-1].h(self.r_nu) + self.nu * (r - self.r_nu)
        return self._piece(r).h(r)

    def dh(self, r) -> Fraction:
        r = Q(r)
        if r < 1:
            raise ValueError("profiles live on r >= 1")
        if r > self.r_nu:
            return self.nu
        return self._piece(r).dh(r)

    def agrees_below(self, other: "HamiltonianProfile", r0) -> bool:
        """h = other.h on [1, r0] (compared as polynomials on each common interval)."""
        cuts = sorted({Fraction(1), Q(r0)} | {p.lo for p in self.pieces + other.pieces
                                              if p.lo < r0} |
                      {p.hi for p in self.pieces + other.pieces if p.hi < r0})
        for a, b in zip(cuts, cuts[1:]):
            if b > self.r_nu or b > other.r_nu:
                return False
            m = (a + b) / 2
            p, q = self._piece(m), other._piece(m)
            if p.c != q.c:
                return False
        return True


def load_periods(text: str) -> List[Fraction]:
    """``periods = [...]`` from TOML, entries as rationals or strings like "3/2"."""
    data = tomllib.loads(text)
    if "periods" not in data:
        raise ValueError("missing key 'periods'")
    return sorted({Q(x) for x in data["periods"]})


def action_at(p: HamiltonianProfile, r) -> Fraction:
    """A(r) = -r h'(r) + h(r)."""
    r = Q(r)
    return -r * p.dh(r) + p.h(r)


def chord_radii(p: HamiltonianProfile, spec: Iterable) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """(r, T, A(r)) for each period T < nu, with r the unique solution of h'(r) = T."""
    out = []
    for T in sorted({Q(t) for t in spec}):
        if T <= 0:
            raise ValueError("periods must be positive")
        if T >= p.nu:
            continue
        for piece in p.pieces:
            r = (T - piece.c[1]) / (2 * piece.c[2])
            if piece.lo <= r <= piece.hi:
                out.append((r, T, action_at(p, r)))
                break
    return out


def good_pair_check(pm: HamiltonianProfile, pn: HamiltonianProfile,
                    spec: Iterable = ()) -> Tuple[bool, Report]:
    """Good pair: r_nu > r_mu and equal profiles below r_mu.

    When good, the chords of both profiles with action above A_mu(r_mu)
    are compared: same radii, periods and actions.
    """
    rep = Report("good pair")
    good = pn.r_nu > pm.r_nu and pn.agrees_below(pm, pm.r_nu)
    rep.add(pn.r_nu > pm.r_nu, condition="radius", r_mu=str(pm.r_nu), r_nu=str(pn.r_nu))
    rep.add(pn.agrees_below(pm, pm.r_nu), condition="agree_below")
    if not good:
        return False, rep
    spec = list(spec)
    floor = action_at(pm, pm.r_nu)
    cm = [c for c in chord_radii(pm, spec) if c[2] > floor]
    cn = [c for c in chord_radii(pn, spec) if c[2] > floor]
    rep.add(cm == cn, condition="window_chords", action_floor=str(floor),
            mu_chords=[[str(x) for x in c] for c in cm], nu_chords=[[str(x) for x in c] for c in cn])
    return rep.passed, rep


# ---------------------------------------------------------------- index

@dataclass(frozen=True)
class RotationBlock:
    """theta(t) piecewise linear through the points (t_i, theta_i), t_0 = 0 < ... < t_m = 1."""
    points: Tuple[Tuple[Fraction, Fraction], ...]

    @classmethod
    def linear(cls, a, b) -> "RotationBlock":
        return cls(((Fraction(0), Q(a)), (Fraction(1), Q(b))))

    @classmethod
    def constant(cls, a) -> "RotationBlock":
        return cls.linear(a, a)

    def then(self, other: "RotationBlock") -> "RotationBlock":
        """Concatenation, both halves reparametrized to [0, 1/2] and [1/2, 1]."""
        if self.points[-1][1] != other.points[0][1]:
            raise ValueError("paths do not match at the junction")
        half = Fraction(1, 2)
        pts = [(t * half, th) for t, th in self.points]
        pts += [(half + t * half, th) for t, th in other.points[1:]]
        return RotationBlock(tuple(pts))


@dataclass(frozen=True)
class HyperbolicBlock:
    """Constant diag(l, 1/l) with l > 0, l != 1: no eigenvalue 1, index 0."""
    l: Fraction

    def __post_init__(self):
        if self.l <= 0 or self.l == 1:
            raise ValueError("hyperbolic block needs l > 0, l != 1")


def _segment_doubled(a: Fraction, b: Fraction) -> int:
    """Twice the index of a linear rotation segment from theta = a to b."""
    if a == b:
        if a.denominator == 1:
            raise NonIsolatedCrossing(f"theta stays at the integer {a}")
        return 0
    s = 1 if b > a else -1
    lo, hi = min(a, b), max(a, b)
    interior = max(0, math.ceil(hi) - math.floor(lo) - 1)
    ends = (lo.denominator == 1) + (hi.denominator == 1)
    return s * (4 * interior + 2 * ends)


def rs_index_doubled(blocks: Sequence) -> int:
    tot = 0
    for blk in blocks:
        if isinstance(blk, HyperbolicBlock):
            continue
        for (_, a), (_, b) in zip(blk.points, blk.points[1:]):
            tot += _segment_doubled(Q(a), Q(b))
    return tot


def rs_index(blocks: Sequence) -> Fraction:
    """Robbin-Salamon index of a direct sum of 2x2 blocks."""
    return Fraction(rs_index_doubled(blocks), 2)


# ---------------------------------------------------------------- degree windows

def degree_windows(mu: int, A: int, B: int, d: int) -> Set[int]:
    """All m >= 2 with A - (m-2) mu <= d <= B - (m-2) mu."""
    if mu == 0:
        raise ZeroMaslov("the Maslov index of the Reeb loop must be nonzero")
    if A > B:
        return set()
    if mu > 0:
        lo, hi = math.ceil(Fraction(A - d, mu)), math.floor(Fraction(B - d, mu))
    else:
        lo, hi = math.ceil(Fraction(B - d, mu)), math.floor(Fraction(A - d, mu))
    return {j + 2 for j in range(max(lo, 0), hi + 1)}


def window_bound(mu: int, A: int, B: int) -> int:
    return (B - A) // abs(mu) + 1


def periodic_family(p: HamiltonianProfile, T, T0, degree: int, mu: int, m_max: int):
    """Chords obtained by adding m loops of period T0: slope T + m T0, degree - m mu."""
    out = []
    for m in range(m_max + 1):
        slope = Q(T) + m * Q(T0)
        hit = chord_radii(p, [slope])
        if not hit:
            break
        r, _, a = hit[0]
        out.append({"m": m, "slope": slope, "radius": r, "action": a, "degree": degree - m * mu})
    return out
