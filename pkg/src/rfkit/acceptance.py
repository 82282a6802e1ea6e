"""The acceptance checks, shared by ``rfkit selftest`` and the test suite.

Each ``criterion_*`` takes a seed and returns a Report.  Randomized parts
draw from ``random.Random(seed)`` only, so equal seeds give equal reports.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable, Dict, List, Tuple

from .cy_pairing import (Inconsistent, bifunctoriality_check, chain_pairings, cy_scalar,
                         frobenius_category, frobenius_family, nondegenerate,
                         path_algebra_paths, pairing_setup, scaled_pairing, trace_pairing,
                         trivial_extension, verify_diagram)
from .exact_linalg import QQ, Field, rank
from .ginzburg import Ginzburg, condition3_report, path_quiver, quiver, star_quiver
from .graded_complex import (GradedComplex, Report, cone, homology, identity_map, induced_map,
                             is_acyclic, random_chain_map, random_complex, zero_map)
from .limit_systems import (certify_tower, constant_system, cotelescope, direct_limit_homology,
                            inverse_limit_homology, random_system, telescope)
from .popsicle import ainfinity_terms, enumerate_codim1, moduli_dim
from .rabinowitz import (SIGN_TERMS, all_tuples, ainfinity_contributions, assemble_mu,
                         build_rfc, continuation_rank_bound, dg_family, dropped_sign_terms,
                         rfh_expected_for_zero, verify_ainfinity)
from .reeb_period import (HamiltonianProfile, RotationBlock, ZeroMaslov, action_at,
                          degree_windows, good_pair_check, load_periods, rs_index,
                          window_bound)

DEFAULT_SEED = 7
CORPUS_SIZE = 200
F5 = Field(5)


def fixture_text(name: str) -> str:
    return resources.files("rfkit").joinpath("fixtures").joinpath(name).read_text()


# ---------------------------------------------------------------- corpus

@lru_cache(maxsize=4)
def corpus(seed: int, size: int = CORPUS_SIZE):
    """Random (field, W, n, system on -W..0, system on 1..W, c01) instances."""
    rng = random.Random(seed)
    out = []
    for t in range(size):
        field = QQ if t % 2 == 0 else F5
        W = rng.randint(1, 5)
        n = rng.randint(1, 3)
        sm = random_system(rng, field, -W, 0)
        sp = random_system(rng, field, 1, W)
        c01 = random_chain_map(rng, sm.levels[0], sp.levels[1], name="c01")
        out.append((field, W, n, sm, sp, c01))
    return out


def d_squared_defects(C: GradedComplex) -> List[int]:
    """Degrees k with d^{k+1} d^k != 0, checked by explicit multiplication."""
    return [k for k in C.degrees() if C.dim(k + 2) and not (C.d(k + 1) @ C.d(k)).is_zero()]


# ---------------------------------------------------------------- 1

def criterion_sign_regression(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("d^2 = 0 on telescope, cotelescope and Rabinowitz cone")
    counts = {"QQ": 0, "F5": 0}
    for t, (field, W, n, sm, sp, c01) in enumerate(corpus(seed)):
        T, Cq = telescope(sp, W), cotelescope(sm, W, n)
        R = build_rfc(sm, sp, c01, n)
        for name, C in (("telescope", T), ("cotelescope", Cq), ("cone", R.total)):
            bad = d_squared_defects(C)
            if bad:
                rep.add(False, instance=t, complex=name, degrees=bad, field=field.name)
        counts["QQ" if field is QQ else "F5"] += 1
    if rep.passed:
        rep.add(True, instances=counts, max_window=5)
    return rep


# ---------------------------------------------------------------- 2

def criterion_limits(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("telescope and cotelescope homology against stabilized limits")
    compared = {"direct": 0, "inverse": 0}
    towers = 0
    for t, (field, W, n, sm, sp, c01) in enumerate(corpus(seed)):
        hT = homology(telescope(sp, W))
        cot = cotelescope(sm, W, n)
        hC = homology(cot)
        for k in sp.degrees():
            lr = direct_limit_homology(sp, k, W)
            if lr.stabilized:
                compared["direct"] += 1
                if hT.get(k, 0) != lr.dim:
                    rep.add(False, instance=t, side="direct", degree=k,
                            telescope=hT.get(k, 0), limit=lr.dim)
        for k in sm.degrees():
            lr = inverse_limit_homology(sm, k, W)
            if lr.stabilized:
                compared["inverse"] += 1
                if hC.get(k, 0) != lr.dim:
                    rep.add(False, instance=t, side="inverse", degree=k,
                            cotelescope=hC.get(k, 0), limit=lr.dim)
        for w in range(0, W + 1):
            cert = certify_tower(cot, w)
            towers += 1
            if not cert.passed:
                rep.add(False, instance=t, tower=w, failures=cert.failures())
    # constant systems stabilize immediately and exercise every degree
    rng = random.Random(seed + 1)
    for t in range(20):
        field = QQ if t % 2 == 0 else F5
        C = random_complex(rng, field, {-1: rng.randint(0, 3), 0: rng.randint(1, 3),
                                        1: rng.randint(0, 3)})
        W = rng.randint(2, 5)
        hT = homology(telescope(constant_system(C, 1, W), W))
        hC = homology(cotelescope(constant_system(C, -W, 0), W))
        h = homology(C)
        for k in C.degrees():
            if not (hT.get(k, 0) == hC.get(k, 0) == h.get(k, 0)):
                rep.add(False, constant_instance=t, degree=k)
    if rep.passed:
        rep.add(True, stabilized_comparisons=compared, towers_certified=towers,
                constant_systems=20)
    return rep


# ---------------------------------------------------------------- 3

def criterion_cone_calculus(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("cone calculus and the Rabinowitz exact sequences")
    for t, (field, W, n, sm, sp, c01) in enumerate(corpus(seed)):
        X, Y = sm.levels[0], sp.levels[1]
        if not is_acyclic(cone(identity_map(X))):
            rep.add(False, instance=t, check="cone(id) acyclic")
        hx, hy, hz = homology(X), homology(Y), homology(cone(zero_map(X, Y)))
        ks = set(hz) | {k - 1 for k in hx} | set(hy)
        bad = [k for k in ks if hz.get(k, 0) != hx.get(k + 1, 0) + hy.get(k, 0)]
        if bad:
            rep.add(False, instance=t, check="cone(0) dims", degrees=sorted(bad))
        R = build_rfc(sm, sp, c01, n)
        if not R.ses_report.passed:
            rep.add(False, instance=t, check="short and long exact sequences",
                    failures=R.ses_report.failures()[:3])
    if rep.passed:
        rep.add(True, instances=len(corpus(seed)),
                checks=["cone(id) acyclic", "cone(0) dims", "short exact", "long exact"])
    return rep


# ---------------------------------------------------------------- 4

def criterion_rabinowitz_trivial(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("Rabinowitz complex for identity and zero continuations")
    rng = random.Random(seed + 2)
    for t in range(30):
        field = QQ if t % 2 == 0 else F5
        C = random_complex(rng, field, {-1: rng.randint(0, 3), 0: rng.randint(1, 3),
                                        1: rng.randint(0, 3)})
        W, n = rng.randint(1, 4), rng.randint(1, 3)
        sm, sp = constant_system(C, -W, 0), constant_system(C, 1, W)
        R = build_rfc(sm, sp, identity_map(C), n)
        rfh = {k: d for k, d in R.rfh().items() if d}
        if rfh:
            rep.add(False, instance=t, check="identity gives RFH = 0", rfh=rfh)
        bound = continuation_rank_bound(R)
        h = homology(C)
        exact = all(e["rank_c"] == h.get(e["degree"], 0) for e in bound.entries)
        if not (bound.passed and exact):
            rep.add(False, instance=t, check="rank bound attained by the identity",
                    entries=bound.entries)
        Z = build_rfc(sm, sp, zero_map(C, C), n)
        got = {k: d for k, d in Z.rfh().items() if d}
        exp = {k: d for k, d in rfh_expected_for_zero(Z).items() if d}
        if got != exp:
            rep.add(False, instance=t, check="zero map dims", got=got, expected=exp)
    for t, (field, W, n, sm, sp, c01) in enumerate(corpus(seed)[:50]):
        b = continuation_rank_bound(build_rfc(sm, sp, c01, n))
        if not b.passed:
            rep.add(False, instance=t, check="rank bound", failures=b.failures())
    if rep.passed:
        rep.add(True, constant_instances=30, random_instances=50)
    return rep


# ---------------------------------------------------------------- 5

def _signed_relabel(fam, signs):
    """The family transported along the basis rescaling b_i -> signs[i] b_i."""
    ops = {}
    for key in fam.keys():
        T = {}
        for ix, outs in fam.ops[key].items():
            s = 1
            for i in ix:
                s *= signs[i]
            T[ix] = {o: fam.field.norm(s * signs[o] * v) for o, v in outs.items()}
        ops[key] = T
    return ops


def isomorphic_by_signs(fam, other) -> Tuple[bool, Tuple[int, ...]]:
    """Search a diagonal +-1 basis change carrying fam to other."""
    m = len(fam.base)
    target = {key: {ix: {o: v for o, v in outs.items() if v} for ix, outs in other.ops[key].items()}
              for key in other.keys()}
    for signs in itertools.product((1, -1), repeat=m):
        ops = _signed_relabel(fam, signs)
        clean = {key: {ix: {o: v for o, v in outs.items() if v} for ix, outs in T.items()}
                 for key, T in ops.items()}
        if clean == target:
            return True, signs
    return False, ()


def _flip_entries(fam):
    for key in fam.keys():
        for ix, outs in sorted(fam.ops[key].items()):
            for o in sorted(outs):
                T = {a: dict(b) for a, b in fam.ops[key].items()}
                T[ix][o] = fam.field.neg(T[ix][o])
                yield key, ix, o, fam.with_op(key, T)


def _dg_term_oracle(k: int):
    """Compositions mu^a(.., mu^b(..), ..) with a, b in {1, 2} and a + b = k + 1."""
    out = set()
    for i in range(k):
        for j in range(i + 1, k + 1):
            b, a = j - i, k - (j - i) + 1
            if a in (1, 2) and b in (1, 2):
                out.add((i, j))
    return out


def criterion_ainfinity(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("A-infinity verifier on the dg fixture")
    for lam in (1, 0):
        fam = dg_family(lam)
        tuples = all_tuples(fam, 3, [0])
        base = verify_ainfinity(fam, tuples)
        rep.add(base.passed, check="fixture passes", lam=lam, tuples=len(tuples))
        for term in SIGN_TERMS:
            with dropped_sign_terms(term):
                r = verify_ainfinity(fam, tuples)
            if not r.passed:
                rep.add(True, check="dropped sign term detected", lam=lam, term=term,
                        witness=r.failures()[0])
                continue
            # an undetected drop must leave every operation unchanged
            inert = True
            for xs in tuples:
                a = assemble_mu(len(xs), fam, xs)
                with dropped_sign_terms(term):
                    b = assemble_mu(len(xs), fam, xs)
                if a != b:
                    inert = False
                    break
            rep.add(inert, check="dropped sign term inert on fixture", lam=lam, term=term)
        for key, ix, o, flipped in _flip_entries(fam):
            r = verify_ainfinity(flipped, tuples)
            k, F = key
            where = {"k": k, "F": sorted(F), "inputs": list(ix), "output": o}
            if not r.passed:
                rep.add(True, check="entry flip detected", lam=lam, **where)
            else:
                iso, signs = isomorphic_by_signs(fam, flipped)
                rep.add(iso, check="entry flip is an isomorphic structure", lam=lam,
                        basis_signs=list(signs), **where)
    fam = dg_family(1)
    for k in (1, 2, 3):
        pairs = {(t.i, t.j) for t in ainfinity_terms(k, ())}
        full = {(i, j) for i in range(k) for j in range(i + 1, k + 1)}
        dg_terms = {(i, j) for (i, j) in pairs if (j - i) <= 2 and k - (j - i) + 1 <= 2}
        rep.add(pairs == full and dg_terms == _dg_term_oracle(k), check="term sets", k=k,
                dg_terms=sorted(dg_terms))
        seen = set()
        for xs in all_tuples(fam, k, [0])[-len(fam.base) ** k * 2 ** k:]:
            for t, val in ainfinity_contributions(fam, xs):
                if val:
                    seen.add((t.i, t.j))
        rep.add(seen <= _dg_term_oracle(k), check="nonzero dg contributions", k=k,
                terms=sorted(seen))
    return rep


# ---------------------------------------------------------------- 6

def criterion_popsicle(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("popsicle dimensions and boundary census")
    bad = []
    for k in range(1, 6):
        for r in range(0, min(3, k) + 1):
            for F in itertools.combinations(range(1, k + 1), r):
                if k + len(F) < 2:
                    continue
                if moduli_dim(k, F) != k - 2 + len(F):
                    bad.append((k, F))
    rep.add(not bad, check="dimension formula", failures=bad)
    counts = {k: len(enumerate_codim1(k)) for k in range(2, 7)}
    rep.add(all(c == k * (k - 1) // 2 - 1 for k, c in counts.items()),
            check="associahedron facets", counts={str(k): c for k, c in counts.items()})
    rep.add(moduli_dim(1, (1,)) == 0, check="one input, one sprinkle is a point",
            dimension=moduli_dim(1, (1,)))
    tagged = excluded = 0
    for k in range(2, 6):
        for r in range(0, min(3, k) + 1):
            for F in itertools.combinations(range(1, k + 1), r):
                terms = {(t.i, t.j, t.F1) for t in ainfinity_terms(k, F)}
                for s in enumerate_codim1(k, F):
                    inner = set(F) & set(range(s.i + 1, s.j + 1))
                    fam2 = len(inner - s.F1) >= 2
                    if fam2 != (s.family == 2):
                        rep.add(False, check="family tag", k=k, F=list(F), stratum=s.to_dict())
                    if s.family == 2:
                        tagged += 1
                        if (s.i, s.j, s.F1) in terms:
                            rep.add(False, check="family 2 excluded", k=k, F=list(F),
                                    stratum=s.to_dict())
                        else:
                            excluded += 1
                    elif (s.i, s.j, s.F1) not in terms:
                        rep.add(False, check="family 1 present", k=k, F=list(F),
                                stratum=s.to_dict())
    rep.add(tagged > 0 and tagged == excluded, check="family 2 tagged and excluded",
            family2_strata=tagged)
    return rep


# ---------------------------------------------------------------- 7

def criterion_ginzburg(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("Ginzburg dg algebras of trees")
    window = (-8, 0)
    for name, Q in (("A2", path_quiver(2)), ("A3", path_quiver(3)), ("star", star_quiver(3))):
        for n in (3, 4):
            r = condition3_report(Q, n, window)
            checks = sorted({e["check"] for e in r.entries})
            rep.add(r.passed, quiver=name, n=n, checks=checks, failures=r.failures()[:3])
    G = Ginzburg(quiver(["0"], []), 3)
    h = G.hom_dims("0", "0", window)
    exp = {k: (1 if k % 2 == 0 else 0) for k in range(window[0], window[1] + 1)}
    rep.add(h == exp, quiver="single vertex", n=3,
            hom_dims={str(k): d for k, d in sorted(h.items())})
    return rep


# ---------------------------------------------------------------- 8

def criterion_pairing(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("pairings and Calabi-Yau scalars")
    for n in (2, 3):
        for lam in (1, 0):
            fam, psi = frobenius_family(n, lam)
            S = pairing_setup(fam, n, psi, (-3, 3))
            a, b, g = chain_pairings(S)
            d = verify_diagram(a, b, g, S.i, S.p, n)
            five = [e for e in d.entries if e.get("check") == "five_lemma"]
            fired = bool(five) and not five[0].get("skipped", False)
            rep.add(d.passed and fired, check="diagram", n=n, lam=lam, five_lemma_fired=fired)
    rng = random.Random(seed + 3)
    for n in (3, 4):
        cat = frobenius_category(n)
        P = trace_pairing(cat, n, {"X": {0: 1}})
        c = cy_scalar(cat, P, scaled_pairing(P, {"X": 2}), n)
        rep.add(c == 2, check="scalar", category="Frobenius", n=n, c=str(c))
        rep.add(bifunctoriality_check(cat, P, n, 100, rng).passed, check="bifunctoriality",
                category="Frobenius", n=n, samples=100)
        A2 = trivial_extension(["1", "2"], path_algebra_paths(["1", "2"], [("1", "2")]), n)
        P = trace_pairing(A2, n, {X: {0: 1} for X in A2.objects})
        nd = all(nondegenerate(M)[0] for v in P.values() for M in v.values())
        rep.add(nd, check="nondegenerate", category="A2", n=n)
        c = cy_scalar(A2, P, scaled_pairing(P, {"1": 3, "2": 3}), n)
        rep.add(c == 3, check="scalar", category="A2", n=n, c=str(c))
        try:
            cy_scalar(A2, P, scaled_pairing(P, {"1": 2, "2": 3}), n)
            rep.add(False, check="mixed scaling flagged", n=n)
        except Inconsistent as e:
            rep.add(True, check="mixed scaling flagged", n=n, witness=list(e.witness))
        rep.add(bifunctoriality_check(A2, P, n, 100, rng).passed, check="bifunctoriality",
                category="A2", n=n, samples=100)
    return rep


# ---------------------------------------------------------------- 9

def _windows_oracle(mu, A, B, d):
    return {m for m in range(2, 200) if A - (m - 2) * mu <= d <= B - (m - 2) * mu}


def criterion_reeb(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("Reeb chord arithmetic")
    pm = HamiltonianProfile.from_toml(fixture_text("profile_mu.toml"))
    pn = HamiltonianProfile.from_toml(fixture_text("profile_nu.toml"))
    vals = {str(r): action_at(pm, r) for r in ("1", "3/2", "2")}
    exp = {r: -(Fraction(r) ** 2 - 1) for r in vals}
    rep.add(vals == exp, check="actions", values={r: str(v) for r, v in vals.items()})
    spec = load_periods(fixture_text("spec.toml"))
    good, g = good_pair_check(pm, pn, spec)
    rep.add(good, check="good pair chords agree", entries=g.entries)
    rep.add(not good_pair_check(pm, pm, spec)[0], check="equal radii is not good")
    full = RotationBlock.linear(0, 1)
    half = RotationBlock.linear(0, Fraction(1, 2))
    minus_id = RotationBlock.constant(Fraction(1, 2))
    idx = {"full": rs_index([full]), "half": rs_index([half]), "minus_id": rs_index([minus_id])}
    rep.add(idx == {"full": 2, "half": 1, "minus_id": 0}, check="rs_index",
            values={k: str(v) for k, v in idx.items()})
    rep.add(degree_windows(2, 0, 1, -3) == {4}, check="degree window example")
    rng = random.Random(seed + 4)
    worst = 0
    for _ in range(10 ** 4):
        mu = rng.choice([m for m in range(-5, 6) if m])
        A, B = rng.randint(-10, 10), rng.randint(-10, 10)
        d = rng.randint(-30, 30)
        got = degree_windows(mu, A, B, d)
        if got != _windows_oracle(mu, A, B, d) or len(got) > max(window_bound(mu, A, B), 0):
            rep.add(False, check="window scan", mu=mu, A=A, B=B, d=d, got=sorted(got))
            break
        worst = max(worst, len(got))
    else:
        rep.add(True, check="window scan", inputs=10 ** 4, largest_window=worst)
    try:
        degree_windows(0, 0, 1, 0)
        rep.add(False, check="zero Maslov rejected")
    except ZeroMaslov:
        rep.add(True, check="zero Maslov rejected")
    return rep


CRITERIA: List[Tuple[int, str, Callable[[int], Report]]] = [
    (1, "sign regression", criterion_sign_regression),
    (2, "limit lemmas", criterion_limits),
    (3, "cone calculus", criterion_cone_calculus),
    (4, "Rabinowitz trivial cases", criterion_rabinowitz_trivial),
    (5, "A-infinity verifier", criterion_ainfinity),
    (6, "popsicle census", criterion_popsicle),
    (7, "Ginzburg model", criterion_ginzburg),
    (8, "pairing machinery", criterion_pairing),
    (9, "Reeb arithmetic", criterion_reeb),
]
