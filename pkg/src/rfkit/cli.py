"""Command line entry point: ``rfkit <subcommand>``.

Every subcommand builds a report dict with ``schema_version``, the
configuration, a table of ``rows`` and a list of ``checks``.  Output is
JSON (sorted keys), CSV or an aligned text table; with ``--out DIR`` the
report and its figures are written there instead of stdout.
Exit codes: 0 all checks pass, 1 some check fails, 2 bad input.
"""

from __future__ import annotations

import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import click

from .exact_linalg import Field, parse_field
from .graded_complex import ChainMap, Report, homology

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1


class InputError(Exception):
    def __init__(self, module: str, message: str):
        super().__init__(f"[{module}] {message}")
        self.module = module


# ---------------------------------------------------------------- output

def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return [jsonable(v) for v in sorted(x, key=str)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Field):
        return x.name
    return x


def _cell(v) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = report.get("rows", [])
    cols: List[str] = []
    for r in rows:
        cols.extend(c for c in r if c not in cols)
    status = [f"{c['name']}: {c['status']}" for c in report.get("checks", [])]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if cols:
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c, "")) for c in cols])
        for s in status:
            buf.write(f"# {s}\n")
        buf.write(f"# status: {report['status']}\n")
        return buf.getvalue()
    # aligned text table
    lines = []
    if cols:
        cells = [[_cell(r.get(c, "")) for c in cols] for r in rows]
        width = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(wd) for c, wd in zip(cols, width)))
        lines.extend("  ".join(v.rjust(wd) for v, wd in zip(row, width)) for row in cells)
    for c in report.get("checks", []):
        lines.append(f"{c['name']}: {c['status']}")
        for e in c["entries"]:
            if not e.get("ok", True):
                lines.append("  FAIL " + _cell({k: v for k, v in e.items() if k != "ok"}))
    lines.append(f"status: {report['status']}")
    return "\n".join(lines) + "\n"


def finish(ctx_obj: dict, command: str, config: dict, rows: List[dict], checks: List[Report],
           figures=None) -> None:
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "rows": rows,
        "checks": [c.to_dict() for c in checks],
    }
    report["status"] = "PASS" if all(c.passed for c in checks) else "FAIL"
    report = jsonable(report)
    fmt, out = ctx_obj["format"], ctx_obj["out"]
    text = render(report, fmt)
    if out is None:
        click.echo(text, nl=False)
    else:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        ext = {"json": "json", "csv": "csv", "table": "txt"}[fmt]
        (d / f"{command}.{ext}").write_text(text)
        if figures is not None:
            figures(d)
        click.echo(f"{command}: {report['status']} -> {d / f'{command}.{ext}'}")
    if report["status"] != "PASS":
        sys.exit(1)


def read_toml(path: str, module: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(module, f"cannot read {path}: {e.strerror}") from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise InputError(module, f"{path}: malformed TOML: {e}") from None


def read_json(path: str, module: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(module, f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(module, f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: "
                                 f"{e.msg}") from None


def _field(spec: str) -> Field:
    try:
        return parse_field(spec)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--field")


# ---------------------------------------------------------------- group

@click.group()
@click.option("--field", "field_spec", default="q", show_default=True,
              help="Coefficient field: q or fp:P.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table",
              show_default=True)
@click.option("--seed", type=int, default=7, show_default=True,
              help="Seed for randomized runs.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Write the report and figures into this directory.")
@click.pass_context
def cli(ctx, field_spec, fmt, seed, out):
    """Exact computations around Rabinowitz Floer complexes and Ginzburg algebras."""
    ctx.obj = {"field": _field(field_spec), "format": fmt, "seed": seed, "out": out}


def _window_option(default):
    return click.option("--window", nargs=2, type=int, default=default, show_default=True,
                        metavar="LO HI")


def _check_window(window, module):
    lo, hi = window
    if lo > hi:
        raise InputError(module, f"empty window [{lo}, {hi}]")
    return lo, hi


# ---------------------------------------------------------------- ginzburg

@cli.command()
@click.option("--quiver", "quiver_path", type=click.Path(), default=None,
              help="Quiver TOML: vertices, arrows, n.")
@click.option("--preset", type=click.Choice(["a2", "a3", "star"]), default=None)
@click.option("--n", "n_opt", type=int, default=None, help="Override the dimension n.")
@_window_option((-6, 0))
@click.pass_obj
def ginzburg(obj, quiver_path, preset, n_opt, window):
    """Cohomology table of e_w G e_v and the condition-3 report for a tree quiver."""
    from .ginzburg import build_ginzburg, condition3_report, dimension_table, load_quiver
    from .acceptance import fixture_text

    lo, hi = _check_window(window, "ginzburg")
    if quiver_path is not None:
        read_toml(quiver_path, "ginzburg")  # parse errors carry the location
        text = Path(quiver_path).read_text()
    elif preset is not None:
        text = fixture_text(f"{preset}.toml")
    else:
        raise InputError("ginzburg", "give --quiver FILE or --preset NAME")
    try:
        Q, n = load_quiver(text)
    except ValueError as e:
        raise InputError("ginzburg", str(e)) from None
    if n_opt is not None:
        n = n_opt
    try:
        G = build_ginzburg(Q, n, obj["field"])
    except ValueError as e:
        raise InputError("ginzburg", str(e)) from None
    rows = dimension_table(G, (lo, hi))
    rep = condition3_report(Q, n, (lo, hi), obj["field"])
    config = {"vertices": list(Q.vertices), "arrows": [list(a) for a in Q.arrows], "n": n,
              "window": [lo, hi], "field": obj["field"].name}

    def figures(d):
        from .plots import hom_dimension_plot
        hom_dimension_plot(rows, d / "ginzburg_hom.png", f"dim H^k(e_w G e_v), n={n}")

    finish(obj, "ginzburg", config, rows, [rep], figures)


# ---------------------------------------------------------------- limits

@cli.command()
@click.option("--system", "system_path", type=click.Path(), default=None,
              help="Directed system JSON (levels and maps).")
@_window_option((-3, 3))
@click.option("--n", type=int, default=0, show_default=True)
@click.pass_obj
def limits(obj, system_path, window, n):
    """Telescope and cotelescope homology against limits of the level homologies."""
    from .limit_systems import (certify_tower, cotelescope, direct_limit_homology,
                                inverse_limit_homology, random_system, system_from_json,
                                telescope)

    lo, hi = _check_window(window, "limits")
    if lo > 0 or hi < 1:
        raise InputError("limits", "window must contain levels 0 and 1")
    F = obj["field"]
    if system_path is not None:
        try:
            S = system_from_json(read_json(system_path, "limits"), F)
        except (KeyError, ValueError) as e:
            raise InputError("limits", f"{system_path}: {e}") from None
        missing = [w for w in range(lo, hi + 1) if w not in S.levels]
        if missing:
            raise InputError("limits", f"levels {missing} missing from {system_path}")
        sm, sp = S.restricted(lo, 0), S.restricted(1, hi)
        source = system_path
    else:
        rng = random.Random(obj["seed"])
        sm, sp = random_system(rng, F, lo, 0), random_system(rng, F, 1, hi)
        source = "random"
    W_minus, W_plus = -lo, hi
    hT = homology(telescope(sp, W_plus))
    cot = cotelescope(sm, W_minus, n)
    hC = homology(cot)
    rep = Report("limits")
    rows = []
    for k in sorted(set(sp.degrees()) | set(sm.degrees())):
        row = {"degree": k}
        if k in sp.degrees():
            d = direct_limit_homology(sp, k, W_plus)
            row.update(telescope=hT.get(k, 0), direct_limit=d.dim, direct_stable=d.stabilized)
            if d.stabilized:
                rep.add(hT.get(k, 0) == d.dim, side="direct", degree=k)
        if k in sm.degrees():
            i = inverse_limit_homology(sm, k, W_minus)
            row.update(cotelescope=hC.get(k, 0), inverse_limit=i.dim, inverse_stable=i.stabilized)
            if i.stabilized:
                rep.add(hC.get(k, 0) == i.dim, side="inverse", degree=k)
        rows.append(row)
    tower = certify_tower(cot, W_minus)
    config = {"source": source, "window": [lo, hi], "n": n, "field": F.name, "seed": obj["seed"]}

    def figures(d):
        from .plots import level_plot
        series = {}
        for k in sorted(set(sp.degrees()) | set(sm.degrees())):
            pts = {w: homology(S_).get(k, 0) for w, S_ in
                   list(sm.levels.items()) + list(sp.levels.items())}
            series[f"H^{k}"] = pts
        level_plot(series, d / "limits_levels.png", "level homology")

    finish(obj, "limits", config, rows, [rep, tower], figures)


# ---------------------------------------------------------------- rabinowitz

def _load_family(spec: str, F: Field, n: int, lam: int):
    from .cy_pairing import frobenius_family
    from .rabinowitz import dg_family, family_from_json
    if spec == "dg":
        return dg_family(lam, F)
    if spec == "frobenius":
        return frobenius_family(n, lam, F)[0]
    try:
        return family_from_json(read_json(spec, "rabinowitz"), F)
    except InputError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise InputError("rabinowitz", f"{spec}: {e}") from None


@cli.command()
@click.option("--family", "family_spec", default="dg", show_default=True,
              help="dg, frobenius, or an operation family JSON file.")
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--lam", type=int, default=1, show_default=True,
              help="Continuation scalar for the built-in families.")
@click.option("--kmax", type=int, default=3, show_default=True,
              help="Largest arity for the A-infinity check.")
@click.option("--weights", default="0", show_default=True,
              help="Comma-separated input weights for the A-infinity check.")
@_window_option((-3, 3))
@click.pass_obj
def rabinowitz(obj, family_spec, n, lam, kmax, weights, window):
    """RFH of an operation family, its exact sequences and the A-infinity check."""
    from .rabinowitz import (ab_complex, all_tuples, build_rfc, continuation_rank_bound,
                             family_system, verify_ainfinity)

    lo, hi = _check_window(window, "rabinowitz")
    if lo > 0 or hi < 1:
        raise InputError("rabinowitz", "window must contain levels 0 and 1")
    F = obj["field"]
    fam = _load_family(family_spec, F, n, lam)
    try:
        ws = [int(x) for x in weights.split(",") if x.strip()]
    except ValueError:
        raise InputError("rabinowitz", f"bad --weights {weights!r}") from None
    sm, sp = family_system(fam, lo, 0), family_system(fam, 1, hi)
    c01 = ChainMap(sm.levels[0], sp.levels[1], family_system(fam, 0, 1).cmap(0).blocks,
                   name="c01")
    R = build_rfc(sm, sp, c01, n)
    AB = ab_complex(fam, (lo, hi))
    iso = Report("cone and A/B model")
    try:
        R.ab_isomorphism(AB)
        iso.add(True, check="signed relabelling is a chain isomorphism")
    except ValueError as e:
        iso.add(False, check="signed relabelling is a chain isomorphism", error=str(e))
    rfh = R.rfh()
    hab = homology(AB)
    rows = [{"degree": k, "rfh": rfh.get(k, 0), "ab_model": hab.get(k, 0),
             "hw_plus": homology(R.cw_plus).get(k, 0),
             "hw_minus": homology(R.cw_minus).get(k, 0)}
            for k in sorted(set(rfh) | set(hab))]
    ainf = verify_ainfinity(fam, all_tuples(fam, kmax, ws))
    config = {"family": family_spec, "n": n, "lam": lam, "window": [lo, hi], "kmax": kmax,
              "weights": ws, "field": F.name}

    def figures(d):
        from .plots import degree_bars
        degree_bars({r["degree"]: r["rfh"] for r in rows}, d / "rabinowitz_rfh.png",
                    "dim RFH^k (truncated)")

    finish(obj, "rabinowitz", config, rows,
           [R.ses_report, iso, continuation_rank_bound(R), ainf], figures)


# ---------------------------------------------------------------- popsicle

@cli.command()
@click.option("--k", "k", type=int, required=True)
@click.option("--flavor", default="", help="Comma-separated flavor set, e.g. 1,3.")
@click.pass_obj
def popsicle(obj, k, flavor):
    """Dimension and codimension-one strata of a popsicle moduli space."""
    from .popsicle import Unstable, census

    try:
        F = [int(x) for x in flavor.split(",") if x.strip()]
        c = census(k, F)
    except (Unstable, ValueError) as e:
        raise InputError("popsicle", str(e)) from None
    rows = [dict(s, inner=list(range(s["i"] + 1, s["j"] + 1))) for s in c["codim1"]]
    rep = Report("popsicle census")
    rep.add(c["dimension"] == k - 2 + len(F), check="dimension", dimension=c["dimension"])
    terms = {(t["i"], t["j"], tuple(t["F1"])) for t in c["ainfinity_terms"]}
    for s in c["codim1"]:
        inside = (s["i"], s["j"], tuple(s["F1"])) in terms
        rep.add(inside == (s["family"] == 1), check="family", i=s["i"], j=s["j"], F1=s["F1"])
    config = {"k": k, "flavor": F, "dimension": c["dimension"], "family1": c["family1"],
              "family2": c["family2"], "ainfinity_terms": c["ainfinity_terms"]}

    def figures(d):
        from .plots import census_plot
        census_plot(c, d / "popsicle_census.png")

    finish(obj, "popsicle", config, rows, [rep], figures)


# ---------------------------------------------------------------- pairing

def _parse_scale(s: str) -> Dict[str, Fraction]:
    out = {}
    for part in s.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise InputError("pairing", f"bad --scale entry {part!r}; expected OBJ=VALUE")
        k, v = part.split("=", 1)
        out[k.strip()] = Fraction(v.strip())
    return out


@cli.command()
@click.option("--category", default="a2", show_default=True,
              help="frobenius, a2, a3, or a category presentation JSON file.")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--scale", default="", help="Scaled second pairing, e.g. 1=3,2=3.")
@click.option("--samples", type=int, default=100, show_default=True)
@click.pass_obj
def pairing(obj, category, n, scale, samples):
    """Trace pairings, bifunctoriality, CY scalars and the chain-level diagram."""
    from .cy_pairing import (FiniteCategoryPresentation, HypothesisFailed, Inconsistent,
                             bifunctoriality_check, chain_pairings, cy_scalar,
                             frobenius_category, frobenius_family, nondegenerate,
                             pairing_setup, path_algebra_paths, scaled_pairing, trace_pairing,
                             trivial_extension, verify_diagram)

    F = obj["field"]
    if category == "frobenius":
        cat = frobenius_category(n, F)
    elif category in ("a2", "a3"):
        m = int(category[1])
        vs = [str(i) for i in range(1, m + 1)]
        arrows = [(vs[i], vs[i + 1]) for i in range(m - 1)]
        cat = trivial_extension(vs, path_algebra_paths(vs, arrows), n, F)
    else:
        try:
            cat = FiniteCategoryPresentation.from_json(read_json(category, "pairing"), F)
        except InputError:
            raise
        except (KeyError, ValueError, TypeError) as e:
            raise InputError("pairing", f"{category}: {e}") from None
    P = trace_pairing(cat, n, {X: {0: F.one} for X in cat.objects})
    rows = []
    nd = Report("nondegenerate")
    for (X, Y), blocks in sorted(P.items()):
        for d, M in sorted(blocks.items()):
            ok, info = nondegenerate(M)
            nd.add(ok, source=X, target=Y, degree=d, **info)
            rows.append({"source": X, "target": Y, "degree": d, "rank": info["rank"],
                         "size": info["rows"]})
    checks = [nd, bifunctoriality_check(cat, P, n, samples, random.Random(obj["seed"]))]
    if scale:
        sc = _parse_scale(scale)
        missing = [X for X in cat.objects if X not in sc]
        if missing:
            raise InputError("pairing", f"--scale misses objects {missing}")
        cs = Report("CY scalar")
        try:
            c = cy_scalar(cat, P, scaled_pairing(P, sc, F), n)
            cs.add(True, scalar=c)
        except Inconsistent as e:
            cs.add(False, witness=list(e.witness), values=e.values)
        except HypothesisFailed as e:
            cs.add(False, hypothesis=str(e))
        checks.append(cs)
    if category == "frobenius" and n >= 2:
        fam, psi = frobenius_family(n, 1, F)
        S = pairing_setup(fam, n, psi, (-3, 3))
        a, b, g = chain_pairings(S)
        checks.append(verify_diagram(a, b, g, S.i, S.p, n))
    config = {"category": category, "objects": list(cat.objects), "n": n, "scale": scale,
              "samples": samples, "field": F.name, "seed": obj["seed"]}
    finish(obj, "pairing", config, rows, checks)


# ---------------------------------------------------------------- reeb

def _parse_blocks(spec: str):
    from .reeb_period import RotationBlock
    blocks = []
    for part in spec.split(";"):
        thetas = [Fraction(x) for x in part.split(",") if x.strip()]
        if len(thetas) < 2:
            raise InputError("reeb", f"rotation block {part!r} needs at least two angles")
        m = len(thetas) - 1
        blocks.append(RotationBlock(tuple((Fraction(i, m), th) for i, th in enumerate(thetas))))
    return blocks


@cli.command()
@click.option("--profile", "profile_path", type=click.Path(), default=None,
              help="Profile TOML ([profile] breakpoints, coefficients).")
@click.option("--profile2", "profile2_path", type=click.Path(), default=None,
              help="Second profile for the good pair check.")
@click.option("--periods", default="1,3/2,3", show_default=True)
@click.option("--maslov", default=None,
              help="Rotation blocks: angles (in turns) at equally spaced times, "
                   "blocks separated by ';', e.g. '0,1;0,1/2'.")
@click.option("--windows", nargs=4, type=int, default=None, metavar="A B MU D")
@click.pass_obj
def reeb(obj, profile_path, profile2_path, periods, maslov, windows):
    """Chord radii and actions, good pairs, Robbin-Salamon indices and degree windows."""
    from .acceptance import fixture_text
    from .reeb_period import (HamiltonianProfile, InvalidProfile, NonIsolatedCrossing,
                              ZeroMaslov, action_at, chord_radii, degree_windows,
                              good_pair_check, rs_index, window_bound)

    def load(path, default):
        if path is None:
            return HamiltonianProfile.from_toml(fixture_text(default))
        data = read_toml(path, "reeb")
        prof = data.get("profile", data)
        try:
            return HamiltonianProfile(prof["breakpoints"], prof["coefficients"])
        except KeyError as e:
            raise InputError("reeb", f"{path}: missing key {e.args[0]!r}") from None
        except (InvalidProfile, ValueError) as e:
            raise InputError("reeb", f"{path}: {e}") from None

    pm = load(profile_path, "profile_mu.toml")
    try:
        spec = sorted({Fraction(x) for x in periods.split(",") if x.strip()})
    except ValueError:
        raise InputError("reeb", f"bad --periods {periods!r}") from None
    try:
        chords = chord_radii(pm, spec)
    except ValueError as e:
        raise InputError("reeb", str(e)) from None
    rows = [{"radius": r, "period": T, "action": a} for r, T, a in chords]
    checks = []
    mono = Report("action decreasing along chords")
    for (r1, _, a1), (r2, _, a2) in zip(chords, chords[1:]):
        mono.add(r1 < r2 and a1 > a2, radii=[r1, r2])
    checks.append(mono)
    config = {"profile": pm.to_dict(), "periods": spec}
    if profile2_path is not None or profile_path is None:
        pn = load(profile2_path, "profile_nu.toml")
        good, rep = good_pair_check(pm, pn, spec)
        rep.name = "good pair" if good else "good pair (not good)"
        checks.append(rep)
        config["profile2"] = pn.to_dict()
    if maslov:
        try:
            idx = rs_index(_parse_blocks(maslov))
        except NonIsolatedCrossing as e:
            raise InputError("reeb", f"--maslov: {e}") from None
        config["rs_index"] = idx
        rr = Report("Robbin-Salamon index")
        rr.add(True, blocks=maslov, index=idx)
        checks.append(rr)
    if windows:
        A, B, mu, d = windows
        try:
            ms = degree_windows(mu, A, B, d)
        except ZeroMaslov as e:
            raise InputError("reeb", str(e)) from None
        wr = Report("degree windows")
        wr.add(len(ms) <= window_bound(mu, A, B), A=A, B=B, mu=mu, degree=d, m=sorted(ms),
               bound=window_bound(mu, A, B))
        checks.append(wr)

    def figures(dr):
        from .plots import action_plot
        N = 60
        rr = [1 + (pm.r_nu - 1) * Fraction(i, N) for i in range(N + 1)]
        curve = [(float(r), float(action_at(pm, r))) for r in rr]
        action_plot(curve, [(float(r), float(a)) for r, _, a in chords],
                    dr / "reeb_action.png", "action along the profile")

    finish(obj, "reeb", config, rows, checks, figures)


# ---------------------------------------------------------------- selftest

@cli.command()
@click.option("--only", default="", help="Comma-separated criterion numbers.")
@click.pass_obj
def selftest(obj, only):
    """Run the acceptance criteria with the given seed."""
    from .acceptance import CRITERIA

    try:
        sel = {int(x) for x in only.split(",") if x.strip()}
    except ValueError:
        raise InputError("selftest", f"bad --only {only!r}") from None
    rows, checks = [], []
    for num, title, fn in CRITERIA:
        if sel and num not in sel:
            continue
        rep = fn(obj["seed"])
        rep.name = f"{num} {title}"
        rows.append({"criterion": num, "title": title,
                     "status": "PASS" if rep.passed else "FAIL"})
        checks.append(rep)
    finish(obj, "selftest", {"seed": obj["seed"], "only": sorted(sel)}, rows, checks)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name="rfkit", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except InputError as e:
        click.echo(f"error {e}", err=True)
        return 2
    except SystemExit as e:
        return int(e.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
