"""Figures for the command line reports (Agg backend, deterministic PNGs)."""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)


def hom_dimension_plot(rows: List[dict], path, title: str = "") -> None:
    """dim H^k(e_w G e_v) against k, one line per pair (v, w)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    pairs = sorted({(r["source"], r["target"]) for r in rows})
    for v, w in pairs:
        pts = sorted((r["degree"], r["hom_dim"]) for r in rows
                     if r["source"] == v and r["target"] == w)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{v}->{w}")
    ax.set_xlabel("degree")
    ax.set_ylabel("dim H")
    ax.set_title(title)
    if len(pairs) <= 16:
        ax.legend(fontsize=7, ncol=2)
    _save(fig, path)


def census_plot(census: Dict, path) -> None:
    """Codimension-one strata of one popsicle type by (i, j), colored by family."""
    fig, ax = plt.subplots(figsize=(6, 4))
    strata = census["codim1"]
    labels = [f"({s['i']},{s['j']},{{{','.join(map(str, s['F1']))}}})" for s in strata]
    colors = ["tab:blue" if s["family"] == 1 else "tab:red" for s in strata]
    ax.bar(range(len(strata)), [1] * len(strata), color=colors)
    ax.set_xticks(range(len(strata)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_yticks([])
    ax.set_title(f"k={census['k']} F={census['flavor']}: family 1 blue, family 2 red")
    _save(fig, path)


def degree_bars(dims: Dict[int, int], path, title: str, ylabel: str = "dim") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = sorted(dims)
    ax.bar(ks, [dims[k] for k in ks], color="tab:green")
    ax.set_xlabel("degree")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _save(fig, path)


def level_plot(series: Dict[str, Dict[int, int]], path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, pts in sorted(series.items()):
        ws = sorted(pts)
        ax.step(ws, [pts[w] for w in ws], where="mid", label=name)
    ax.set_xlabel("level w")
    ax.set_ylabel("dim H")
    ax.set_title(title)
    ax.legend(fontsize=7)
    _save(fig, path)


def action_plot(curve: Sequence[Tuple[float, float]], chords: Sequence[Tuple[float, float]],
                path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([c[0] for c in curve], [c[1] for c in curve], color="tab:blue")
    if chords:
        ax.scatter([c[0] for c in chords], [c[1] for c in chords], color="tab:red", zorder=3)
    ax.set_xlabel("r")
    ax.set_ylabel("A(r)")
    ax.set_title(title)
    _save(fig, path)
