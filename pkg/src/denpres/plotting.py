"""Matplotlib figures for the CLI reports.

Everything renders through the Agg backend and is written with the PNG
``Software`` tag removed, so identical inputs give identical files.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sternbrocot import PiecewiseLinearFn  # noqa: E402

_RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "lines.linewidth": 1.0,
    "svg.hashsalt": "denpres",
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = path.suffix.lstrip(".").lower() or "png"
    meta = {"Software": None} if fmt == "png" else {"Date": None} if fmt in ("svg", "pdf") else None
    fig.savefig(path, format=fmt, metadata=meta)
    plt.close(fig)
    return path


def plot_function(f: PiecewiseLinearFn, path, title: str = "") -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        xs = [float(x) for x in f.breakpoints]
        ys = [float(y) for y in f.values]
        ax.plot(xs, ys, color="k")
        ax.axhline(0.0, color="0.5", lw=0.5)
        ax.set_xlim(xs[0], xs[-1])
        ax.set_xlabel("x")
        ax.set_ylabel("f(x)")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_discrepancy(rows: Sequence[dict], path) -> Path:
    """``rows`` carry keys K, n, cube, discrepancy_float; one line per (n, cube)."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        series: dict[tuple, list] = {}
        for r in rows:
            series.setdefault((r["n"], r["cube"]), []).append((r["K"], r["discrepancy_float"]))
        for (n, cube), pts in sorted(series.items()):
            pts.sort()
            ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=f"n={n}, {cube}")
        Ks = np.array(sorted({r["K"] for r in rows}), dtype=float)
        if len(Ks) > 1:
            ax.loglog(Ks, 1.0 / Ks, ":", color="0.5", label="1/K")
        ax.set_xlabel("K (largest denominator)")
        ax.set_ylabel("star discrepancy")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_equidist(rows: Sequence[dict], path) -> Path:
    """Error and bound against k, from ``EquidistReport.to_row`` dicts."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ks = [int(r["k"]) for r in rows]
        err = [float(Fraction(r["error"])) for r in rows]
        ax.semilogy(ks, np.maximum(err, 1e-300), ".", color="k", label="|mean - integral|")
        bnd = [(int(r["k"]), float(Fraction(r["bound"]))) for r in rows if r["bound"] != ""]
        if bnd:
            ax.semilogy([b[0] for b in bnd], [b[1] for b in bnd], ".", color="C3", ms=3, label="bound")
        ax.set_xlabel("k")
        ax.set_ylabel("error")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_orbit(points: Sequence[Sequence], path) -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        arr = np.array([[float(x) for x in p] for p in points])
        ax.plot(arr[:, 0], arr[:, 1], ".", ms=2, color="k")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.tight_layout()
        return _save(fig, path)


def plot_jacobian_trace(dets: Sequence, integral: Sequence[bool], path) -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        depth = np.arange(len(dets))
        vals = np.array([float(d) for d in dets])
        ok = np.array(integral, dtype=bool)
        ax.plot(depth, vals, "-", color="0.6")
        ax.plot(depth[ok], vals[ok], "o", color="k", ms=3, label="integer A")
        ax.plot(depth[~ok], vals[~ok], "x", color="C3", ms=4, label="non-integer A")
        ax.set_xlabel("depth")
        ax.set_ylabel("det A")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)

