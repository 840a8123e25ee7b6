"""One figure per subcommand, written next to the CSV."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import SweepReport  # noqa: E402


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def _plot_inequalities(rep: SweepReport, ax):
    groups = defaultdict(list)
    for r in rep.rows:
        groups[(r["suite"], r["check"], r["n"])].append(1.0 + r["max_measure_excess"])
    for (suite, check, n), ys in sorted(groups.items()):
        ax.plot(range(len(ys)), ys, ".", ms=3, label=f"{check} n={n}")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_xlabel("sample")
    ax.set_ylabel("max over t of |{|v| > bound(t)}| / t")
    ax.legend(fontsize=6, ncol=2)


def _plot_sharpness(rep: SweepReport, ax):
    groups = defaultdict(list)
    for r in rep.rows:
        groups[(r["family"], r["n"])].append(r)
    for (fam, n), rows in groups.items():
        if fam == "balanced":
            xs = [r["epsilon"] / r["R"] for r in rows]
        elif fam == "translated":
            xs = [r["R"] for r in rows]
        else:
            xs = [r["t"] for r in rows]
        line, = ax.semilogx(xs, [r["ratio"] for r in rows], "o-", ms=3, label=f"{fam} n={n}")
        ax.axhline(rows[0]["target"], color=line.get_color(), lw=0.6, ls="--")
    ax.set_xlabel("sweep parameter (t, eps/R or R)")
    ax.set_ylabel("ratio")
    ax.legend(fontsize=6)


def _plot_brezis_merle(rep: SweepReport, ax):
    groups = defaultdict(list)
    for r in rep.rows:
        groups[(r["family"], r["alpha_over_pi"])].append(r)
    for (fam, a), rows in sorted(groups.items()):
        xs = [math.log(1.0 / r["delta"]) for r in rows]
        line, = ax.plot(xs, [r["integral"] for r in rows], "o-", ms=3, label=f"{fam} alpha={a:g}pi")
        if _finite(rows[0]["bound"]):
            ax.axhline(rows[0]["bound"], color=line.get_color(), lw=0.6, ls="--")
    ax.set_yscale("log")
    ax.set_xlabel("log(1/delta)")
    ax.set_ylabel("int exp(alpha |u| / ||f||_1)")
    ax.legend(fontsize=6)


def _plot_lq(rep: SweepReport, ax):
    groups = defaultdict(list)
    for r in rep.rows:
        if r["kind"] == "bump":
            groups[(r["n"], r["q"])].append(r)
    for (n, q), rows in sorted(groups.items()):
        ax.loglog([r["delta"] for r in rows], [max(r["rel_diff"], 1e-17) for r in rows], "o-", ms=3,
                  label=f"n={n} q={q:.3g}")
    ax.set_xlabel("delta")
    ax.set_ylabel("1 - ||U_delta||_q / constant")
    ax.legend(fontsize=6, ncol=2)


def _plot_membership(rep: SweepReport, ax):
    groups = defaultdict(list)
    for r in rep.rows:
        if r["section"] == "defect":
            groups[(r["profile"], r["n"])].append(r)
    for (prof, n), rows in sorted(groups.items()):
        ax.loglog([r["x"] for r in rows], [max(r["value"], 1e-300) for r in rows], "-", label=f"{prof} n={n}")
    ax.set_xlabel("t")
    ax.set_ylabel("u**(t) / N*(t)")
    ax.legend(fontsize=6, ncol=2)


_PLOTTERS = {
    "check-inequalities": _plot_inequalities,
    "sweep-sharpness": _plot_sharpness,
    "brezis-merle": _plot_brezis_merle,
    "lq-constants": _plot_lq,
    "target-membership": _plot_membership,
}


def render(rep: SweepReport, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if rep.rows:
        _PLOTTERS[rep.suite](rep, ax)
    else:
        ax.text(0.5, 0.5, "no rows", ha="center", va="center", transform=ax.transAxes)
    ax.set_title(rep.suite)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
