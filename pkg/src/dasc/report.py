"""Figures for benchmark tables."""

from __future__ import annotations

from collections import defaultdict

from matplotlib.figure import Figure

from .bench import NOT_RELEVANT, BenchRow

_STYLE = {"rr": ("tab:blue", "o", "-"), "greedy": ("tab:orange", "s", "--")}


def _series(rows: list[BenchRow]) -> dict:
    out = defaultdict(list)
    for row in rows:
        # the single-worker greedy run is the start of the greedy curve
        dist = "greedy" if row.distribution == NOT_RELEVANT else row.distribution
        out[row.n, dist].append(row)
    return {key: sorted(v, key=lambda r: r.k) for key, v in out.items()}


def plot_bench(rows: list[BenchRow], path: str, timing: bool = True) -> Figure:
    """Wall time and cross-worker messages against worker count."""
    panels = [("cross_worker_messages", "cross-worker messages")]
    if timing:
        panels.insert(0, ("wall_time", "wall time [s]"))
    fig = Figure(figsize=(4.2 * len(panels), 3.4))
    axes = fig.subplots(1, len(panels), squeeze=False)[0]
    series = _series(rows)
    for ax, (attr, label) in zip(axes, panels):
        for (n, dist), pts in sorted(series.items()):
            color, marker, ls = _STYLE.get(dist, ("tab:gray", "^", ":"))
            ax.plot([r.k for r in pts], [getattr(r, attr) for r in pts],
                    color=color, marker=marker, linestyle=ls, label=f"n={n} {dist}")
        ax.set_xlabel("workers")
        ax.set_ylabel(label)
        ax.set_xticks(sorted({r.k for r in rows}))
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize="small", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return fig
