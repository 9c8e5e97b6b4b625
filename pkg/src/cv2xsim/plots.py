"""Figure builders for the report path.

Every latency-pdf figure carries the two delay-budget requirement lines at
exactly 20 ms (black) and 100 ms (red) in data coordinates.  Figures are
rendered headless and saved as SVG next to the CSV/JSON artifacts.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import Histogram  # noqa: E402

PDB_LINES = ((20.0, "black"), (100.0, "red"))


def latency_pdf_figure(hist: Histogram, title: str, x_max_ms: float | None = None):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    _draw_pdf(ax, hist, title, x_max_ms)
    fig.tight_layout()
    return fig


def _draw_pdf(ax, hist: Histogram, title: str, x_max_ms: float | None = None) -> None:
    centers = (hist.edges[:-1] + hist.edges[1:]) / 2.0
    if hist.empty:
        ax.text(0.5, 0.5, "no samples", transform=ax.transAxes,
                ha="center", va="center", color="gray")
    else:
        ax.plot(centers, hist.density, lw=1.0, color="tab:blue")
        ax.fill_between(centers, hist.density, alpha=0.25, color="tab:blue")
    for x, color in PDB_LINES:
        ax.axvline(x=x, color=color, lw=1.2)
    if x_max_ms is None:
        if hist.empty:
            x_max_ms = 120.0
        else:
            nz = hist.counts.nonzero()[0]
            upper = hist.edges[nz[-1] + 1] if len(nz) else 120.0
            x_max_ms = max(120.0, float(upper) * 1.05)
    ax.set_xlim(0, x_max_ms)
    ax.set_xlabel("latency (ms)")
    ax.set_ylabel("pdf (1/ms)")
    ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)


def matrix_grid_figure(cells: dict[tuple[int, int], Histogram],
                       rsu_counts: list[int], lambdas: list[int]):
    """One subplot per (RSU count, density) cell, RSU count down the rows."""
    nrows, ncols = len(rsu_counts), len(lambdas)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 2.6 * nrows),
                             squeeze=False)
    for i, r in enumerate(rsu_counts):
        for j, lam in enumerate(lambdas):
            ax = axes[i][j]
            hist = cells.get((r, lam))
            if hist is None:
                ax.set_axis_off()
                continue
            _draw_pdf(ax, hist, f"{r} RSU{'s' if r > 1 else ''}, {lam} veh/lane")
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, format="svg")
    plt.close(fig)
