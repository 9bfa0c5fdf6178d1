"""Shared plotting style. Everything deterministic: fixed salt for SVG ids,
no embedded dates, explicit sizes."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import CenteredNorm, Normalize

LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def apply_style():
    plt.rcdefaults()
    plt.rcParams.update({
        "svg.hashsalt": "figrender",
        "figure.dpi": 100,
        "font.size": 9,
        "axes.titlesize": 9,
        "axes.labelsize": 9,
        "legend.fontsize": 8,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.linewidth": 1.4,
    })


def density_scale(values, cmap):
    """Color map and norm for a phase-space grid.

    Signed data (any negative entry) gets a diverging map centered at zero so
    negativity is visually unambiguous; nonnegative data gets the sequential
    map.
    """
    lo = float(values.min())
    hi = float(values.max())
    if lo < 0:
        return "RdBu_r", CenteredNorm(vcenter=0.0, halfrange=max(hi, -lo))
    return cmap, Normalize(vmin=0.0, vmax=hi)


def save(fig, path, fmt, dpi):
    if fmt == "svg":
        fig.savefig(path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(path, format="png", dpi=dpi,
                    metadata={"Software": "figrender"})
    plt.close(fig)
