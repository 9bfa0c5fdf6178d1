"""Figure assembly from verified CSV inputs.

One render function per figure id. Each pulls the files it needs from the
verified manifest listing, checks the columns it is about to use, and never
writes anything back into the input directory.
"""

import os
from dataclasses import dataclass, field

import matplotlib.pyplot as plt
import numpy as np

from .errors import RenderError
from .io import read_matrix, read_table, require, verified_paths
from .style import LINE_COLORS, apply_style, density_scale, save

FORMATS = ("png", "svg")


@dataclass
class FigureSpec:
    figure: int
    in_dir: str
    out_path: str
    fmt: str = "png"
    cmap: str = "viridis"
    contour_levels: int = 7
    log_insets: bool = True
    dpi: int = 150
    csv_paths: dict = field(default_factory=dict)


def render(spec):
    """Render the figure described by `spec` and return the output path."""
    if spec.figure not in (1, 2, 3, 4):
        raise RenderError("figure must be 1..4, got %r" % (spec.figure,))
    if spec.fmt not in FORMATS:
        raise RenderError("format must be one of %s" % (FORMATS,))
    manifest, paths = verified_paths(spec.in_dir, spec.figure)
    spec.csv_paths = paths
    apply_style()
    fig = _RENDERERS[spec.figure](spec, manifest, paths)
    out_dir = os.path.dirname(os.path.abspath(spec.out_path))
    os.makedirs(out_dir, exist_ok=True)
    save(fig, spec.out_path, spec.fmt, spec.dpi)
    return spec.out_path


def _table(paths, name, *columns):
    if name not in paths:
        raise RenderError("manifest lists no %s" % name)
    return require(read_table(paths[name]), paths[name], *columns)


def _heatmap(ax, spec, path, title, xlabel, ylabel):
    xs, ps, values = read_matrix(path)
    cmap, norm = density_scale(values, spec.cmap)
    mesh = ax.pcolormesh(xs, ps, values.T, cmap=cmap, norm=norm,
                         shading="auto", rasterized=True)
    if spec.contour_levels > 0:
        ax.contour(xs, ps, values.T, levels=spec.contour_levels,
                   colors="k", linewidths=0.4, alpha=0.5)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(False)
    return mesh


def _distribution(ax, spec, table, title):
    n = table["n"]
    p = table["probability"]
    ax.bar(n, p, width=0.85, color=LINE_COLORS[0])
    ax.set_title(title)
    ax.set_xlabel("n")
    ax.set_ylabel("P(n)")
    if spec.log_insets:
        inset = ax.inset_axes([0.42, 0.42, 0.54, 0.52])
        keep = p > 0
        inset.semilogy(n[keep], p[keep], ".-", color=LINE_COLORS[1],
                       markersize=3, linewidth=0.8)
        inset.tick_params(labelsize=6)
        inset.grid(True, alpha=0.3)


def _render_figure1(spec, manifest, paths):
    fig = plt.figure(figsize=(14.0, 6.8))
    xi_mid = manifest.get("figure_xi")
    xi_max = manifest.get("config", {}).get("xi_max")

    ax = fig.add_subplot(2, 4, 1, projection="3d")
    xa, xb, dens = read_matrix(paths["joint_quadrature_density.csv"])
    ga, gb = np.meshgrid(xa, xb, indexing="ij")
    ax.plot_surface(ga, gb, dens, cmap=spec.cmap, linewidth=0,
                    antialiased=False, rcount=len(xa), ccount=len(xb))
    ax.set_title("joint quadrature density")
    ax.set_xlabel("$X_A$")
    ax.set_ylabel("$X_B$")

    _distribution(fig.add_subplot(2, 4, 2), spec,
                  _table(paths, "photon_distribution_tps.csv",
                         "n", "probability"),
                  "TPS photon distribution" +
                  ("" if xi_mid is None else " (xi=%g)" % xi_mid))
    _distribution(fig.add_subplot(2, 4, 3), spec,
                  _table(paths, "photon_distribution_sodc.csv",
                         "n", "probability"),
                  "SODC photon distribution")

    ax = fig.add_subplot(2, 4, 4)
    marg = _table(paths, "marginal_distributions.csv", "x", "vacuum", "sodc",
                  "tps_low", "tps_mid", "tps_high")
    labels = ("vacuum", "SODC", "TPS low", "TPS mid", "TPS high")
    for i, col in enumerate(("vacuum", "sodc", "tps_low", "tps_mid",
                             "tps_high")):
        ax.plot(marg["x"], marg[col], color=LINE_COLORS[i], label=labels[i])
    ax.set_title("quadrature marginals")
    ax.set_xlabel("$X_A$")
    ax.set_ylabel("density")
    ax.legend()

    ax = fig.add_subplot(2, 4, 5)
    nbar = _table(paths, "mean_photon_number.csv", "xi", "tps", "sodc")
    ax.plot(nbar["xi"], nbar["tps"], color=LINE_COLORS[0], label="TPS")
    ax.plot(nbar["xi"], nbar["sodc"], color=LINE_COLORS[1], label="SODC")
    ax.set_title("mean photon number")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$\bar{n}$")
    ax.legend()

    ax = fig.add_subplot(2, 4, 6)
    mandel = _table(paths, "mandel_q.csv", "xi", "tps", "sodc")
    ax.plot(mandel["xi"], mandel["tps"], color=LINE_COLORS[0], label="TPS")
    ax.plot(mandel["xi"], mandel["sodc"], color=LINE_COLORS[1], label="SODC")
    ax.set_title("Mandel Q")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("Q")
    ax.legend()

    m1 = _heatmap(fig.add_subplot(2, 4, 7), spec,
                  paths["wigner_mode_a_tps.csv"], "TPS Wigner, mode A",
                  "$X_A$", "$P_A$")
    fig.colorbar(m1, ax=fig.axes[-1], shrink=0.8)
    m2 = _heatmap(fig.add_subplot(2, 4, 8), spec,
                  paths["wigner_mode_a_sodc.csv"], "SODC Wigner, mode A",
                  "$X_A$", "$P_A$")
    fig.colorbar(m2, ax=fig.axes[-1], shrink=0.8)
    _suptitle(fig, manifest)
    fig.tight_layout()
    return fig


def _render_figure2(spec, manifest, paths):
    fig, (left, right) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    qre = _table(paths, "qre.csv", "xi", "delta_full", "delta_pair",
                 "delta_single", "sodc_delta_full")
    left.plot(qre["xi"], qre["delta_full"], color=LINE_COLORS[0],
              label=r"$\delta(\rho_{ABC})$")
    left.plot(qre["xi"], qre["delta_pair"], color=LINE_COLORS[1],
              label=r"$\delta(\rho_{AB})$")
    left.plot(qre["xi"], qre["delta_single"], color=LINE_COLORS[2],
              label=r"$\delta(\rho_A)$")
    left.plot(qre["xi"], qre["sodc_delta_full"], "--", color="0.4",
              label="SODC (zero)")
    left.set_title("relative entropy of non-Gaussianity")
    left.set_xlabel(r"$\xi$")
    left.set_ylabel(r"$\delta$")
    left.legend()

    neg = _table(paths, "negativity.csv", "xi", "log_negativity_tps",
                 "log_negativity_sodc", "log_negativity_pair_reduced",
                 "nu_min_a", "nu_min_b", "nu_min_c")
    right.plot(neg["xi"], neg["log_negativity_tps"], color=LINE_COLORS[0],
               label=r"$E_N$ TPS $A|BC$")
    right.plot(neg["xi"], neg["log_negativity_sodc"], color=LINE_COLORS[1],
               label=r"$E_N$ SODC")
    right.plot(neg["xi"], neg["log_negativity_pair_reduced"],
               color=LINE_COLORS[2], label=r"$E_N$ reduced $A|B$")
    right.set_title("entanglement and Gaussian witness")
    right.set_xlabel(r"$\xi$")
    right.set_ylabel(r"$E_N$")
    nu = np.minimum(neg["nu_min_a"], np.minimum(neg["nu_min_b"],
                                                neg["nu_min_c"]))
    twin = right.twinx()
    twin.plot(neg["xi"], nu, "--", color="0.35", label=r"$\nu_-$")
    twin.axhline(0.5, color="0.35", linewidth=0.8, alpha=0.6)
    twin.set_ylabel(r"$\nu_-$")
    twin.grid(False)
    lines, labels = right.get_legend_handles_labels()
    tline, tlabel = twin.get_legend_handles_labels()
    right.legend(lines + tline, labels + tlabel, loc="upper left")
    _suptitle(fig, manifest)
    fig.tight_layout()
    return fig


def _render_figure3(spec, manifest, paths):
    fig = plt.figure(figsize=(13.0, 6.4))
    grid = fig.add_gridspec(2, 12)

    ax = fig.add_subplot(grid[0, 0:4])
    sweep = _table(paths, "conditional_sweep_xc.csv", "xc", "density",
                   "log_negativity", "steering")
    ax.plot(sweep["xc"], sweep["log_negativity"], color=LINE_COLORS[0],
            label=r"$E_N$")
    ax.plot(sweep["xc"], sweep["density"], color=LINE_COLORS[2],
            label="outcome density")
    ax.set_title("conditioned pair vs outcome")
    ax.set_xlabel("$X_C$")
    ax.legend()

    vs = _table(paths, "conditional_vs_xi.csv", "xi", "xc", "log_negativity",
                "steering")
    values = sorted(set(vs["xc"]))
    ax = fig.add_subplot(grid[0, 4:8])
    for i, xc in enumerate(values):
        sel = vs["xc"] == xc
        ax.plot(vs["xi"][sel], vs["log_negativity"][sel],
                color=LINE_COLORS[i % len(LINE_COLORS)],
                label="$X_C=%g$" % xc)
    ax.set_title("conditional entanglement")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$E_N$")
    ax.legend()

    ax = fig.add_subplot(grid[0, 8:12])
    for i, xc in enumerate(values):
        sel = vs["xc"] == xc
        ax.plot(vs["xi"][sel], vs["steering"][sel],
                color=LINE_COLORS[i % len(LINE_COLORS)],
                label="$X_C=%g$" % xc)
    ax.axhline(1.0, color="0.3", linewidth=0.8)
    ax.set_title("steering parameter")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("R")
    ax.legend()

    wigners = sorted(n for n in paths if n.startswith("conditional_wigner"))
    for i, name in enumerate(wigners[:4]):
        label = name[len("conditional_wigner_"):-len(".csv")]
        mesh = _heatmap(fig.add_subplot(grid[1, 3 * i:3 * i + 3]), spec,
                        paths[name], "conditional Wigner, %s" % label,
                        "$X_A$", "$P_A$")
        fig.colorbar(mesh, ax=fig.axes[-1], shrink=0.85)
    _suptitle(fig, manifest)
    fig.tight_layout()
    return fig


def _render_figure4(spec, manifest, paths):
    fig = plt.figure(figsize=(13.0, 9.2))
    grid = fig.add_gridspec(3, 4)
    for i in range(4):
        name = "slice_xx_xc%d.csv" % i
        if name in paths:
            mesh = _heatmap(fig.add_subplot(grid[0, i]), spec, paths[name],
                            "$W(X_A, X_B)$, $X_C=%d$" % i, "$X_A$", "$X_B$")
            fig.colorbar(mesh, ax=fig.axes[-1], shrink=0.85)
    for i in range(4):
        name = "slice_pp_xc%d.csv" % i
        if name in paths:
            mesh = _heatmap(fig.add_subplot(grid[1, i]), spec, paths[name],
                            "$W(P_A, P_B)$, $X_C=%d$" % i, "$P_A$", "$P_B$")
            fig.colorbar(mesh, ax=fig.axes[-1], shrink=0.85)
    if "slice_xp_xc3.csv" in paths:
        mesh = _heatmap(fig.add_subplot(grid[2, 0:2]), spec,
                        paths["slice_xp_xc3.csv"],
                        "$W(X_A, P_B)$, $X_C=3$", "$X_A$", "$P_B$")
        fig.colorbar(mesh, ax=fig.axes[-1], shrink=0.85)
    ax = fig.add_subplot(grid[2, 2:4])
    corr = _table(paths, "correlations.csv", "xc", "x_correlation",
                  "p_correlation")
    ax.plot(corr["xc"], corr["x_correlation"], "o-", color=LINE_COLORS[0],
            label=r"$\mathrm{corr}(X_A, X_B)$")
    ax.plot(corr["xc"], corr["p_correlation"], "s-", color=LINE_COLORS[1],
            label=r"$\mathrm{corr}(P_A, P_B)$")
    ax.axhline(0.0, color="0.3", linewidth=0.8)
    ax.set_title("conditional quadrature correlations")
    ax.set_xlabel("$X_C$")
    ax.legend()
    _suptitle(fig, manifest)
    fig.tight_layout()
    return fig


def _suptitle(fig, manifest):
    parts = ["figure %s" % manifest.get("figure", "?")]
    if manifest.get("engine"):
        parts.append("engine %s" % manifest["engine"])
    if manifest.get("config_hash"):
        parts.append("config %s" % manifest["config_hash"][:8])
    fig.suptitle(", ".join(parts), fontsize=8, color="0.35", x=0.99,
                 ha="right")


_RENDERERS = {1: _render_figure1, 2: _render_figure2, 3: _render_figure3,
              4: _render_figure4}
