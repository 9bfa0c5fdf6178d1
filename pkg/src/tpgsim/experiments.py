"""Reproduction workflows: the four figure datasets, snapshots and caching.

Each run_figureN function computes one figure's worth of CSV files plus a
JSON manifest into an output directory. The triple-process engine is
selectable (quantized pump by default; the classical-pump engine is kept for
comparison but its absolute-sum entanglement measure does not converge with
cutoff above xi of about 0.4, see README). The pairwise reference process is
always evaluated with the classical pump, which is the regime its closed
forms describe.

CSV files are plain UTF-8 with LF line endings, '.' decimal separator and
shortest-roundtrip float formatting; scalar tables carry the config hash so a
file can be traced to the parameters that made it. Manifests list a sha256
per data file. Caching stores finished figure directories keyed by the
physics part of the configuration; timestamps live only in manifests, so
cached and fresh runs produce bit-identical data files.
"""

import csv
import datetime
import functools
import hashlib
import json
import os
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import kernels
from .baselines import (perturbative_total_photons, perturbative_tps,
                        scaling_residual)
from .conditioning import (conditional_state_correlated,
                           conditional_sweep_correlated, homodyne_project)
from .dynamics import (HamiltonianSpec, build_hamiltonian,
                       classical_coefficients, correlated_pure_state,
                       cutoff_audit, evolve, pump_sector_amplitudes,
                       pump_traced_matrix, sector_audit, xi_to_time)
from .errors import ConfigError, TruncationError
from .fock import (ModeLayout, coherent_state, product_state, read_snapshot,
                   vacuum_state, write_snapshot)
from .gaussian import CovarianceMatrix, covariance_of, ppt_min_symplectic
from .measures import (PhotonStatistics, correlated_measures,
                       photon_statistics, wigner_slice)

_ENGINES = ("quantized", "classical")
_NON_PHYSICS = ("out_dir", "cache_dir", "threads", "use_cache")


@dataclass
class ExperimentConfig:
    """Parameters of a reproduction run.

    Physics fields feed the config hash; out_dir, cache_dir, threads and
    use_cache do not, so runs that only differ in plumbing share cache
    entries and produce identical data files.
    """

    engine: str = "quantized"
    coupling: float = 1.0
    pump_amplitude: float = 4.0
    triplet_cutoff: int = 48
    pump_cutoff: int = 56
    pair_cutoff: int = 24
    conditional_cutoff: int = 96
    xi_max: float = 0.7
    xi_step: float = 0.02
    figure_xi: float = 0.5
    conditional_xi: float = 0.3
    conditional_xc_max: float = 3.5
    conditional_xc_step: float = 0.05
    conditional_xc_values: tuple = (0.0, 1.0, 2.0, 3.0)
    wigner_range: float = 3.5
    wigner_points: int = 121
    slice_range: float = 3.5
    slice_points: int = 81
    joint_range: float = 4.0
    joint_points: int = 41
    marginal_range: float = 7.0
    marginal_points: int = 561
    audit_threshold: float = 1e-6
    seed: int = 0
    out_dir: str = "results"
    cache_dir: str = ""
    threads: int = 1
    use_cache: bool = True

    def __post_init__(self):
        if self.engine not in _ENGINES:
            raise ConfigError("engine must be one of %s" % (_ENGINES,))
        for name in ("triplet_cutoff", "pump_cutoff", "pair_cutoff",
                     "conditional_cutoff", "wigner_points", "slice_points",
                     "joint_points", "marginal_points"):
            if getattr(self, name) < 3:
                raise ConfigError("%s must be at least 3" % name)
        if not 0 < self.xi_step <= self.xi_max:
            raise ConfigError("xi grid is empty")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        self.conditional_xc_values = tuple(float(v)
                                           for v in self.conditional_xc_values)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % sorted(unknown))
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError("cannot read config %s: %s" % (path, exc))
        except ValueError as exc:
            raise ConfigError("config %s is not valid JSON: %s" % (path, exc))
        if not isinstance(data, dict):
            raise ConfigError("config %s must hold a JSON object" % path)
        return cls.from_dict(data)

    def physics_dict(self):
        out = asdict(self)
        for key in _NON_PHYSICS:
            out.pop(key)
        return out

    def config_hash(self):
        blob = json.dumps(self.physics_dict(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def xi_grid(self):
        n = int(round(self.xi_max / self.xi_step))
        return np.round(np.arange(0, n + 1) * self.xi_step, 12)

    def conditional_xi_grid(self):
        # starts one step in: at xi = 0 nothing is entangled and the
        # conditional-variance product is exactly 1
        return self.xi_grid()[1:]

    def xc_grid(self):
        n = int(round(self.conditional_xc_max / self.conditional_xc_step))
        return np.round(np.arange(0, n + 1) * self.conditional_xc_step, 12)


# ---------------------------------------------------------------------------
# engine adapters: everything downstream consumes a correlated matrix

@functools.lru_cache(maxsize=256)
def _sector_matrix(xi, coupling, alpha_p, interaction, d_signal, d_pump):
    spec = HamiltonianSpec(interaction=interaction, pump="quantized",
                           coupling=coupling, pump_amplitude=alpha_p)
    table = pump_sector_amplitudes(xi, spec, d_signal, d_pump)
    return table, pump_traced_matrix(table)


def tps_matrix(config, xi, cutoff=None, pump_cutoff=None):
    """Correlated matrix of the triple process at strength xi.

    Quantized engine: the pump-traced sector matrix R (trace just below 1 by
    the retained Poisson mass). Classical engine: the pure coefficient vector.
    Both feed correlated_measures directly.
    """
    d = cutoff or config.triplet_cutoff
    if config.engine == "classical":
        c = classical_coefficients(xi, d, "tpg")
        tail = float(np.sum(c[-2:] ** 2))
        if tail > config.audit_threshold:
            raise TruncationError(
                "classical ladder holds %.3e probability in its top levels "
                "at xi=%g" % (tail, xi), mode="A",
                suggested_cutoff=int(1.5 * d))
        return c
    table, R = _sector_matrix(float(xi), config.coupling,
                              config.pump_amplitude, "tpg", d,
                              pump_cutoff or config.pump_cutoff)
    audit = sector_audit(table)
    worst = max(audit.values())
    if worst > config.audit_threshold:
        raise TruncationError(
            "sector table leaks %.3e probability at xi=%g" % (worst, xi),
            mode="P" if audit["pump"] >= audit["triplet"] else "A",
            suggested_cutoff=int(1.5 * d))
    return R


def sodc_coefficients(config, xi, cutoff=None):
    """Pure pair-process coefficients (classical pump, the closed-form regime)."""
    return classical_coefficients(xi, cutoff or config.pair_cutoff, "sodc")


def _tps_measures(config, xi, cutoff=None, pump_cutoff=None):
    return correlated_measures(tps_matrix(config, xi, cutoff, pump_cutoff), 3)


def _probs_joint_density(probs, xs, ys):
    # rho_AB of a correlated state is sum p_n |nn><nn|, so the joint density
    # factorizes level by level
    d = len(probs)
    ha = kernels.hermite_table(np.asarray(xs, dtype=np.float64), d) ** 2
    hb = kernels.hermite_table(np.asarray(ys, dtype=np.float64), d) ** 2
    return (ha * probs) @ hb.T


# ---------------------------------------------------------------------------
# table and manifest plumbing

class ResultTable:
    """Column-ordered scalar table with deterministic CSV serialization."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ConfigError("row width %d does not match %d columns"
                              % (len(values), len(self.columns)))
        self.rows.append(list(values))

    @staticmethod
    def _cell(value):
        if isinstance(value, (float, np.floating)):
            return repr(float(value))
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        return str(value)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([self._cell(v) for v in row])


def write_matrix_csv(path, row_axis, col_axis, values, corner="x\\y"):
    """Matrix CSV: header row holds the column axis, first column the rows."""
    values = np.asarray(values)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([corner] + [repr(float(v)) for v in col_axis])
        for x, row in zip(row_axis, values):
            writer.writerow([repr(float(x))] + [repr(float(v)) for v in row])


def read_table_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    return header, rows


def _sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, figure, config, file_names, extras=None):
    manifest = {
        "figure": figure,
        "config": config.physics_dict(),
        "config_hash": config.config_hash(),
        "created_utc": datetime.datetime.utcnow().isoformat() + "Z",
        "files": {name: {"sha256": _sha256_file(os.path.join(out_dir, name))}
                  for name in sorted(file_names)},
    }
    if extras:
        manifest.update(extras)
    path = os.path.join(out_dir, "%s.manifest.json" % figure)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _cache_root(config):
    env = os.environ.get("TPG_CACHE_DIR", "").strip()
    return config.cache_dir or env


def _cache_lookup(config, figure, out_dir):
    root = _cache_root(config)
    if not root or not config.use_cache:
        return None
    slot = os.path.join(root, "%s-%s" % (figure, config.config_hash()[:16]))
    manifest_path = os.path.join(slot, "%s.manifest.json" % figure)
    if not os.path.isfile(manifest_path):
        return None
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    for name, meta in manifest.get("files", {}).items():
        src = os.path.join(slot, name)
        if not os.path.isfile(src) or _sha256_file(src) != meta["sha256"]:
            return None  # stale or corrupt entry: recompute
    os.makedirs(out_dir, exist_ok=True)
    for name in manifest["files"]:
        shutil.copy2(os.path.join(slot, name), os.path.join(out_dir, name))
    shutil.copy2(manifest_path, os.path.join(out_dir, "%s.manifest.json" % figure))
    return manifest


def _cache_store(config, figure, out_dir, manifest):
    root = _cache_root(config)
    if not root or not config.use_cache:
        return
    slot = os.path.join(root, "%s-%s" % (figure, config.config_hash()[:16]))
    os.makedirs(slot, exist_ok=True)
    for name in manifest["files"]:
        shutil.copy2(os.path.join(out_dir, name), os.path.join(slot, name))
    shutil.copy2(os.path.join(out_dir, "%s.manifest.json" % figure),
                 os.path.join(slot, "%s.manifest.json" % figure))


# ---------------------------------------------------------------------------
# figure runners

def run_figure1(config, out_dir=None):
    """Photon statistics and single-mode phase space of both processes."""
    out_dir = out_dir or config.out_dir
    cached = _cache_lookup(config, "figure1", out_dir)
    if cached is not None:
        return cached
    os.makedirs(out_dir, exist_ok=True)
    h = config.config_hash()[:16]
    xi0 = config.figure_xi
    files = []

    tps0 = _tps_measures(config, xi0)
    sodc0 = PhotonStatistics.from_probs(
        sodc_coefficients(config, xi0) ** 2)
    tps_stats = PhotonStatistics.from_probs(tps0.probs)

    grid = np.linspace(-config.joint_range, config.joint_range,
                       config.joint_points)
    joint = _probs_joint_density(tps0.probs, grid, grid)
    write_matrix_csv(os.path.join(out_dir, "joint_quadrature_density.csv"),
                     grid, grid, joint, corner="x_a\\x_b")
    files.append("joint_quadrature_density.csv")

    t = ResultTable(["n", "probability", "config_hash"])
    for n, p in enumerate(tps_stats.probs):
        t.add(n, p, h)
    t.write(os.path.join(out_dir, "photon_distribution_tps.csv"))
    files.append("photon_distribution_tps.csv")

    t = ResultTable(["n", "probability", "config_hash"])
    for n, p in enumerate(sodc0.probs):
        t.add(n, p, h)
    t.write(os.path.join(out_dir, "photon_distribution_sodc.csv"))
    files.append("photon_distribution_sodc.csv")

    xs = np.linspace(-config.marginal_range, config.marginal_range,
                     config.marginal_points)
    hermite2 = None
    t = ResultTable(["x", "vacuum", "sodc", "tps_low", "tps_mid", "tps_high",
                     "config_hash"])
    vac = np.exp(-xs ** 2) / np.sqrt(np.pi)
    cols = [vac]
    d_pair = config.pair_cutoff
    tab_pair = kernels.hermite_table(xs, d_pair) ** 2
    cols.append(tab_pair @ (sodc_coefficients(config, xi0) ** 2))
    tab_trip = kernels.hermite_table(xs, config.triplet_cutoff) ** 2
    for xi in (0.3, xi0, config.xi_max):
        cols.append(tab_trip @ _tps_measures(config, xi).probs)
    for i, x in enumerate(xs):
        t.add(x, cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i], h)
    t.write(os.path.join(out_dir, "marginal_distributions.csv"))
    files.append("marginal_distributions.csv")

    t = ResultTable(["xi", "tps", "sodc", "config_hash"])
    q = ResultTable(["xi", "tps", "sodc", "config_hash"])
    for xi in config.xi_grid():
        ts = PhotonStatistics.from_probs(_tps_measures(config, xi).probs) \
            if xi > 0 else None
        ss = PhotonStatistics.from_probs(sodc_coefficients(config, xi) ** 2) \
            if xi > 0 else None
        t.add(xi, ts.nbar if ts else 0.0, ss.nbar if ss else 0.0, h)
        q.add(xi, ts.mandel_q if ts else 0.0, ss.mandel_q if ss else 0.0, h)
    t.write(os.path.join(out_dir, "mean_photon_number.csv"))
    files.append("mean_photon_number.csv")
    q.write(os.path.join(out_dir, "mandel_q.csv"))
    files.append("mandel_q.csv")

    w_axis = np.linspace(-config.wigner_range, config.wigner_range,
                         config.wigner_points)
    r2 = (w_axis[:, None] ** 2 + w_axis[None, :] ** 2).ravel()
    tab = kernels.laguerre_wigner_table(r2, config.triplet_cutoff)
    w_tps = (tab @ tps0.probs).reshape(len(w_axis), len(w_axis))
    write_matrix_csv(os.path.join(out_dir, "wigner_mode_a_tps.csv"),
                     w_axis, w_axis, w_tps, corner="x\\p")
    files.append("wigner_mode_a_tps.csv")
    tab = kernels.laguerre_wigner_table(r2, d_pair)
    w_sodc = (tab @ (sodc_coefficients(config, xi0) ** 2)).reshape(
        len(w_axis), len(w_axis))
    write_matrix_csv(os.path.join(out_dir, "wigner_mode_a_sodc.csv"),
                     w_axis, w_axis, w_sodc, corner="x\\p")
    files.append("wigner_mode_a_sodc.csv")

    extras = {"figure_xi": xi0,
              "engine": config.engine,
              "statistics": {
                  "tps_nbar": float(tps_stats.nbar),
                  "tps_mandel_q": float(tps_stats.mandel_q),
                  "sodc_nbar": float(sodc0.nbar),
                  "sodc_mandel_q": float(sodc0.mandel_q)}}
    manifest = _write_manifest(out_dir, "figure1", config, files, extras)
    _cache_store(config, "figure1", out_dir, manifest)
    return manifest


def run_figure2(config, out_dir=None):
    """NonGaussianity hierarchy, entanglement and the perturbative benchmark."""
    out_dir = out_dir or config.out_dir
    cached = _cache_lookup(config, "figure2", out_dir)
    if cached is not None:
        return cached
    os.makedirs(out_dir, exist_ok=True)
    h = config.config_hash()[:16]
    files = []

    qre_t = ResultTable(["xi", "delta_full", "delta_pair", "delta_single",
                         "entropy_full", "entropy_single",
                         "sodc_delta_full", "sodc_delta_single",
                         "config_hash"])
    neg_t = ResultTable(["xi", "log_negativity_tps", "log_negativity_sodc",
                         "log_negativity_pair_reduced",
                         "nu_min_a", "nu_min_b", "nu_min_c", "config_hash"])
    for xi in config.xi_grid():
        if xi == 0:
            qre_t.add(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h)
            neg_t.add(0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5, h)
            continue
        m = _tps_measures(config, xi)
        sodc = correlated_measures(sodc_coefficients(config, xi), 2)
        qre_t.add(xi, m.delta_full, m.delta_pair, m.delta_single,
                  m.entropy, m.entropy_reduced,
                  sodc.delta_full, sodc.delta_single, h)
        # the full-state covariance is a product of thermal modes, so every
        # bipartition shares the same partial-transpose spectrum; built
        # explicitly and pushed through the symplectic machinery anyway
        V = m.nbar + 0.5
        cov = CovarianceMatrix(np.eye(6) * V, np.zeros(6), ("A", "B", "C"))
        nus = [ppt_min_symplectic(cov, (l,)) for l in ("A", "B", "C")]
        # the two-mode reduction is diagonal in the number basis, so its
        # partial transpose is the state itself: trace norm 1, measure 0
        pair_reduced = 0.0
        s = sodc_coefficients(config, xi)
        neg_t.add(xi, m.log_negativity,
                  float(np.log(np.abs(np.outer(s, s)).sum())),
                  pair_reduced, nus[0], nus[1], nus[2], h)
    qre_t.write(os.path.join(out_dir, "qre.csv"))
    files.append("qre.csv")
    neg_t.write(os.path.join(out_dir, "negativity.csv"))
    files.append("negativity.csv")

    scaling_rows = []
    sc_t = ResultTable(["xi", "engine", "lhs", "rhs", "residual",
                        "config_hash"])
    for xi in (0.1, config.conditional_xi):
        for engine in _ENGINES:
            if engine == "classical":
                m = correlated_measures(
                    classical_coefficients(xi, config.triplet_cutoff, "tpg"), 3)
            else:
                m = correlated_measures(
                    _sector_matrix(float(xi), config.coupling,
                                   config.pump_amplitude, "tpg",
                                   config.triplet_cutoff,
                                   config.pump_cutoff)[1], 3)
            lhs, rhs, res = scaling_residual(m.delta_full, m.delta_pair,
                                             m.delta_single)
            sc_t.add(xi, engine, lhs, rhs, res, h)
            scaling_rows.append({"xi": float(xi), "engine": engine,
                                 "lhs": float(lhs), "rhs": float(rhs),
                                 "residual": float(res)})
    sc_t.write(os.path.join(out_dir, "scaling_diagnostic.csv"))
    files.append("scaling_diagnostic.csv")

    pb_t = ResultTable(["xi", "lambda", "n_total_evolved", "n_total_compact",
                        "n_total_series", "fidelity_compact",
                        "fidelity_series", "config_hash"])
    for xi in (0.1, 0.2, 0.3):
        m = _tps_measures(config, xi)
        R = tps_matrix(config, xi)
        if R.ndim == 1:
            R = np.outer(R, R)
        Rn = R / np.trace(R)
        n_tot = 3.0 * m.nbar
        row = [xi, perturbative_total_photons(xi), n_tot]
        fids = []
        for form in ("compact", "series"):
            p = perturbative_tps(xi, form).coefficients
            n_form = 3.0 * float(np.sum(np.arange(3) * p ** 2))
            row.append(n_form)
            fids.append(float(p @ Rn[:3, :3] @ p))
        row.extend(fids)
        row.append(h)
        pb_t.add(*row)
    pb_t.write(os.path.join(out_dir, "perturbative_benchmark.csv"))
    files.append("perturbative_benchmark.csv")

    extras = {"engine": config.engine, "scaling_relation": scaling_rows}
    manifest = _write_manifest(out_dir, "figure2", config, files, extras)
    _cache_store(config, "figure2", out_dir, manifest)
    return manifest


def _conditional_source(config, xi=None):
    """State the conditioning figures slice: the pure classical state at the
    conditional cutoff. The quantized engine's conditional scalars live in
    the vs-xi table instead, where the closed forms apply."""
    return classical_coefficients(xi if xi is not None else
                                  config.conditional_xi,
                                  config.conditional_cutoff, "tpg")


def run_figure3(config, out_dir=None):
    """Conditional preparation: sweeps over the outcome and over strength."""
    out_dir = out_dir or config.out_dir
    cached = _cache_lookup(config, "figure3", out_dir)
    if cached is not None:
        return cached
    os.makedirs(out_dir, exist_ok=True)
    h = config.config_hash()[:16]
    files = []

    c = _conditional_source(config)
    sweep = conditional_sweep_correlated(c, config.xc_grid())
    t = ResultTable(["xc", "density", "log_negativity", "steering",
                     "delta_pair", "delta_single", "entropy", "nbar",
                     "config_hash"])
    for r in sweep:
        t.add(r.x, r.density, r.log_negativity, r.steering, r.delta_pair,
              r.delta_single, r.entropy, r.nbar, h)
    t.write(os.path.join(out_dir, "conditional_sweep_xc.csv"))
    files.append("conditional_sweep_xc.csv")

    t = ResultTable(["xi", "xc", "density", "log_negativity", "steering",
                     "delta_pair", "delta_single", "config_hash"])
    for xi in config.conditional_xi_grid():
        R = tps_matrix(config, xi)
        res = conditional_sweep_correlated(R, config.conditional_xc_values)
        for r in res:
            t.add(xi, r.x, r.density, r.log_negativity, r.steering,
                  r.delta_pair, r.delta_single, h)
    t.write(os.path.join(out_dir, "conditional_vs_xi.csv"))
    files.append("conditional_vs_xi.csv")

    w_axis = np.linspace(-config.wigner_range, config.wigner_range,
                         config.wigner_points)
    r2 = (w_axis[:, None] ** 2 + w_axis[None, :] ** 2).ravel()
    tab = kernels.laguerre_wigner_table(r2, config.conditional_cutoff)
    for xc in config.conditional_xc_values:
        Rt = conditional_state_correlated(c, xc)
        w = (tab @ np.diag(Rt)).reshape(len(w_axis), len(w_axis))
        name = "conditional_wigner_xc%g.csv" % xc
        write_matrix_csv(os.path.join(out_dir, name), w_axis, w_axis, w,
                         corner="x\\p")
        files.append(name)

    extras = {"engine": config.engine,
              "conditional_xi": config.conditional_xi,
              "sweep_engine": "classical",
              "vs_xi_engine": config.engine}
    manifest = _write_manifest(out_dir, "figure3", config, files, extras)
    _cache_store(config, "figure3", out_dir, manifest)
    return manifest


def run_figure4(config, out_dir=None):
    """Two-mode phase-space sections of the conditional state."""
    out_dir = out_dir or config.out_dir
    cached = _cache_lookup(config, "figure4", out_dir)
    if cached is not None:
        return cached
    os.makedirs(out_dir, exist_ok=True)
    h = config.config_hash()[:16]
    files = []

    c = _conditional_source(config)
    psi = correlated_pure_state(c, "tpg")
    axis = np.linspace(-config.slice_range, config.slice_range,
                       config.slice_points)
    corr_t = ResultTable(["xc", "x_correlation", "p_correlation", "nbar",
                          "pair_moment", "config_hash"])

    for xc in config.conditional_xc_values:
        cond, _ = homodyne_project(psi, "C", xc)
        cov = covariance_of(cond, ("A", "B"))
        stats = photon_statistics(cond, "A")
        pm = 0.5 * (cov.matrix[0, 2] - cov.matrix[1, 3])
        corr_t.add(xc, cov.matrix[0, 2], cov.matrix[1, 3], stats.nbar, pm, h)
        for plane in ("xx", "pp"):
            w = wigner_slice(cond, ("A", "B"), plane, axis, axis)
            name = "slice_%s_xc%g.csv" % (plane, xc)
            write_matrix_csv(os.path.join(out_dir, name), axis, axis,
                             w.values, corner=plane[0] + "\\" + plane[1])
            files.append(name)
    xc_last = config.conditional_xc_values[-1]
    cond, _ = homodyne_project(psi, "C", xc_last)
    w = wigner_slice(cond, ("A", "B"), "xp", axis, axis)
    name = "slice_xp_xc%g.csv" % xc_last
    write_matrix_csv(os.path.join(out_dir, name), axis, axis, w.values,
                     corner="x\\p")
    files.append(name)

    corr_t.write(os.path.join(out_dir, "correlations.csv"))
    files.append("correlations.csv")

    extras = {"engine": "classical", "conditional_xi": config.conditional_xi}
    manifest = _write_manifest(out_dir, "figure4", config, files, extras)
    _cache_store(config, "figure4", out_dir, manifest)
    return manifest


_FIGURES = {"figure1": run_figure1, "figure2": run_figure2,
            "figure3": run_figure3, "figure4": run_figure4}


def run_all(config, out_dir=None):
    """All four figures; `threads` > 1 runs them concurrently."""
    out_dir = out_dir or config.out_dir
    names = sorted(_FIGURES)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = {name: pool.submit(_FIGURES[name], config, out_dir)
                       for name in names}
            return {name: f.result() for name, f in futures.items()}
    return {name: _FIGURES[name](config, out_dir) for name in names}


# ---------------------------------------------------------------------------
# snapshot workflows

def evolve_snapshot(config, xi, path, method="auto"):
    """Evolve the full-space state at strength xi and write it to `path`.

    The classical engine evolves the signal modes from vacuum; the quantized
    engine appends the pump mode prepared in its coherent state. Cutoffs come
    from the config; the quantized full-space product is only tractable at
    small cutoffs, which is exactly what this entry point is for (the sweeps
    use the sector engine instead).
    """
    if config.engine == "classical":
        spec = HamiltonianSpec(interaction="tpg", pump="classical",
                               coupling=config.coupling,
                               pump_amplitude=config.pump_amplitude)
        d = config.triplet_cutoff
        layout = ModeLayout(("A", "B", "C"), (d, d, d))
        psi0 = vacuum_state(layout)
    else:
        spec = HamiltonianSpec(interaction="tpg", pump="quantized",
                               coupling=config.coupling,
                               pump_amplitude=config.pump_amplitude)
        d = config.triplet_cutoff
        layout = ModeLayout(("A", "B", "C", "P"), (d, d, d,
                                                   config.pump_cutoff))
        if layout.dim > 2_000_000:
            raise ConfigError(
                "full-space dimension %d is out of reach; lower the cutoffs "
                "for snapshot evolution" % layout.dim)
        psi0 = product_state(
            vacuum_state(ModeLayout(("A", "B", "C"), (d, d, d))),
            coherent_state(config.pump_cutoff, config.pump_amplitude))
    hamiltonian = build_hamiltonian(layout, spec)
    result = evolve(psi0, hamiltonian, xi_to_time(xi, spec), method=method)
    audit = cutoff_audit(result.state, threshold=config.audit_threshold)
    params = {"xi": float(xi), "engine": config.engine,
              "coupling": config.coupling,
              "pump_amplitude": config.pump_amplitude,
              "method": result.method, "steps": result.steps,
              "audit": audit, "config_hash": config.config_hash()}
    return write_snapshot(result.state, path, params=params)


def analyze_snapshot(path):
    """Measures of a stored snapshot, as a plain dict."""
    state, manifest = read_snapshot(path)
    layout = state.layout
    out = {"labels": list(layout.labels), "cutoffs": list(layout.cutoffs),
           "norm": float(state.norm()), "params": manifest.get("params", {})}
    signal = [l for l in layout.labels if l != "P"]
    stats = photon_statistics(state, signal[0])
    out["nbar"] = float(stats.nbar)
    out["mandel_q"] = float(stats.mandel_q)
    out["audit"] = cutoff_audit(state)
    if len(signal) == 3 and layout.nmodes == 3:
        # pure signal-only state: the closed forms apply when the amplitude
        # really lives on the correlated support with real coefficients
        t = state.tensor()
        c = np.array([t[n, n, n] for n in range(min(layout.cutoffs))])
        on_diag = float(np.sum(np.abs(c) ** 2))
        if (abs(on_diag - state.norm() ** 2) < 1e-10
                and np.max(np.abs(c.imag)) < 1e-10):
            _attach_measures(out, correlated_measures(c.real, 3))
    elif len(signal) == 3 and layout.nmodes == 4 and layout.labels[-1] == "P":
        # quantized pump: tracing it out on the correlated support gives the
        # signal matrix R[n, m] = sum_k psi[n,n,n,k] conj(psi[m,m,m,k])
        t = state.tensor()
        d = min(layout.cutoffs[:3])
        amps = np.array([t[n, n, n, :] for n in range(d)])
        on_support = float(np.sum(np.abs(amps) ** 2))
        if (abs(on_support - state.norm() ** 2) < 1e-10
                and np.max(np.abs(amps.imag)) < 1e-10):
            R = amps.real @ amps.real.T
            _attach_measures(out, correlated_measures(R, 3))
    return out


def _attach_measures(out, m):
    out["delta_full"] = float(m.delta_full)
    out["delta_pair"] = float(m.delta_pair)
    out["delta_single"] = float(m.delta_single)
    out["log_negativity"] = float(m.log_negativity)
