import hashlib
import json
import os

import numpy as np
import pytest

from tpgsim.cli import main
from tpgsim.dynamics import classical_coefficients
from tpgsim.errors import ConfigError, TruncationError
from tpgsim.experiments import (ExperimentConfig, ResultTable,
                                analyze_snapshot, evolve_snapshot,
                                read_table_csv, run_all, run_figure1,
                                run_figure2, run_figure3, run_figure4,
                                tps_matrix, write_matrix_csv)


def small_config(tmp_path, **over):
    kw = dict(triplet_cutoff=16, pump_cutoff=36, pair_cutoff=12,
              conditional_cutoff=24, xi_max=0.3, xi_step=0.1,
              wigner_points=15, slice_points=11, joint_points=9,
              marginal_points=21, conditional_xc_step=0.5,
              conditional_xc_max=1.0, conditional_xc_values=(0.0, 1.0),
              audit_threshold=1e-2, out_dir=str(tmp_path / "out"))
    kw.update(over)
    return ExperimentConfig(**kw)


def sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(engine="heuristic")
    with pytest.raises(ConfigError):
        ExperimentConfig(triplet_cutoff=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(xi_step=0.0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"fock_cutoff": 10})


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(str(bad))
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"triplet_cutoff": 20, "engine": "classical"}))
    cfg = ExperimentConfig.from_file(str(good))
    assert cfg.triplet_cutoff == 20
    assert cfg.engine == "classical"


def test_config_hash_ignores_plumbing(tmp_path):
    a = small_config(tmp_path)
    b = small_config(tmp_path, out_dir=str(tmp_path / "elsewhere"),
                     threads=4, use_cache=False, cache_dir="/nonexistent")
    assert a.config_hash() == b.config_hash()
    c = small_config(tmp_path, triplet_cutoff=17)
    assert a.config_hash() != c.config_hash()


def test_xi_grid_endpoints(tmp_path):
    cfg = small_config(tmp_path)
    grid = cfg.xi_grid()
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(0.3)
    assert len(grid) == 4
    assert cfg.conditional_xi_grid()[0] == pytest.approx(0.1)


def test_result_table_roundtrip(tmp_path):
    t = ResultTable(["n", "value", "tag"])
    t.add(0, 0.1 + 0.2, "a")
    t.add(1, 1e-300, "b")
    path = str(tmp_path / "t.csv")
    t.write(path)
    header, rows = read_table_csv(path)
    assert header == ["n", "value", "tag"]
    # repr serialization survives the roundtrip bit for bit
    assert float(rows[0][1]) == 0.1 + 0.2
    assert float(rows[1][1]) == 1e-300
    with open(path, "rb") as fh:
        blob = fh.read()
    assert b"\r" not in blob


def test_result_table_row_width(tmp_path):
    t = ResultTable(["a", "b"])
    with pytest.raises(ConfigError):
        t.add(1.0)


def test_matrix_csv_roundtrip(tmp_path):
    xs = np.array([0.0, 1.0])
    ys = np.array([0.0, 0.5, 1.0])
    vals = np.arange(6, dtype=float).reshape(2, 3) / 7
    path = str(tmp_path / "m.csv")
    write_matrix_csv(path, xs, ys, vals)
    header, rows = read_table_csv(path)
    assert header[0] == "x\\y"
    assert [float(v) for v in header[1:]] == list(ys)
    got = np.array([[float(v) for v in row[1:]] for row in rows])
    assert np.array_equal(got, vals)
    assert [float(r[0]) for r in rows] == list(xs)


def test_truncation_audit_fires(tmp_path):
    cfg = small_config(tmp_path, audit_threshold=1e-12)
    with pytest.raises(TruncationError):
        tps_matrix(cfg, 0.3)
    cfg = small_config(tmp_path, engine="classical", audit_threshold=1e-12)
    with pytest.raises(TruncationError) as err:
        tps_matrix(cfg, 0.3)
    assert err.value.suggested_cutoff > cfg.triplet_cutoff


def test_figure1_files_and_manifest(tmp_path):
    cfg = small_config(tmp_path)
    manifest = run_figure1(cfg)
    assert len(manifest["files"]) == 8
    for name, meta in manifest["files"].items():
        path = os.path.join(cfg.out_dir, name)
        assert os.path.isfile(path)
        assert sha256(path) == meta["sha256"]
    assert manifest["config_hash"] == cfg.config_hash()
    stats = manifest["statistics"]
    assert stats["tps_nbar"] > stats["sodc_nbar"] * 0  # present and numeric
    header, rows = read_table_csv(os.path.join(cfg.out_dir,
                                               "mean_photon_number.csv"))
    assert header[:3] == ["xi", "tps", "sodc"]
    assert len(rows) == len(cfg.xi_grid())


def test_figure2_values(tmp_path):
    cfg = small_config(tmp_path)
    manifest = run_figure2(cfg)
    header, rows = read_table_csv(os.path.join(cfg.out_dir, "negativity.csv"))
    cols = {name: i for i, name in enumerate(header)}
    for row in rows:
        xi = float(row[cols["xi"]])
        sodc = float(row[cols["log_negativity_sodc"]])
        assert sodc == pytest.approx(2 * xi, abs=2e-4)
        assert float(row[cols["log_negativity_pair_reduced"]]) == 0.0
        assert float(row[cols["nu_min_a"]]) >= 0.5 - 1e-12
    rows = manifest["scaling_relation"]
    assert {r["engine"] for r in rows} == {"quantized", "classical"}
    assert {r["xi"] for r in rows} == {0.1, 0.3}
    for r in rows:
        assert r["residual"] == pytest.approx(r["lhs"] - r["rhs"], abs=1e-12)


def test_figure3_tables(tmp_path):
    cfg = small_config(tmp_path)
    manifest = run_figure3(cfg)
    assert "conditional_wigner_xc0.csv" in manifest["files"]
    header, rows = read_table_csv(os.path.join(cfg.out_dir,
                                               "conditional_sweep_xc.csv"))
    assert len(rows) == len(cfg.xc_grid())
    header, rows = read_table_csv(os.path.join(cfg.out_dir,
                                               "conditional_vs_xi.csv"))
    cols = {name: i for i, name in enumerate(header)}
    assert len(rows) == len(cfg.conditional_xi_grid()) * 2
    # conditioning on the most likely outcome cannot break the product bound
    for row in rows:
        if float(row[cols["xc"]]) == 0.0:
            assert float(row[cols["steering"]]) > 1.0


def test_figure4_correlations(tmp_path):
    cfg = small_config(tmp_path)
    manifest = run_figure4(cfg)
    slice_files = [n for n in manifest["files"] if n.startswith("slice_")]
    assert len(slice_files) == 2 * 2 + 1
    header, rows = read_table_csv(os.path.join(cfg.out_dir,
                                               "correlations.csv"))
    cols = {name: i for i, name in enumerate(header)}
    for row in rows:
        x = float(row[cols["x_correlation"]])
        p = float(row[cols["p_correlation"]])
        pm = float(row[cols["pair_moment"]])
        assert p == pytest.approx(-x, abs=1e-10)
        assert pm == pytest.approx(x, abs=1e-10)
        # conditioning at the node keeps only even levels, whose pair moment
        # vanishes; away from it the cross correlation is positive
        if float(row[cols["xc"]]) == 0.0:
            assert x == pytest.approx(0.0, abs=1e-12)
        else:
            assert x > 0.0


def test_cache_roundtrip(tmp_path):
    cache = tmp_path / "cache"
    a = small_config(tmp_path, cache_dir=str(cache),
                     out_dir=str(tmp_path / "a"))
    m1 = run_figure2(a)
    assert len(os.listdir(cache)) == 1
    b = small_config(tmp_path, cache_dir=str(cache),
                     out_dir=str(tmp_path / "b"))
    m2 = run_figure2(b)
    for name in m1["files"]:
        assert sha256(os.path.join(a.out_dir, name)) == \
            sha256(os.path.join(b.out_dir, name))
    assert m2["files"] == m1["files"]


def test_cache_rejects_corruption(tmp_path):
    cache = tmp_path / "cache"
    a = small_config(tmp_path, cache_dir=str(cache),
                     out_dir=str(tmp_path / "a"))
    m1 = run_figure2(a)
    slot = os.path.join(str(cache), os.listdir(cache)[0])
    victim = os.path.join(slot, "qre.csv")
    with open(victim, "a") as fh:
        fh.write("tampered\n")
    b = small_config(tmp_path, cache_dir=str(cache),
                     out_dir=str(tmp_path / "b"))
    m2 = run_figure2(b)
    # recomputed, not copied: the fresh file matches the original run
    assert sha256(os.path.join(b.out_dir, "qre.csv")) == \
        m1["files"]["qre.csv"]["sha256"]
    assert m2["files"]["qre.csv"]["sha256"] == m1["files"]["qre.csv"]["sha256"]


def test_runs_are_deterministic(tmp_path):
    a = small_config(tmp_path, out_dir=str(tmp_path / "a"))
    b = small_config(tmp_path, out_dir=str(tmp_path / "b"))
    m1 = run_figure1(a)
    m2 = run_figure1(b)
    for name, meta in m1["files"].items():
        assert m2["files"][name]["sha256"] == meta["sha256"]


def test_run_all_threaded(tmp_path):
    cfg = small_config(tmp_path, threads=2)
    manifests = run_all(cfg)
    assert set(manifests) == {"figure1", "figure2", "figure3", "figure4"}
    single = small_config(tmp_path, out_dir=str(tmp_path / "single"))
    manifests_single = run_all(single)
    for fig in manifests:
        assert manifests[fig]["files"] == manifests_single[fig]["files"]


def test_evolve_analyze_roundtrip(tmp_path):
    cfg = small_config(tmp_path, engine="classical", triplet_cutoff=10)
    path = str(tmp_path / "s.tpgs")
    manifest = evolve_snapshot(cfg, 0.2, path)
    assert manifest["norm"] == pytest.approx(1.0, abs=1e-9)
    report = analyze_snapshot(path)
    assert report["params"]["xi"] == 0.2
    c = classical_coefficients(0.2, 10, "tpg")
    from tpgsim.measures import correlated_measures
    m = correlated_measures(c, 3)
    assert report["delta_full"] == pytest.approx(m.delta_full, abs=1e-8)
    assert report["log_negativity"] == pytest.approx(m.log_negativity,
                                                     abs=1e-8)


def test_evolve_analyze_quantized_matches_sector_engine(tmp_path):
    # full-tensor evolution and the sector decomposition are independent
    # routes to the same pump-traced matrix
    cfg = small_config(tmp_path, triplet_cutoff=10, pump_cutoff=24,
                       pump_amplitude=2.0)
    path = str(tmp_path / "q.tpgs")
    evolve_snapshot(cfg, 0.2, path)
    report = analyze_snapshot(path)
    from tpgsim.measures import correlated_measures
    m = correlated_measures(tps_matrix(cfg, 0.2), 3)
    assert report["delta_full"] == pytest.approx(m.delta_full, abs=1e-8)
    assert report["delta_pair"] == pytest.approx(m.delta_pair, abs=1e-8)
    assert report["log_negativity"] == pytest.approx(m.log_negativity,
                                                     abs=1e-8)


def test_cli_figure_and_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "cli")
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "triplet_cutoff": 16, "pump_cutoff": 36, "pair_cutoff": 12,
        "conditional_cutoff": 24, "xi_max": 0.2, "xi_step": 0.1,
        "wigner_points": 9, "slice_points": 9, "joint_points": 9,
        "marginal_points": 11, "audit_threshold": 1e-2}))
    code = main(["figure2", "--config", str(cfg_file), "--out", out])
    assert code == 0
    assert os.path.isfile(os.path.join(out, "qre.csv"))
    capsys.readouterr()

    assert main(["figure1", "--cutoff", "2"]) == 2
    assert main([]) == 2
    code = main(["figure2", "--config", str(cfg_file), "--out", out,
                 "--cutoff", "16", "--engine", "classical"])
    assert code == 0
    capsys.readouterr()


def test_cli_truncation_exit_code(tmp_path, capsys):
    out = str(tmp_path / "cli")
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "triplet_cutoff": 6, "pump_cutoff": 30, "xi_max": 0.2,
        "xi_step": 0.1, "joint_points": 9, "marginal_points": 11,
        "wigner_points": 9}))
    assert main(["figure1", "--config", str(cfg_file), "--out", out]) == 3
    err = capsys.readouterr().err
    assert "truncation" in err


def test_cli_evolve_analyze(tmp_path, capsys):
    path = str(tmp_path / "s.tpgs")
    code = main(["evolve", "--xi", "0.1", "--engine", "classical",
                 "--cutoff", "8", "--out", path])
    assert code == 0
    capsys.readouterr()
    assert main(["analyze", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["params"]["engine"] == "classical"
    assert report["norm"] == pytest.approx(1.0, abs=1e-9)


def test_cli_evolve_uses_full_space_cutoffs():
    # the figure-sweep cutoffs would put the full tensor product past the
    # size guard, so bare evolve gets its own defaults; explicit flags win
    from tpgsim.cli import _build_parser, _config_from_args

    parser = _build_parser()
    cfg = _config_from_args(parser.parse_args(["evolve", "--xi", "0.3"]))
    assert (cfg.triplet_cutoff, cfg.pump_cutoff) == (24, 48)
    cfg = _config_from_args(parser.parse_args(
        ["evolve", "--xi", "0.3", "--cutoff", "32"]))
    assert (cfg.triplet_cutoff, cfg.pump_cutoff) == (32, 48)
    cfg = _config_from_args(parser.parse_args(["figure1"]))
    assert cfg.triplet_cutoff == ExperimentConfig().triplet_cutoff
