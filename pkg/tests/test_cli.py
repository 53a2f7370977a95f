import dataclasses
import json

import pytest

from dsflow.cli import hk_probe, main, plot, run
from dsflow.config import KEYS, RunConfig
from dsflow.errors import ConfigError, SeriesParseError
from dsflow.functionals import functional_record
from dsflow.geometry import AmbientParams, ProfileGrid, compute_snapshot
from dsflow.io import functional_columns, read_series_csv


def write_config(path, **kw):
    cfg = RunConfig().with_overrides(**kw)
    path.write_text(cfg.to_text())
    return cfg


def test_config_round_trip():
    cfg = RunConfig(n=4, k=3, coeffs=(0.1, -1 / 3, 1e-17), t_max=0.1 + 0.2, emit_svg=True)
    assert RunConfig.from_text(cfg.to_text()) == cfg


def test_config_documents_every_field():
    from dataclasses import fields
    assert sorted(KEYS.values()) == sorted(f.name for f in fields(RunConfig))


def test_config_errors():
    with pytest.raises(ConfigError, match="unknown key"):
        RunConfig.from_text("model.q = 3")
    with pytest.raises(ConfigError, match=":2:"):
        RunConfig.from_text("model.n = 3\nmodel.k = three")
    with pytest.raises(ConfigError):
        RunConfig(k=1).validate()
    with pytest.raises(ConfigError):
        RunConfig(N=255).validate()
    with pytest.raises(ConfigError):
        RunConfig(tol_osc=0.0).validate()
    assert RunConfig.from_text("# comment only\n\nmodel.n = 3 # trailing\n").n == 3


def test_functional_columns():
    assert functional_columns(2) == [
        "t", "A_-1", "A_0", "A_1", "A_2", "B_-1", "B_0", "B_1", "B_2", "mink_1", "mink_2",
        "margin_space", "margin_cone", "margin_pinch", "max_r", "min_r", "max_u", "dt",
        "max_speed"]


def test_run_slice(tmp_path):
    cfg = write_config(tmp_path / "c.txt", initial_kind="slice", N=64)
    code = main(["run", "--config", str(tmp_path / "c.txt"), "--out", str(tmp_path / "o"),
                 "--quiet"])
    assert code == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["termination"] == "converged" and report["steps"] == 0
    assert abs(report["af_gap_final"]) <= 1e-10
    assert RunConfig.load(tmp_path / "o" / "config.txt") == cfg.with_overrides(
        out_dir=str(tmp_path / "o"))


def test_run_rejects_k1(tmp_path):
    (tmp_path / "c.txt").write_text("model.k = 1\n")
    assert main(["run", "--config", str(tmp_path / "c.txt"), "--quiet"]) == 2


def test_run_missing_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.txt"), "--quiet"]) == 2


def test_run_inadmissible(tmp_path):
    write_config(tmp_path / "c.txt", N=64, coeffs=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5))
    assert main(["run", "--config", str(tmp_path / "c.txt"), "--out", str(tmp_path / "o"),
                 "--quiet"]) == 3
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["termination"] == "inadmissible"
    assert report["admissibility"]["margin_space"] < 0


def test_run_budget_and_consistency(tmp_path):
    cfg = RunConfig(N=64, max_steps=400, record_every=100, emit_svg=True)
    report = run(cfg, tmp_path)
    assert report.exit_code == 5 and report.termination == "max_steps"
    header, data = read_series_csv(tmp_path / "functionals.csv")
    pheader, profiles = read_series_csv(tmp_path / "profiles.csv")
    assert len(data) == len(profiles) == 5
    ambient = AmbientParams(cfg.n)
    for row, prof in zip(data, profiles):
        snap = compute_snapshot(ProfileGrid.from_values(prof[1:]), ambient, cfg.k)
        rec = functional_record(snap)
        for l in range(-1, cfg.n + 1):
            assert row[header.index(f"A_{l}")] == pytest.approx(rec.A[l], rel=1e-12)
            assert row[header.index(f"B_{l}")] == pytest.approx(rec.B[l], rel=1e-12)
    for name in ("functionals_quermass.svg", "functionals_weighted.svg",
                 "functionals_margins.svg", "functionals_af_gap.svg", "profiles.svg"):
        assert (tmp_path / name).read_text().startswith("<svg")


def test_run_is_bit_identical(tmp_path):
    cfg = RunConfig(N=64, max_steps=300, record_every=50, initial_kind="sampler", n=3,
                    seed=4)
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("functionals.csv", "profiles.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_override_changes_sampler(tmp_path):
    base = RunConfig(N=64, max_steps=2, initial_kind="sampler", n=3)
    run(base.with_overrides(seed=1), tmp_path / "a")
    run(base.with_overrides(seed=2), tmp_path / "b")
    assert (tmp_path / "a" / "profiles.csv").read_bytes() != (tmp_path / "b" / "profiles.csv").read_bytes()


def test_hk_probe_zero_count(tmp_path):
    assert main(["hk-probe", "--count", "0", "--out", str(tmp_path), "--quiet"]) == 0
    summary = json.loads((tmp_path / "hk_summary.json").read_text())
    assert summary["evaluated"] == 0 and summary["min_gap"] is None
    assert (tmp_path / "hk_samples.csv").read_text().startswith("seed,")


def test_hk_probe_deterministic(tmp_path):
    cfg = RunConfig(n=3, N=64, amp_max=0.1, M=4)
    a = hk_probe(cfg, 5, tmp_path / "a")
    hk_probe(cfg, 5, tmp_path / "b")
    assert a["evaluated"] == 5
    for name in ("hk_samples.csv", "hk_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_hk_probe_writes_counterexamples(tmp_path):
    cfg = RunConfig(n=3, N=64, amp_max=0.1, M=4)
    assert hk_probe(cfg, 2, tmp_path)["counterexample_seeds"] == []
    # A negative tolerance (bypassing validation) flags every sample.
    loose = dataclasses.replace(cfg, hk_tol=-1e300)
    summary = hk_probe(loose, 2, tmp_path / "neg")
    assert summary["counterexample_seeds"] == [0, 1]
    assert (tmp_path / "neg" / "counterexamples" / "seed_0.csv").exists()


def test_plot_empty_series(tmp_path):
    f = tmp_path / "functionals.csv"
    f.write_text(",".join(functional_columns(2)) + "\n")
    assert main(["plot", str(f), "--out", str(tmp_path), "--quiet"]) == 0
    svg = (tmp_path / "functionals_weighted.svg").read_text()
    assert "<svg" in svg and "<polyline" not in svg


def test_plot_slice_is_flat(tmp_path):
    run(RunConfig(initial_kind="slice", N=32, emit_svg=True), tmp_path)
    svg = (tmp_path / "functionals_weighted.svg").read_text()
    assert "data B_2:" in svg


def test_plot_malformed(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("t,r_0\n0.0,1.0\n0.5,oops\n")
    assert main(["plot", str(f), "--out", str(tmp_path)]) == 2
    assert f"{f}:3:" in capsys.readouterr().err
    with pytest.raises(SeriesParseError) as info:
        plot([f], tmp_path)
    assert info.value.line == 3


def test_check_exit_codes(tmp_path, capsys):
    write_config(tmp_path / "ok.txt", N=64)
    assert main(["check", "--config", str(tmp_path / "ok.txt")]) == 0
    assert "admissible = True" in capsys.readouterr().out
    write_config(tmp_path / "bad.txt", N=64, coeffs=(0.0,) * 7 + (0.5,))
    assert main(["check", "--config", str(tmp_path / "bad.txt"), "--quiet"]) == 3
