"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.  Runs shared between criteria are module fixtures.
"""

import numpy as np
import pytest

from dsflow import symfunc
from dsflow.cli import hk_probe, run
from dsflow.config import RunConfig
from dsflow.flow import (FlowState, StopCriteria, evolve, graph_speed, stable_dt, step,
                         variation_residuals)
from dsflow.functionals import (minkowski_residual, quermassintegral, sphere_area,
                                weighted_integral)
from dsflow.geometry import AmbientParams, ProfileGrid, compute_snapshot
from dsflow.io import read_series_csv
from dsflow.verifier import heintze_karcher_gap, monotonicity_audit, slice_functionals

pytestmark = pytest.mark.slow

RHOS = (0.5, 1.0, 2.0)
DIMS = (2, 3, 5)
SAMPLER_SEEDS = range(20)


def perturbed(N):
    return ProfileGrid.from_function(N, lambda th: 1.0 + 0.05 * np.cos(2 * th))


@pytest.fixture(scope="module")
def run4():
    state = FlowState.initial(perturbed(256), AmbientParams(2), 2)
    return evolve(state, StopCriteria(max_steps=10**6), record_every=1000)


def sampler_config(seed):
    return RunConfig(n=3, k=2, N=64, initial_kind="sampler", rho0=1.0, amp_max=0.03, M=3,
                     seed=seed)


@pytest.fixture(scope="module")
def sampler_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("sampler_runs")
    out = {}
    for seed in SAMPLER_SEEDS:
        d = root / f"seed_{seed}"
        report = run(sampler_config(seed), d)
        header, data = read_series_csv(d / "functionals.csv")
        out[seed] = (d, report, header, data)
    return out


def test_c01_slice_stationarity(criterion):
    worst_speed = worst_drift = 0.0
    for rho in RHOS:
        for n in DIMS:
            for k in range(2, n + 1):
                state = FlowState.initial(ProfileGrid.slice(256, rho), AmbientParams(n), k)
                worst_speed = max(worst_speed, float(np.max(np.abs(graph_speed(state.snapshot)))))
                dt = stable_dt(state.snapshot)
                for _ in range(1000):
                    state = step(state, dt)
                worst_drift = max(worst_drift, float(np.max(np.abs(state.grid.r - rho))))
    criterion(1, "slice stationarity", worst_speed <= 1e-13 and worst_drift <= 1e-11,
              f"max|speed|={worst_speed:.2e}, drift after 1000 steps={worst_drift:.2e}")


def test_c02_closed_form_oracles(criterion):
    worst = 0.0
    for rho in RHOS:
        c, s = np.cosh(rho), np.sinh(rho)
        for n in DIMS:
            on = sphere_area(n)
            snap = compute_snapshot(ProfileGrid.slice(256, rho), AmbientParams(n), 2)
            rel = lambda a, b: abs(a - b) / abs(b)
            errs = [rel(quermassintegral(snap, 0), on * c**n)]
            errs += [rel(weighted_integral(snap, l), on * c ** (n - l) * s ** (l + 1))
                     for l in range(0, n + 1)]
            vol, dual = weighted_integral(snap, -1, cross_check=True)
            errs += [rel(vol, on * c ** (n + 1)), rel(dual, vol)]
            for k in range(2, n + 1):
                pm1, pk = slice_functionals(rho, n, k)
                errs += [rel(pm1, on * c ** (n + 1)), rel(pk, on * c ** (n - k) * s ** (k + 1))]
            worst = max(worst, max(errs))
    criterion(2, "closed-form oracles on slices", worst <= 1e-12, f"worst relative error={worst:.2e}")


def test_c03_minkowski_residuals(criterion):
    res = {}
    for N in (256, 512):
        snap = compute_snapshot(perturbed(N), AmbientParams(3), 2)
        res[N] = np.array([abs(minkowski_residual(snap, l)) for l in (1, 2, 3)])
    ratios = res[256] / res[512]
    ok = bool(np.all(res[256] <= 1e-5) and np.all(ratios >= 3.5))
    criterion(3, "Minkowski residuals", ok,
              f"N=256 residuals={np.array2string(res[256], precision=2)}, "
              f"ratios={np.array2string(ratios, precision=2)}")


def test_c04_convergence(criterion, run4):
    snap = run4.final_state.snapshot
    r = snap.r
    osc = float(r.max() - r.min())
    umb = float(np.max(np.abs(snap.kappa1 - snap.kappa2)))
    r_inf = float(np.mean(r))
    bm1 = run4.records[-1].B[-1]
    self_consistency = abs(bm1 - sphere_area(2) * np.cosh(r_inf) ** 3) / bm1
    ok = (run4.converged and run4.steps <= 10**6 and osc < 1e-6 and umb < 1e-6
          and self_consistency < 1e-5)
    criterion(4, "convergence to a slice", ok,
              f"reason={run4.reason}, steps={run4.steps}, t={run4.final_state.t:.4g}, "
              f"osc={osc:.2e}, max|k1-k2|={umb:.2e}, r_inf={r_inf:.10f}, "
              f"B_-1 vs slice rel={self_consistency:.1e}")


def test_c05_monotonicity_audit(criterion, run4):
    audit = monotonicity_audit(run4, tol=1e-8)
    names = ("B_k", "B_-1", "max_r", "min_r", "max_u")
    ok = all(audit.checks[name].passed for name in names)
    detail = ", ".join(f"{name} worst={audit.checks[name].worst:.1e}" for name in names)
    criterion(5, "monotonicity audit on the convergence run", ok,
              f"{len(run4.records)} records; {detail}")


def test_c06_preservation(criterion, run4, sampler_runs):
    worst_pinch = min(rec.margin_pinch for rec in run4.records)
    worst_cone = min(rec.margin_cone for rec in run4.records)
    violations = len(run4.violations)
    for d, report, header, data in sampler_runs.values():
        worst_pinch = min(worst_pinch, float(data[:, header.index("margin_pinch")].min()))
        worst_cone = min(worst_cone, float(data[:, header.index("margin_cone")].min()))
        violations += len(report.violations)
    ok = worst_pinch >= -1e-8 and worst_cone >= -1e-8 and violations == 0
    criterion(6, "pinching and cone preservation", ok,
              f"min pinching margin={worst_pinch:.3e}, min cone margin={worst_cone:.3e}, "
              f"per-step monitor violations={violations}")


def test_c07_af_inequality(criterion, sampler_runs, tmp_path):
    worst_initial, worst_final = np.inf, 0.0
    not_converged = []
    for seed, (d, report, header, data) in sampler_runs.items():
        bk_scale = float(np.max(np.abs(data[:, header.index("B_2")])))
        worst_initial = min(worst_initial, report.af_gap_initial)
        worst_final = max(worst_final, report.af_gap_final / bk_scale)
        if report.termination != "converged":
            not_converged.append(seed)
    slice_report = run(RunConfig(n=3, k=2, N=64, initial_kind="slice", rho0=1.0), tmp_path)
    slice_gap = max(abs(slice_report.af_gap_initial), abs(slice_report.af_gap_final))
    ok = worst_initial >= -1e-8 and worst_final <= 1e-6 and slice_gap <= 1e-10 and not not_converged
    criterion(7, "AF inequality", ok,
              f"min initial gap={worst_initial:.3e}, max final gap/B_k scale={worst_final:.2e}, "
              f"slice |gap|={slice_gap:.1e}, unconverged seeds={not_converged}")


def _residuals_at(traj, times):
    out = {}
    for T in times:
        i = int(np.argmin(np.abs(np.asarray(traj.times) - T)))
        out[T] = variation_residuals(traj, i)
    return out


def test_c08_first_variation_residuals(criterion, run4):
    baseline = max(max(variation_residuals(run4, i).values())
                   for i in range(1, len(run4.records) - 1))
    tau, times = 0.02, (0.02, 0.04)
    coarse_state = FlowState.initial(perturbed(256), AmbientParams(2), 2)
    fine_state = FlowState.initial(perturbed(512), AmbientParams(2), 2)
    coarse = evolve(coarse_state, StopCriteria(t_max=3 * tau), record_interval=tau)
    fine = evolve(fine_state, StopCriteria(t_max=3 * tau), record_interval=tau / 2)
    rc, rf = _residuals_at(coarse, times), _residuals_at(fine, times)
    ratios = {f"{key}@{T}": rc[T][key] / rf[T][key] for T in times for key in rc[T]}
    worst_ratio = min(ratios.values())
    ok = baseline <= 1e-3 and worst_ratio >= 3.0
    criterion(8, "first-variation residuals", ok,
              f"baseline max residual={baseline:.2e}, "
              f"min refinement ratio={worst_ratio:.2f} over {len(ratios)} checks")


def _cone_samples(rng, n, k, m):
    chunks, total = [], 0
    while total < m:
        K = rng.uniform(-1.0, 3.0, (4 * m, n))
        K = K[symfunc.cone_membership(K, k) > symfunc.EPS_CONE]
        chunks.append(K)
        total += len(K)
    return np.concatenate(chunks)[:m]


def _property_violations(n, k, m=10**4, seed=0):
    rng = np.random.default_rng([seed, n, k])
    K = _cone_samples(rng, n, k, m)
    F = symfunc.curvature_ratio(K, k)
    g = symfunc.curvature_ratio_gradient(K, k)
    E = symfunc.elem_sym_all(K)
    scale = np.max(np.abs(K), axis=1)
    bad = {}
    # Newton: E_{l+1} E_{l-1} <= E_l^2 for every level
    newton = E[:, 2:] * E[:, :-2] - E[:, 1:-1] ** 2
    bad["newton"] = int(np.sum(np.any(newton > 1e-12 * scale[:, None] ** (2 * np.arange(1, n)), axis=1)))
    bad["sum_grad>=1"] = int(np.sum(g.sum(axis=1) < 1 - 1e-12))
    bad["sum_k2_grad>=F2"] = int(np.sum((K**2 * g).sum(axis=1) < F**2 * (1 - 1e-12)))
    t = rng.uniform(0.01, 100.0, m)
    Ft = symfunc.curvature_ratio(K * t[:, None], k)
    bad["homogeneity"] = int(np.sum(np.abs(Ft - t * F) > 1e-12 * t * np.abs(F)))
    K2 = _cone_samples(rng, n, k, m)
    mid = symfunc.curvature_ratio(0.5 * (K + K2), k)
    F2 = symfunc.curvature_ratio(K2, k)
    bad["concavity"] = int(np.sum(mid < 0.5 * (F + F2) - 1e-12 * (np.abs(F) + np.abs(F2))))
    h = 1e-6 * np.maximum(1.0, np.abs(K))
    fd = np.empty_like(K)
    for i in range(n):
        e = np.zeros_like(K)
        e[:, i] = h[:, i]
        fd[:, i] = (symfunc.curvature_ratio(K + e, k, eps_cone=0.0)
                    - symfunc.curvature_ratio(K - e, k, eps_cone=0.0)) / (2 * h[:, i])
    rel = np.max(np.abs(g - fd), axis=1) / np.max(np.abs(g), axis=1)
    bad["gradient_fd"] = int(np.sum(rel > 1e-6))
    return bad


def test_c09_symmetric_function_properties(criterion):
    results = {(n, k): _property_violations(n, k) for n, k in ((3, 2), (5, 3), (8, 4))}
    total = sum(sum(v.values()) for v in results.values())
    detail = "; ".join(f"(n,k)={nk}: {sum(v.values())} violations" for nk, v in results.items())
    criterion(9, "symmetric-function property suite, 10^4 samples each", total == 0, detail)


def test_c10_heintze_karcher_probe(criterion, tmp_path):
    cfg = RunConfig(n=3, N=256, rho0=1.0, amp_max=0.1, M=4, seed=0)
    summary = hk_probe(cfg, 100, tmp_path)
    slice_snap = compute_snapshot(ProfileGrid.slice(256, 1.0), AmbientParams(3), 1)
    slice_gap = abs(heintze_karcher_gap(slice_snap))
    negatives = [int(line.split(",")[0]) for line in
                 (tmp_path / "hk_samples.csv").read_text().splitlines()[1:]
                 if float(line.split(",")[-1]) < -1e-8]
    artifacts = sorted(int(p.stem.split("_")[1])
                       for p in (tmp_path / "counterexamples").glob("seed_*.csv"))
    ok = summary["evaluated"] == 100 and slice_gap <= 1e-12 and artifacts == sorted(negatives)
    criterion(10, "Heintze-Karcher probe", ok,
              f"evaluated={summary['evaluated']}, min gap={summary['min_gap']:.3e}, "
              f"counterexamples emitted={len(artifacts)}, slice gap={slice_gap:.1e}")


def test_c11_determinism(criterion, sampler_runs, tmp_path):
    d0, *_ = sampler_runs[0]
    run(sampler_config(0), tmp_path / "rerun")
    same_run = all((d0 / f).read_bytes() == (tmp_path / "rerun" / f).read_bytes()
                   for f in ("functionals.csv", "profiles.csv"))
    cfg = RunConfig(n=3, N=64, amp_max=0.1, M=4, seed=7)
    hk_probe(cfg, 10, tmp_path / "hk_a")
    hk_probe(cfg, 10, tmp_path / "hk_b")
    same_probe = ((tmp_path / "hk_a" / "hk_samples.csv").read_bytes()
                  == (tmp_path / "hk_b" / "hk_samples.csv").read_bytes())
    criterion(11, "bit-identical reruns", same_run and same_probe,
              f"flow CSVs identical={same_run}, probe CSV identical={same_probe}")
