"""Command line entry point: ``run``, ``hk-probe``, ``plot`` and ``check``.

Exit codes: 0 success/converged, 2 invalid config, 3 inadmissible input,
4 flow breakdown, 5 budget exhausted.
"""

import argparse
from dataclasses import dataclass, field
import logging
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import ConfigError, SamplerError, SeriesParseError
from .flow import FlowState, Monitors, StopCriteria, evolve
from .geometry import AmbientParams, ProfileGrid, admissibility_check, compute_snapshot
from .io import (SCHEMA_VERSION, af_gap_series, line_chart, read_series_csv, record_dict,
                 write_functionals_csv, write_json, write_profiles_csv)
from .verifier import (SamplerParams, af_check, heintze_karcher_gap,
                       monotonicity_audit, random_admissible_sampler)

log = logging.getLogger("dsflow")

EXIT_OK, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_BREAKDOWN, EXIT_BUDGET = 0, 2, 3, 4, 5

SCHEME = {
    "time_stepping": "explicit midpoint RK2, adaptive dt",
    "space": "second-order centered differences, even pole reflection",
    "quadrature": "composite Simpson, constant-exact normalization",
}


@dataclass
class RunReport:
    termination: str
    exit_code: int
    r_inf: float
    initial: dict
    final: dict
    af_gap_initial: float
    af_gap_final: float
    audit: dict
    wall_time: float
    steps: int
    admissibility: dict
    violations: list = field(default_factory=list)
    error: str = ""

    def as_dict(self, config):
        return {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "scheme": SCHEME,
            "termination": self.termination,
            "exit_code": self.exit_code,
            "r_inf": self.r_inf,
            "steps": self.steps,
            "initial": self.initial,
            "final": self.final,
            "af_gap_initial": self.af_gap_initial,
            "af_gap_final": self.af_gap_final,
            "audit": self.audit,
            "admissibility": self.admissibility,
            "violations": self.violations,
            "error": self.error,
            "wall_time": self.wall_time,
            "config": config.to_text(),
        }


def sampler_params(config, seed=None, k=None, target_class=None):
    return SamplerParams(
        rho0=config.rho0, M=config.M, amp_max=config.amp_max, n=config.n,
        k=config.k if k is None else k,
        target_class=target_class or config.target_class,
        seed=config.seed if seed is None else seed, N=config.N,
        max_attempts=config.max_attempts,
    )


def initial_grid(config):
    if config.initial_kind == "slice":
        return ProfileGrid.slice(config.N, config.rho0)
    if config.initial_kind == "cosine":
        return ProfileGrid.cosine_series(config.N, config.rho0, config.coeffs)
    return random_admissible_sampler(sampler_params(config))


def run(config, out_dir=None):
    """Evolve the configured initial data and write all outputs.

    Returns
    -------
    RunReport
        Also written to ``report.json`` when JSON output is enabled.
    """
    config.validate()
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(config.to_text(), encoding="utf-8")
    start = time.perf_counter()
    ambient = AmbientParams(config.n)
    grid = initial_grid(config)
    adm = admissibility_check(grid, ambient, config.k)
    if not adm.admissible:
        report = RunReport("inadmissible", EXIT_INADMISSIBLE, float("nan"), {}, {},
                           float("nan"), float("nan"), {}, time.perf_counter() - start, 0,
                           adm.as_dict())
        if config.emit_json:
            write_json(out / "report.json", report.as_dict(config))
        return report
    state = FlowState.initial(grid, ambient, config.k)
    stop = StopCriteria(config.tol_speed, config.tol_osc, config.t_max, config.max_steps)
    monitors = Monitors(tol=config.monitor_tol, abort=config.monitor_abort)
    traj = evolve(state, stop, monitors, record_every=config.record_every,
                  record_interval=config.record_interval or None, safety=config.safety)
    n, k = config.n, config.k
    if config.emit_csv:
        write_functionals_csv(out / "functionals.csv", traj.records, n)
        write_profiles_csv(out / "profiles.csv", traj.times, traj.profiles)
    first, last = traj.records[0], traj.records[-1]
    audit = monotonicity_audit(traj, config.audit_tol).summary() if len(traj.records) > 1 else {}
    code = {"converged": EXIT_OK, "breakdown": EXIT_BREAKDOWN}.get(traj.reason, EXIT_BUDGET)
    report = RunReport(
        termination=traj.reason,
        exit_code=code,
        r_inf=float(np.mean(traj.profiles[-1])),
        initial=record_dict(first),
        final=record_dict(last),
        af_gap_initial=af_check(first.B[k], first.B[-1], n, k),
        af_gap_final=af_check(last.B[k], last.B[-1], n, k),
        audit=audit,
        wall_time=time.perf_counter() - start,
        steps=traj.steps,
        admissibility=adm.as_dict(),
        violations=[vars(v) for v in traj.violations],
        error=traj.error,
    )
    if config.emit_json:
        write_json(out / "report.json", report.as_dict(config))
    if config.emit_svg:
        plot([out / "functionals.csv", out / "profiles.csv"], out, k=k)
    log.info("run finished: %s after %d steps", traj.reason, traj.steps)
    return report


def hk_probe(config, count=None, out_dir=None):
    """Evaluate the Heintze-Karcher gap on ``count`` seeded mean-convex samples.

    Sample ``i`` uses seed ``config.seed + i``.  Gaps below ``-hk_tol`` are
    dumped to ``counterexamples/``; they are findings, not errors.
    """
    count = config.hk_count if count is None else count
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ambient = AmbientParams(config.n)
    rows, skipped, counterexamples = [], [], []
    for i in range(count):
        seed = config.seed + i
        try:
            grid = random_admissible_sampler(
                sampler_params(config, seed=seed, k=1, target_class="mean-convex"))
        except SamplerError as exc:
            log.warning("sample %d (seed %d) skipped: %s", i, seed, exc)
            skipped.append(seed)
            continue
        snap = compute_snapshot(grid, ambient, 1)
        gap = heintze_karcher_gap(snap)
        adm = admissibility_check(grid, ambient, config.k)
        rows.append((seed, grid.meta["attempts"], adm.spacelike_margin, adm.cone_margin,
                     adm.pinching_margin, gap))
        if gap < -config.hk_tol:
            cdir = out / "counterexamples"
            cdir.mkdir(exist_ok=True)
            write_profiles_csv(cdir / f"seed_{seed}.csv", [0.0], [grid.r])
            counterexamples.append(seed)
    with open(out / "hk_samples.csv", "w", encoding="utf-8") as fh:
        fh.write("seed,attempts,margin_space,margin_cone,margin_pinch,gap\n")
        for row in rows:
            fh.write(",".join([str(row[0]), str(row[1])] + [repr(float(x)) for x in row[2:]]))
            fh.write("\n")
    gaps = np.array([row[-1] for row in rows])
    if gaps.size:
        counts, edges = np.histogram(gaps, bins=10)
    else:
        counts, edges = np.zeros(0, int), np.zeros(0)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "count": count,
        "evaluated": int(gaps.size),
        "skipped_seeds": skipped,
        "min_gap": float(gaps.min()) if gaps.size else None,
        "max_gap": float(gaps.max()) if gaps.size else None,
        "histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
        "counterexample_seeds": counterexamples,
        "tol": config.hk_tol,
        "scope": "axisymmetric radial graphs only",
        "sampler": {"rho0": config.rho0, "amp_max": config.amp_max, "M": config.M,
                    "n": config.n, "N": config.N, "master_seed": config.seed},
    }
    write_json(out / "hk_summary.json", summary)
    return summary


def plot(paths, out_dir, k=None):
    """Write SVG charts for functional and profile series files.

    Returns the list of files written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in map(Path, paths):
        header, data = read_series_csv(path)
        t = data[:, 0] if data.size else np.zeros(0)
        if any(c.startswith("r_") for c in header[1:]) or len(header) == 1:
            theta = np.linspace(0.0, np.pi, max(len(header) - 1, 1))
            rows = data if len(data) <= 8 else data[np.linspace(0, len(data) - 1, 8).astype(int)]
            series = {f"t={row[0]:.4g}": (theta, row[1:]) for row in rows}
            target = out / f"{path.stem}.svg"
            target.write_text(line_chart(series, "r(theta) snapshots", "theta", "r"))
            written.append(target)
            continue
        col = lambda name: data[:, header.index(name)] if data.size else np.zeros(0)
        groups = {
            "quermass": [c for c in header if c.startswith("A_")],
            "weighted": [c for c in header if c.startswith("B_")],
            "margins": ["margin_space", "margin_cone", "margin_pinch"],
        }
        for name, cols in groups.items():
            series = {c: (t, col(c)) for c in cols if c in header}
            target = out / f"{path.stem}_{name}.svg"
            target.write_text(line_chart(series, f"{name} vs t", "t", name))
            written.append(target)
        if k is None:
            k = _k_from_report(path.parent)
        if k is not None and f"B_{k}" in header and data.size:
            gap = af_gap_series(header, data, k)
        else:
            gap = np.zeros(0)
            t = np.zeros(0)
        target = out / f"{path.stem}_af_gap.svg"
        target.write_text(line_chart({"af gap": (t, gap)} if gap.size else {},
                                     "AF gap vs t", "t", "gap"))
        written.append(target)
    return written


def _k_from_report(directory):
    cfg = directory / "config.txt"
    if cfg.exists():
        try:
            return RunConfig.load(cfg).k
        except ConfigError:
            return None
    return None


def check(config):
    config.validate()
    grid = initial_grid(config)
    return admissibility_check(grid, AmbientParams(config.n), config.k)


def _build_parser():
    p = argparse.ArgumentParser(prog="dsflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, help="flat key-value config file")
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--seed", type=int, help="sampler seed (unsigned 64-bit)")
        sp.add_argument("--quiet", action="store_true")

    common(sub.add_parser("run", help="evolve and audit one initial hypersurface"))
    sp = sub.add_parser("hk-probe", help="Heintze-Karcher gap on random samples")
    common(sp)
    sp.add_argument("--count", type=int)
    sp = sub.add_parser("plot", help="SVG charts from series files")
    sp.add_argument("files", nargs="*", type=Path)
    sp.add_argument("--out", type=Path, default=Path("."))
    sp.add_argument("--k", type=int)
    sp.add_argument("--quiet", action="store_true")
    common(sub.add_parser("check", help="admissibility of the initial data only"))
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "plot":
        try:
            for f in plot(args.files, args.out, k=args.k):
                log.info("wrote %s", f)
        except SeriesParseError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        config = config.with_overrides(seed=args.seed,
                                       out_dir=str(args.out) if args.out else None)
        config.validate()
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        try:
            report = run(config)
        except SamplerError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INADMISSIBLE
        if not args.quiet:
            print(f"{report.termination}: steps={report.steps} r_inf={report.r_inf:.12g} "
                  f"af_gap initial={report.af_gap_initial:.6g} final={report.af_gap_final:.6g}")
        return report.exit_code
    if args.command == "hk-probe":
        summary = hk_probe(config, count=args.count)
        if not args.quiet:
            print(f"evaluated={summary['evaluated']} min_gap={summary['min_gap']} "
                  f"counterexamples={len(summary['counterexample_seeds'])}")
        return EXIT_OK
    try:
        report = check(config)
    except SamplerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    if not args.quiet:
        for key, value in report.as_dict().items():
            print(f"{key} = {value}")
    return EXIT_OK if report.admissible else EXIT_INADMISSIBLE


if __name__ == "__main__":
    sys.exit(main())
