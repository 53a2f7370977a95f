"""Explicit time integration of the radial-graph flow.

The evolving graph satisfies::

    dr/dt = lam/lam' - upsilon/F,     F = E_k / E_{k-1},

whose stationary profiles are exactly the coordinate slices ``r = const``.
The normal speed is ``Theta - 1/F`` and equals ``(dr/dt) / upsilon``.

Time stepping is the explicit midpoint rule.  Each step size comes from the
principal diffusivity of the current snapshot.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from . import symfunc
from .errors import AdmissibilityError, ArgumentError, DegeneracyError, FlowBreakdown
from .functionals import functional_record, surface_integral
from .geometry import EPS_SPACE, _curvatures, _kappas, compute_snapshot, pinching_margin

log = logging.getLogger(__name__)

DEFAULT_SAFETY = 0.2


def graph_speed(snap):
    """Per-node ``lam/lam' - upsilon/F``."""
    return snap.lam / snap.lam_prime - snap.upsilon / snap.F


def normal_speed(snap):
    """Per-node normal speed ``Theta - 1/F``."""
    return snap.theta_fn - 1.0 / snap.F


def principal_diffusivity(snap):
    """Coefficient of ``r_tt`` in the linearized graph speed, per node.

    Away from the poles ``r_tt`` enters only through the profile curvature,
    giving ``F_1 / (F^2 lam^2 upsilon^2)``.  At the poles both curvatures
    carry ``r_tt``, so the orbit derivative is added ``n - 1`` times.
    """
    Fa, Fb = symfunc.two_value_ratio_gradient(snap.kappa1, snap.kappa2, snap.n, snap.k, snap.E)
    dFdrtt = Fa.copy()
    dFdrtt[[0, -1]] += (snap.n - 1) * Fb[[0, -1]]
    return dFdrtt / (snap.F**2 * snap.lam**2 * snap.upsilon**2)


def stable_dt(snap, dtheta=None, safety=DEFAULT_SAFETY):
    """Explicit step bound ``safety * dtheta**2 / max D``."""
    if dtheta is None:
        dtheta = snap.grid.dtheta
    D = float(np.max(principal_diffusivity(snap)))
    return safety * dtheta**2 / D


@dataclass(frozen=True)
class FlowState:
    t: float
    snapshot: object
    steps: int = 0
    last_dt: float = 0.0
    last_max_speed: float = float("nan")

    @property
    def grid(self):
        return self.snapshot.grid

    @classmethod
    def initial(cls, grid, ambient, k):
        if not (2 <= k <= ambient.n):
            raise ArgumentError(f"flow requires 2 <= k <= n, got k={k}, n={ambient.n}")
        snap = compute_snapshot(grid, ambient, k)
        return cls(0.0, snap, 0, 0.0, float(np.max(np.abs(graph_speed(snap)))))


@dataclass(frozen=True)
class StopCriteria:
    tol_speed: float = 1e-6
    tol_osc: float = 1e-6
    t_max: float = 1e3
    max_steps: int = 10**6

    def __post_init__(self):
        for name in ("tol_speed", "tol_osc", "t_max", "max_steps"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be positive")


@dataclass(frozen=True)
class Monitors:
    """Runtime invariant monitors; violations are flagged, or raised if ``abort``."""

    pinching: bool = True
    cone: bool = True
    tol: float = 1e-8
    abort: bool = False


def _snapshot_or_breakdown(grid, ambient, k):
    try:
        return compute_snapshot(grid, ambient, k)
    except AdmissibilityError as exc:
        raise FlowBreakdown(str(exc), margin=exc.margin, kind="spacelike") from exc
    except DegeneracyError as exc:
        raise FlowBreakdown(str(exc), margin=exc.margin, kind="cone") from exc


def _midpoint_speed(grid, n, k):
    """Graph speed of ``grid`` with the same admissibility checks as a snapshot."""
    lam, lamp, r_t, r_tt, ups2 = _curvatures(grid.r, grid.N)
    worst = float(ups2.min())
    if not worst > EPS_SPACE:
        raise FlowBreakdown(f"profile not spacelike: min upsilon^2 = {worst:.3e}",
                            margin=worst, kind="spacelike")
    upsilon = np.sqrt(ups2)
    kappa1, kappa2 = _kappas(grid.N, lam, lamp, r_t, r_tt, upsilon)
    E = symfunc.two_value_all(kappa1, kappa2, n)
    margin = float(E[1 : k + 1].min())
    if not margin > symfunc.EPS_CONE:
        raise FlowBreakdown(f"k-convexity lost: cone margin {margin:.3e}",
                            margin=margin, kind="cone")
    return lam / lamp - upsilon * E[k - 1] / E[k]


def step(state, dt):
    """Advance one explicit midpoint (RK2) step of size ``dt``.

    Raises
    ------
    FlowBreakdown
        If the midpoint or end state is not spacelike or not k-convex.
    """
    snap = state.snapshot
    grid, ambient, k = snap.grid, snap.ambient, snap.k
    v0 = graph_speed(snap)
    try:
        half = grid.with_r(grid.r + 0.5 * dt * v0)
    except ArgumentError as exc:
        raise FlowBreakdown(str(exc), kind="radius") from exc
    v1 = _midpoint_speed(half, ambient.n, k)
    try:
        new_grid = grid.with_r(grid.r + dt * v1)
    except ArgumentError as exc:
        raise FlowBreakdown(str(exc), kind="radius") from exc
    new = _snapshot_or_breakdown(new_grid, ambient, k)
    speed = float(np.max(np.abs(graph_speed(new))))
    return FlowState(state.t + dt, new, state.steps + 1, dt, speed)


@dataclass
class Violation:
    step: int
    t: float
    monitor: str
    margin: float


@dataclass
class Trajectory:
    """Records emitted along a run plus the profile at every record."""

    ambient: object
    k: int
    theta: np.ndarray
    times: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    records: list = field(default_factory=list)
    reason: str = "running"
    violations: list = field(default_factory=list)
    steps: int = 0
    error: str = ""
    final_state: object = None

    def snapshot(self, index):
        from .geometry import ProfileGrid

        grid = ProfileGrid(self.theta, self.profiles[index])
        return compute_snapshot(grid, self.ambient, self.k)

    @property
    def converged(self):
        return self.reason == "converged"


def _append(traj, state):
    traj.times.append(state.t)
    traj.profiles.append(np.array(state.grid.r))
    traj.records.append(
        functional_record(state.snapshot, state.t, state.last_dt, state.last_max_speed)
    )


def evolve(state, stop=StopCriteria(), monitors=Monitors(), record_every=100,
           record_interval=None, safety=DEFAULT_SAFETY, dt_max=None):
    """Run the flow until convergence, a budget limit or breakdown.

    Convergence needs both ``max|speed| < tol_speed`` and
    ``max r - min r < tol_osc``.

    Parameters
    ----------
    record_every : int
        Emit a record every this many steps (ignored with ``record_interval``).
    record_interval : float, optional
        Emit records at multiples of this flow time; steps are shortened to
        land on them exactly.
    dt_max : float, optional
        Upper bound on the adaptive step.

    Returns
    -------
    Trajectory
        ``reason`` is one of ``converged``, ``t_max``, ``max_steps`` or
        ``breakdown``.
    """
    snap = state.snapshot
    if not (2 <= snap.k <= snap.n):
        raise ArgumentError(f"flow requires 2 <= k <= n, got k={snap.k}")
    traj = Trajectory(snap.ambient, snap.k, np.array(snap.theta))
    _append(traj, state)
    _check_monitors(traj, state, monitors)
    next_record = record_interval
    since_record = 0
    while True:
        r = state.grid.r
        if state.last_max_speed < stop.tol_speed and r.max() - r.min() < stop.tol_osc:
            traj.reason = "converged"
            break
        if state.t >= stop.t_max:
            traj.reason = "t_max"
            break
        if state.steps >= stop.max_steps:
            traj.reason = "max_steps"
            break
        dt = min(stable_dt(state.snapshot, safety=safety), stop.t_max - state.t)
        if dt_max is not None:
            dt = min(dt, dt_max)
        hit = False
        if record_interval is not None and state.t + dt >= next_record - 1e-14 * next_record:
            dt = next_record - state.t
            hit = True
        try:
            state = step(state, dt)
        except FlowBreakdown as exc:
            traj.reason = "breakdown"
            traj.error = str(exc)
            log.warning("flow breakdown at t=%.6g: %s", state.t, exc)
            break
        since_record += 1
        if hit:
            state = FlowState(next_record, state.snapshot, state.steps, state.last_dt,
                              state.last_max_speed)
            next_record += record_interval
        if hit or (record_interval is None and since_record >= record_every):
            _append(traj, state)
            since_record = 0
        _check_monitors(traj, state, monitors)
    if traj.times[-1] != state.t:
        _append(traj, state)
    traj.steps = state.steps
    traj.final_state = state
    return traj


def _check_monitors(traj, state, monitors):
    snap = state.snapshot
    checks = []
    if monitors.pinching:
        checks.append(("pinching", pinching_margin(snap)))
    if monitors.cone:
        checks.append(("cone", float(snap.E[1 : snap.k + 1].min())))
    for name, margin in checks:
        if margin < -monitors.tol:
            traj.violations.append(Violation(state.steps, state.t, name, margin))
            if monitors.abort:
                raise FlowBreakdown(f"{name} monitor violated: {margin:.3e}", margin, name)


def _deriv3(ts, fs):
    """Second-order derivative at the middle of three (possibly uneven) samples."""
    h1, h2 = ts[1] - ts[0], ts[2] - ts[1]
    return (-h2 / (h1 * (h1 + h2)) * fs[0] + (h2 - h1) / (h1 * h2) * fs[1]
            + h1 / (h2 * (h1 + h2)) * fs[2])


def first_variations(snap):
    """Exact time derivatives of ``A_0``, ``B_k`` and ``B_{-1}`` under the flow."""
    n, k = snap.n, snap.k
    f = normal_speed(snap)
    dA0 = n * surface_integral(snap, snap.E[1] * f)
    dBk = (1 + k) * surface_integral(snap, snap.u * snap.E[k] * f)
    if k < n:
        dBk += (n - k) * surface_integral(snap, snap.lam_prime * snap.E[k + 1] * f)
    dBm1 = (n + 1) * surface_integral(snap, snap.lam_prime * f)
    return {"A0": dA0, "Bk": dBk, "Bm1": dBm1}


def variation_residuals(traj, index):
    """Relative mismatch between finite-difference and first-variation derivatives.

    Returns a dict with keys ``A0``, ``Bk`` and ``Bm1``.
    """
    if not (1 <= index <= len(traj.records) - 2):
        raise ArgumentError(f"index {index} needs records on both sides")
    k = traj.k
    ts = traj.times[index - 1 : index + 2]
    recs = traj.records[index - 1 : index + 2]
    series = {
        "A0": [rec.A[0] for rec in recs],
        "Bk": [rec.B[k] for rec in recs],
        "Bm1": [rec.B[-1] for rec in recs],
    }
    exact = first_variations(traj.snapshot(index))
    out = {}
    for key, vals in series.items():
        fd = _deriv3(ts, vals)
        out[key] = abs(fd - exact[key]) / abs(vals[1])
    return out


def heintze_karcher_bound(snap):
    """``(n+1) int (u - lam'/F)`` and its mean-convex upper bound ``(n+1) int (u - lam'/E_1)``."""
    n = snap.n
    lhs = (n + 1) * surface_integral(snap, snap.u - snap.lam_prime / snap.F)
    rhs = (n + 1) * surface_integral(snap, snap.u - snap.lam_prime / snap.E[1])
    return lhs, rhs
