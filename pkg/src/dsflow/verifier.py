"""Inequality audits, slice reference functions and random admissible profiles."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DegeneracyError, DomainError, SamplerError
from .functionals import sphere_area, surface_integral
from .geometry import AmbientParams, ProfileGrid, admissibility_check

TARGET_CLASSES = ("mean-convex", "k-convex", "pinched-admissible")


def slice_functionals(rho, n, k):
    """``(phi_{-1}(rho), phi_k(rho))`` for the coordinate slice ``r = rho``.

    ``phi_{-1} = omega_n cosh^(n+1)`` and
    ``phi_k = omega_n cosh^(n-k) sinh^(k+1)``; both increase strictly.
    """
    if not np.all(np.asarray(rho) > 0):
        raise ArgumentError(f"rho must be positive, got {rho}")
    on = sphere_area(n)
    c, s = np.cosh(rho), np.sinh(rho)
    return on * c ** (n + 1), on * c ** (n - k) * s ** (k + 1)


def phi_minus1_inverse(y, n, tol=0.0):
    """Invert ``rho -> omega_n cosh(rho)^(n+1)`` by bisection.

    With the default ``tol=0`` bisection runs until the bracket stops
    shrinking in floating point.
    """
    on = sphere_area(n)
    if y < on:
        raise DomainError(f"value {y!r} below the infimum omega_n = {on!r}")
    if y == on:
        return 0.0
    f = lambda rho: on * np.cosh(rho) ** (n + 1)
    lo, hi = 0.0, 1.0
    while f(hi) < y:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def af_check(B_k_val, B_minus1_val, n, k):
    """Gap ``phi_k(phi_{-1}^{-1}(B_{-1})) - B_k``; nonnegative when the inequality holds."""
    rho = phi_minus1_inverse(B_minus1_val, n)
    if rho == 0.0:
        return -float(B_k_val)
    return float(slice_functionals(rho, n, k)[1] - B_k_val)


def heintze_karcher_gap(snap, eps_cone=1e-10):
    """``int lam'/E_1 dmu - int u dmu`` on a mean-convex snapshot.

    Raises
    ------
    DegeneracyError
        If ``min E_1 <= eps_cone``.
    """
    E1 = snap.E[1]
    worst = float(E1.min())
    if not worst > eps_cone:
        raise DegeneracyError(f"not mean convex: min E_1 = {worst:.3e}", margin=worst)
    return surface_integral(snap, snap.lam_prime / E1) - surface_integral(snap, snap.u)


@dataclass(frozen=True)
class SamplerParams:
    rho0: float = 1.0
    M: int = 4
    amp_max: float = 0.05
    n: int = 3
    k: int = 2
    target_class: str = "pinched-admissible"
    seed: int = 0
    N: int = 64
    max_attempts: int = 10**4

    def __post_init__(self):
        if not self.rho0 > 0:
            raise ArgumentError("rho0 must be positive")
        if self.amp_max < 0:
            raise ArgumentError("amp_max must be nonnegative")
        if self.M < 1:
            raise ArgumentError("M must be at least 1")
        if self.target_class not in TARGET_CLASSES:
            raise ArgumentError(f"unknown target class {self.target_class!r}")
        if not (1 <= self.k <= self.n):
            raise ArgumentError(f"k={self.k} outside 1..{self.n}")


def _class_margin(report, target_class):
    if target_class == "pinched-admissible":
        return min(report.spacelike_margin, report.cone_margin, report.pinching_margin)
    return min(report.spacelike_margin, report.cone_margin)


def random_admissible_sampler(params):
    """Draw ``r = rho0 + sum_m a_m cos(m theta)`` until it meets ``target_class``.

    Coefficients are uniform in ``[-amp_max/m^2, amp_max/m^2]`` from a
    generator seeded with ``params.seed``.  The returned grid carries the
    coefficients and attempt count in ``grid.meta``.

    Raises
    ------
    SamplerError
        When ``max_attempts`` draws all fail.
    """
    rng = np.random.default_rng(params.seed)
    ambient = AmbientParams(params.n)
    k = 1 if params.target_class == "mean-convex" else params.k
    bounds = params.amp_max / np.arange(1, params.M + 1) ** 2
    for attempt in range(1, params.max_attempts + 1):
        coeffs = rng.uniform(-1.0, 1.0, params.M) * bounds
        try:
            grid = ProfileGrid.cosine_series(params.N, params.rho0, coeffs)
        except ArgumentError:
            continue
        report = admissibility_check(grid, ambient, k)
        if _class_margin(report, params.target_class) > 0:
            grid.meta.update(attempts=attempt, seed=params.seed,
                             target_class=params.target_class, report=report.as_dict())
            return grid
    raise SamplerError(
        f"no {params.target_class} sample in {params.max_attempts} attempts; "
        "try a smaller amp_max"
    )


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    index: int
    tol: float
    violations: list = field(default_factory=list)


@dataclass
class AuditReport:
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def summary(self):
        return {
            name: {"passed": c.passed, "worst": c.worst, "index": c.index, "tol": c.tol,
                   "violations": list(c.violations)}
            for name, c in self.checks.items()
        }


def _monotone(name, values, sign, tol):
    """``sign=+1``: non-decreasing; ``sign=-1``: non-increasing.

    ``worst`` is the most negative signed increment; ``index`` is the later
    record of that pair.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return CheckResult(name, True, 0.0, -1, tol)
    inc = sign * np.diff(values)
    idx = int(np.argmin(inc))
    bad = [int(i) + 1 for i in np.nonzero(inc < -tol)[0]]
    return CheckResult(name, not bad, float(min(inc[idx], 0.0)), idx + 1, tol, bad)


def _floor(name, values, tol):
    values = np.asarray(values, dtype=float)
    idx = int(np.argmin(values))
    bad = [int(i) for i in np.nonzero(values < -tol)[0]]
    return CheckResult(name, not bad, float(values[idx]), idx, tol, bad)


def monotonicity_audit(traj, tol=1e-8):
    """Check monotonicity and preservation claims across consecutive records.

    Each monotone series is allowed a slack of ``tol`` times its largest
    magnitude; margins must stay above ``-tol``.
    """
    recs = traj.records
    if len(recs) < 2:
        raise ArgumentError("audit needs at least two records")
    k = traj.k

    def series(get):
        vals = np.array([get(r) for r in recs], dtype=float)
        return vals, tol * max(float(np.max(np.abs(vals))), 1e-300)

    checks = {}
    for name, get, sign in (
        ("B_k", lambda r: r.B[k], +1),
        ("B_-1", lambda r: r.B[-1], -1),
        ("max_r", lambda r: r.max_r, -1),
        ("min_r", lambda r: r.min_r, +1),
        ("max_u", lambda r: r.max_u, -1),
    ):
        vals, slack = series(get)
        checks[name] = _monotone(name, vals, sign, slack)
    checks["pinching"] = _floor("pinching", [r.margin_pinch for r in recs], tol)
    checks["cone"] = _floor("cone", [r.margin_cone for r in recs], tol)
    return AuditReport(checks)
