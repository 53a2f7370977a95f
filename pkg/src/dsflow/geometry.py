"""Extrinsic geometry of axisymmetric spacelike radial graphs in de Sitter space.

De Sitter space is modelled as ``(0, inf) x S^n`` with metric
``-dr^2 + cosh(r)^2 sigma``.  A hypersurface is the graph ``r = r(theta)``
of a function of the polar angle only, sampled on a uniform grid over
``[0, pi]``.  Derivatives use second-order centered differences with even
ghost values ``r[-1] = r[1]`` and ``r[N+1] = r[N-1]`` at the poles.

For such a graph (with ``lam = cosh r`` and ``lamp = sinh r``)::

    upsilon = sqrt(1 - r_t**2 / lam**2)
    kappa1  = (r_tt + lam*lamp - 2*(lamp/lam)*r_t**2) / (lam**2 * upsilon**3)
    kappa2  = (cot(theta)*r_t + lam*lamp) / (lam**2 * upsilon)

``kappa1`` belongs to the profile direction and ``kappa2`` (multiplicity
``n - 1``) to the orbit sphere.  At the poles ``cot(theta)*r_t`` is replaced
by its limit ``r_tt``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import symfunc
from .errors import AdmissibilityError, ArgumentError, DegeneracyError

EPS_SPACE = 1e-8
THETA_POLE_TOL = 1e-8


@dataclass(frozen=True)
class AmbientParams:
    """De Sitter ambient data for ``S^n``: ``lambda = cosh``, ``lambda' = sinh``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ArgumentError(f"dimension n must be an integer >= 2, got {self.n}")
        if self.n > symfunc.MAX_DIM:
            raise ArgumentError(f"dimension n={self.n} exceeds {symfunc.MAX_DIM}")

    @staticmethod
    def lam(r):
        return np.cosh(r)

    @staticmethod
    def lam_prime(r):
        return np.sinh(r)


def ambient_eval(r):
    """Return ``(cosh r, sinh r)``."""
    return np.cosh(r), np.sinh(r)


@dataclass(frozen=True, eq=False)
class ProfileGrid:
    """Nodal radial values on the uniform polar grid ``theta_j = j*pi/N``."""

    theta: np.ndarray
    r: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if theta.ndim != 1 or theta.shape != r.shape:
            raise ArgumentError("theta and r must be 1-d arrays of equal length")
        if theta.size < 3:
            raise ArgumentError("need at least 3 nodes")
        N = theta.size - 1
        expected = np.linspace(0.0, np.pi, N + 1)
        if np.max(np.abs(theta - expected)) > 1e-12:
            raise ArgumentError("theta must be the uniform grid on [0, pi]")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise ArgumentError("radial values must be finite and positive")
        theta.setflags(write=False)
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "r", r)

    @property
    def N(self):
        return self.theta.size - 1

    @property
    def dtheta(self):
        return np.pi / self.N

    def with_r(self, r):
        """Same nodes, new radial values (theta is not re-validated)."""
        r = np.array(r, dtype=float)
        if r.shape != self.theta.shape:
            raise ArgumentError("r must match the grid size")
        if not np.all(r > 0) or not np.all(np.isfinite(r)):
            raise ArgumentError("radial values must be finite and positive")
        r.setflags(write=False)
        new = object.__new__(ProfileGrid)
        object.__setattr__(new, "theta", self.theta)
        object.__setattr__(new, "r", r)
        object.__setattr__(new, "meta", {})
        return new

    @classmethod
    def from_values(cls, r, **meta):
        r = np.asarray(r, dtype=float)
        return cls(np.linspace(0.0, np.pi, r.size), r, dict(meta))

    @classmethod
    def from_function(cls, N, func, **meta):
        theta = np.linspace(0.0, np.pi, N + 1)
        return cls(theta, np.asarray(func(theta), dtype=float) * np.ones_like(theta), dict(meta))

    @classmethod
    def slice(cls, N, rho):
        return cls.from_function(N, lambda th: np.full_like(th, float(rho)), kind="slice", rho=rho)

    @classmethod
    def cosine_series(cls, N, rho0, coeffs):
        """``r = rho0 + sum_m coeffs[m-1] * cos(m theta)``."""
        coeffs = [float(c) for c in coeffs]

        def f(th):
            out = np.full_like(th, float(rho0))
            for m, a in enumerate(coeffs, start=1):
                if a != 0.0:
                    out = out + a * np.cos(m * th)
            return out

        return cls.from_function(N, f, kind="cosine", rho0=rho0, coeffs=coeffs)


@lru_cache(maxsize=32)
def _grid_consts(N):
    theta = np.linspace(0.0, np.pi, N + 1)
    poles = (theta < THETA_POLE_TOL) | (theta > np.pi - THETA_POLE_TOL)
    cot = np.zeros_like(theta)
    cot[~poles] = np.cos(theta[~poles]) / np.sin(theta[~poles])
    sin = np.sin(theta)
    sin[poles] = 0.0
    for a in (theta, poles, cot, sin):
        a.setflags(write=False)
    return theta, poles, cot, sin


def theta_derivatives(r, dtheta):
    """Centered first and second derivatives with even reflection at the poles."""
    r = np.asarray(r, dtype=float)
    d = np.diff(r)
    r_t = np.zeros_like(r)
    r_t[1:-1] = (d[1:] + d[:-1]) / (2.0 * dtheta)
    r_tt = np.empty_like(r)
    r_tt[1:-1] = (d[1:] - d[:-1]) / dtheta**2
    r_tt[0] = 2.0 * d[0] / dtheta**2
    r_tt[-1] = -2.0 * d[-1] / dtheta**2
    return r_t, r_tt


def pole_mask(theta):
    return (theta < THETA_POLE_TOL) | (theta > np.pi - THETA_POLE_TOL)


@dataclass(frozen=True, eq=False)
class GeometrySnapshot:
    """Per-node geometry of a profile.  Arrays are read-only."""

    grid: ProfileGrid
    ambient: AmbientParams
    k: int
    lam: np.ndarray
    lam_prime: np.ndarray
    r_t: np.ndarray
    r_tt: np.ndarray
    upsilon: np.ndarray
    u: np.ndarray
    theta_fn: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    E: np.ndarray
    F: np.ndarray
    area_density: np.ndarray

    @property
    def n(self):
        return self.ambient.n

    @property
    def theta(self):
        return self.grid.theta

    @property
    def r(self):
        return self.grid.r

    def kappa_tuples(self):
        """Expanded ``(N+1, n)`` array of principal curvatures."""
        return symfunc.TwoValueCurvature(self.kappa1, self.kappa2, self.n).expand()


def _curvatures(r, N):
    """Return ``lam, lam', r_t, r_tt, upsilon**2`` for nodal values ``r``."""
    lam, lamp = np.cosh(r), np.sinh(r)
    r_t, r_tt = theta_derivatives(r, np.pi / N)
    q = r_t / lam
    return lam, lamp, r_t, r_tt, 1.0 - q * q


def _kappas(N, lam, lamp, r_t, r_tt, upsilon):
    cot = _grid_consts(N)[2]
    lam2 = lam * lam
    ll = lam * lamp
    kappa1 = (r_tt + ll - 2.0 * (lamp / lam) * (r_t * r_t)) / (lam2 * upsilon**3)
    cot_rt = cot * r_t
    kappa2 = (cot_rt + ll) / (lam2 * upsilon)
    # Poles: cot(theta) r_t -> r_tt, which makes kappa2 identical to kappa1.
    kappa2[0] = kappa1[0]
    kappa2[-1] = kappa1[-1]
    return kappa1, kappa2


def compute_snapshot(grid, ambient, k, eps_space=EPS_SPACE, eps_cone=symfunc.EPS_CONE):
    """Evaluate the full extrinsic geometry of ``grid``.

    Parameters
    ----------
    grid : ProfileGrid
    ambient : AmbientParams
    k : int
        Level of the quotient ``F = E_k / E_{k-1}``; ``1 <= k <= n``.

    Raises
    ------
    AdmissibilityError
        If ``upsilon**2 <= eps_space`` at some node.
    DegeneracyError
        If the curvatures leave the cone ``Gamma_k^+`` at some node.
    """
    n = ambient.n
    if not (1 <= k <= n):
        raise ArgumentError(f"k={k} outside 1..{n}")
    N = grid.N
    lam, lamp, r_t, r_tt, ups2 = _curvatures(grid.r, N)
    worst = float(ups2.min())
    if not worst > eps_space:
        raise AdmissibilityError(
            f"profile not spacelike: min upsilon^2 = {worst:.3e}", margin=worst
        )
    upsilon = np.sqrt(ups2)
    kappa1, kappa2 = _kappas(N, lam, lamp, r_t, r_tt, upsilon)
    E = symfunc.two_value_all(kappa1, kappa2, n)
    margin = float(E[1 : k + 1].min())
    if not margin > eps_cone:
        raise DegeneracyError(
            f"k-convexity lost: cone margin {margin:.3e} <= {eps_cone:.1e}", margin=margin
        )
    F = E[k] / E[k - 1]
    u = lam / upsilon
    sin = _grid_consts(N)[3]
    area_density = upsilon * lam**n * sin ** (n - 1)
    arrays = dict(
        lam=lam, lam_prime=lamp, r_t=r_t, r_tt=r_tt, upsilon=upsilon, u=u,
        theta_fn=u / lamp, kappa1=kappa1, kappa2=kappa2, E=E, F=F,
        area_density=area_density,
    )
    for a in arrays.values():
        a.setflags(write=False)
    return GeometrySnapshot(grid=grid, ambient=ambient, k=k, **arrays)


def pinching_margin(snap):
    """``min`` over nodes of ``Theta - kappa_i``; the pinching holds iff it is >= 0."""
    return float(
        min(np.min(snap.theta_fn - snap.kappa1), np.min(snap.theta_fn - snap.kappa2))
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    spacelike_margin: float
    cone_margin: float
    pinching_margin: float
    tol: float = 0.0

    @property
    def spacelike(self):
        return self.spacelike_margin > self.tol

    @property
    def k_convex(self):
        return self.cone_margin > self.tol

    @property
    def pinched(self):
        return self.pinching_margin > self.tol

    @property
    def admissible(self):
        return self.spacelike and self.k_convex and self.pinched

    def as_dict(self):
        return {
            "spacelike": self.spacelike,
            "k_convex": self.k_convex,
            "pinched": self.pinched,
            "admissible": self.admissible,
            "margin_space": self.spacelike_margin,
            "margin_cone": self.cone_margin,
            "margin_pinch": self.pinching_margin,
            "tol": self.tol,
        }


def admissibility_check(grid, ambient, k, tol=0.0):
    """Report spacelike, k-convex and pinching margins without raising.

    Margins that cannot be evaluated (curvatures on a non-spacelike
    profile) are reported as ``-inf``.
    """
    n = ambient.n
    if not (1 <= k <= n):
        raise ArgumentError(f"k={k} outside 1..{n}")
    lam, lamp, r_t, r_tt, ups2 = _curvatures(grid.r, grid.N)
    space = float(ups2.min())
    if not space > 0:
        return AdmissibilityReport(space, -np.inf, -np.inf, tol)
    upsilon = np.sqrt(ups2)
    kappa1, kappa2 = _kappas(grid.N, lam, lamp, r_t, r_tt, upsilon)
    E = symfunc.two_value_all(kappa1, kappa2, n)
    cone = float(E[1 : k + 1].min())
    big_theta = lam / (upsilon * lamp)
    pinch = float(min(np.min(big_theta - kappa1), np.min(big_theta - kappa2)))
    return AdmissibilityReport(space, cone, pinch, tol)
