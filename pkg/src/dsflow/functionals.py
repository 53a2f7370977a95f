"""Quadrature of area, quermassintegrals and weighted curvature integrals.

Integrals over an axisymmetric hypersurface reduce to one-dimensional
integrals in the polar angle::

    int_Sigma f dmu = omega_{n-1} * int_0^pi f * upsilon * lam**n * sin(theta)**(n-1) dtheta

The polar integral uses composite Simpson weights against the measure
``sin(theta)**(n-1) dtheta``.  Those weights are rescaled so that they
integrate a constant exactly (to ``omega_n / omega_{n-1}``); integrands that
do not depend on ``theta`` are therefore reproduced to rounding.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import warnings

import numpy as np
from scipy.special import gammaln

from .errors import ArgumentError
from .geometry import pinching_margin


def sphere_area(m):
    """Area ``omega_m`` of the unit ``m``-sphere."""
    return float(2.0 * np.exp(0.5 * (m + 1) * np.log(np.pi) - gammaln(0.5 * (m + 1))))


def simpson_weights(N, h):
    """Composite Simpson weights on ``N + 1`` nodes; trapezoid if ``N`` is odd.

    Returns
    -------
    weights : ndarray
    rule : str
        ``"simpson"`` or ``"trapezoid"``.
    """
    w = np.ones(N + 1)
    if N % 2 == 0:
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (h / 3.0), "simpson"
    w[0] = w[-1] = 0.5
    return w * h, "trapezoid"


@lru_cache(maxsize=64)
def _polar_weights(N, n):
    theta = np.linspace(0.0, np.pi, N + 1)
    w, rule = simpson_weights(N, np.pi / N)
    s = np.sin(theta) ** (n - 1)
    s[0] = s[-1] = 0.0 if n > 1 else 1.0
    raw = w * s
    exact = sphere_area(n) / sphere_area(n - 1)
    out = raw * (exact / raw.sum())
    out.setflags(write=False)
    return out, rule


def polar_weights(N, n):
    """Weights ``W_j`` with ``sum_j W_j g(theta_j) ~ int_0^pi g sin^(n-1) dtheta``."""
    w, rule = _polar_weights(N, n)
    if rule != "simpson":
        warnings.warn(f"N={N} is odd; using the trapezoid rule", RuntimeWarning, stacklevel=3)
    return w


def surface_integral(snap, integrand):
    """``int_Sigma f dmu`` for per-node values ``integrand``."""
    w = polar_weights(snap.grid.N, snap.n)
    dens = snap.upsilon * snap.lam**snap.n
    return sphere_area(snap.n - 1) * float(np.sum(w * np.asarray(integrand) * dens))


def radial_integral(grid, n, values):
    """``omega_{n-1} * int_0^pi g sin^(n-1) dtheta`` over the unit sphere."""
    w = polar_weights(grid.N, n)
    return sphere_area(n - 1) * float(np.sum(w * np.asarray(values)))


def cosh_power_integral(r, n):
    """``int_0^r cosh(s)**n ds`` by the reduction recurrence.

    ``I_n = cosh^(n-1) sinh / n + (n-1)/n * I_(n-2)`` with ``I_0 = r`` and
    ``I_1 = sinh r``.
    """
    r = np.asarray(r, dtype=float)
    c, s = np.cosh(r), np.sinh(r)
    vals = [r, s]
    for m in range(2, n + 1):
        vals.append(c ** (m - 1) * s / m + (m - 1) / m * vals[m - 2])
    return vals[n]


def weighted_integral(snap, l, cross_check=False):
    """Weighted curvature integral ``B_l``.

    ``B_l = int lam' E_l dmu`` for ``l >= 0``.  ``B_{-1}`` comes from the
    radial reduction ``int_{S^n} cosh(r)^(n+1)``; with ``cross_check=True``
    the pair ``(volume form, int u dmu)`` is returned instead.
    """
    n = snap.n
    if not (-1 <= l <= n):
        raise ArgumentError(f"l={l} outside -1..{n}")
    if l >= 0:
        return surface_integral(snap, snap.lam_prime * snap.E[l])
    vol = radial_integral(snap.grid, n, snap.lam ** (n + 1))
    if cross_check:
        return vol, surface_integral(snap, snap.u)
    return vol


def quermassintegral(snap, l):
    """Quermassintegral ``A_l`` for ``l`` in ``-1..n``.

    ``A_{-1} = (n+1) vol``, ``A_0 = area`` and for ``l >= 1``
    ``A_l = int E_l dmu + l/(n-l+2) A_{l-2}`` (de Sitter: ``eps K = -1``).
    """
    n = snap.n
    if not (-1 <= l <= n):
        raise ArgumentError(f"l={l} outside -1..{n}")
    if l == -1:
        return (n + 1) * radial_integral(snap.grid, n, cosh_power_integral(snap.r, n))
    if l == 0:
        return surface_integral(snap, np.ones_like(snap.r))
    return surface_integral(snap, snap.E[l]) + l / (n - l + 2) * quermassintegral(snap, l - 2)


def all_quermassintegrals(snap):
    n = snap.n
    A = {-1: quermassintegral(snap, -1), 0: quermassintegral(snap, 0)}
    for l in range(1, n + 1):
        A[l] = surface_integral(snap, snap.E[l]) + l / (n - l + 2) * A[l - 2]
    return A


def minkowski_residual(snap, l):
    """Relative defect of ``int u E_l dmu = int lam' E_{l-1} dmu``."""
    n = snap.n
    if not (1 <= l <= n):
        raise ArgumentError(f"l={l} outside 1..{n}")
    lhs = surface_integral(snap, snap.u * snap.E[l])
    rhs = surface_integral(snap, snap.lam_prime * snap.E[l - 1])
    return (lhs - rhs) / max(abs(rhs), 1.0)


@dataclass
class FunctionalRecord:
    """Functionals and admissibility margins of one snapshot at time ``t``."""

    t: float
    A: dict
    B: dict
    minkowski_residual: dict
    margin_space: float
    margin_cone: float
    margin_pinch: float
    max_r: float
    min_r: float
    max_u: float
    dt: float = 0.0
    max_speed: float = 0.0
    B_minus1_dual: float = field(default=float("nan"))

    @property
    def margins(self):
        return self.margin_space, self.margin_cone, self.margin_pinch


def functional_record(snap, t=0.0, dt=0.0, max_speed=0.0):
    n, k = snap.n, snap.k
    B = {l: weighted_integral(snap, l) for l in range(0, n + 1)}
    vol, dual = weighted_integral(snap, -1, cross_check=True)
    B[-1] = vol
    return FunctionalRecord(
        t=float(t),
        A=all_quermassintegrals(snap),
        B=dict(sorted(B.items())),
        minkowski_residual={l: minkowski_residual(snap, l) for l in range(1, n + 1)},
        margin_space=float(np.min(snap.upsilon**2)),
        margin_cone=float(snap.E[1 : k + 1].min()),
        margin_pinch=pinching_margin(snap),
        max_r=float(snap.r.max()),
        min_r=float(snap.r.min()),
        max_u=float(snap.u.max()),
        dt=float(dt),
        max_speed=float(max_speed),
        B_minus1_dual=dual,
    )
