"""Normalized elementary symmetric functions and the quotient E_k / E_{k-1}.

All functions accept a single curvature vector of shape ``(n,)`` or a stack
of them with shape ``(..., n)``; reductions run over the last axis.

The axisymmetric fast path works with "two-value" curvatures: one profile
curvature ``a`` with multiplicity 1 and one orbit curvature ``b`` with
multiplicity ``n - 1``.  For these,

    E_l = ((n - l) / n) * b**l + (l / n) * a * b**(l - 1).
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ArgumentError, DegeneracyError

EPS_CONE = 1e-10
MAX_DIM = 16


@dataclass(frozen=True)
class TwoValueCurvature:
    """Curvatures ``(a, b, ..., b)`` with ``b`` repeated ``n - 1`` times."""

    kappa_profile: object
    kappa_orbit: object
    n: int

    def expand(self):
        a = np.asarray(self.kappa_profile, dtype=float)
        b = np.asarray(self.kappa_orbit, dtype=float)
        a, b = np.broadcast_arrays(a, b)
        out = np.repeat(b[..., None], self.n, axis=-1)
        out[..., 0] = a
        return out


def _as_kappa(kappa):
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim == 0:
        raise ArgumentError("curvature tuple must be at least one-dimensional")
    n = kappa.shape[-1]
    if n < 1 or n > MAX_DIM:
        raise ArgumentError(f"dimension n={n} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(kappa)):
        raise ArgumentError("curvatures must be finite")
    return kappa


def _check_level(l, n, lo=0):
    if not (lo <= l <= n):
        raise ArgumentError(f"level l={l} outside {lo}..{n}")


def elem_sym_all(kappa):
    """Return ``(E_0, ..., E_n)`` stacked on the last axis.

    The raw polynomials are the coefficients of ``prod_i (1 + kappa_i x)``,
    built one factor at a time, then divided by the binomial coefficients.
    """
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    sigma = np.zeros(kappa.shape[:-1] + (n + 1,))
    sigma[..., 0] = 1.0
    for i in range(n):
        x = kappa[..., i : i + 1]
        # Update high degrees first so each factor is used once.
        sigma[..., 1 : i + 2] = sigma[..., 1 : i + 2] + x * sigma[..., 0 : i + 1]
    binom = np.array([comb(n, l) for l in range(n + 1)], dtype=float)
    return sigma / binom


def elem_sym_normalized(kappa, l):
    """Normalized elementary symmetric function ``E_l = sigma_l / C(n, l)``.

    Parameters
    ----------
    kappa : array_like, shape (..., n)
        Principal curvatures.
    l : int
        Level in ``0..n``.  ``E_0 = 1``.

    Returns
    -------
    float or ndarray
    """
    kappa = _as_kappa(kappa)
    _check_level(l, kappa.shape[-1])
    out = elem_sym_all(kappa)[..., l]
    return float(out) if out.ndim == 0 else out


def elem_sym_two_value(tv, l):
    """``E_l`` of a two-value curvature in closed binomial form."""
    n = tv.n
    if n < 1:
        raise ArgumentError("n must be positive")
    _check_level(l, n)
    a = np.asarray(tv.kappa_profile, dtype=float)
    b = np.asarray(tv.kappa_orbit, dtype=float)
    if l == 0:
        out = np.ones(np.broadcast(a, b).shape)
    else:
        out = ((n - l) / n) * b**l + (l / n) * a * b ** (l - 1)
    return float(out) if out.ndim == 0 else out


def two_value_all(a, b, n):
    """Stack of ``E_0 .. E_n`` for two-value curvatures, level on axis 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        a, b = np.broadcast_arrays(a, b)
    out = np.empty((n + 1,) + a.shape)
    out[0] = 1.0
    out[1] = ((n - 1) / n) * b + a / n
    bp = b  # b**(l-1)
    for l in range(2, n + 1):
        out[l] = bp * (((n - l) / n) * b + (l / n) * a)
        if l < n:
            bp = bp * b
    return out


def cone_membership(kappa, k):
    """Margin ``min_{1<=l<=k} E_l``; ``kappa`` lies in the cone iff it is positive."""
    kappa = _as_kappa(kappa)
    _check_level(k, kappa.shape[-1], lo=1)
    out = elem_sym_all(kappa)[..., 1 : k + 1].min(axis=-1)
    return float(out) if out.ndim == 0 else out


def _raise_if_degenerate(margin, eps_cone):
    worst = float(np.min(margin))
    if not worst > eps_cone:
        raise DegeneracyError(
            f"curvatures outside the cone: margin {worst:.3e} <= {eps_cone:.1e}",
            margin=worst,
        )


def curvature_ratio(kappa, k, eps_cone=EPS_CONE):
    """Curvature quotient ``F = E_k / E_{k-1}``.

    Raises
    ------
    DegeneracyError
        If the cone margin is not above ``eps_cone``.
    """
    kappa = _as_kappa(kappa)
    _check_level(k, kappa.shape[-1], lo=1)
    E = elem_sym_all(kappa)
    _raise_if_degenerate(E[..., 1 : k + 1].min(axis=-1), eps_cone)
    out = E[..., k] / E[..., k - 1]
    return float(out) if out.ndim == 0 else out


def curvature_ratio_gradient(kappa, k, eps_cone=EPS_CONE):
    """Analytic gradient of ``F = E_k / E_{k-1}`` with respect to each ``kappa_i``.

    Uses ``dE_l/dkappa_i = (l/n) E_{l-1}(kappa without i)`` where the reduced
    function is normalized over ``n - 1`` entries.
    """
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    _check_level(k, n, lo=1)
    E = elem_sym_all(kappa)
    _raise_if_degenerate(E[..., 1 : k + 1].min(axis=-1), eps_cone)
    grad = np.empty_like(kappa)
    for i in range(n):
        rest = np.delete(kappa, i, axis=-1)
        if n > 1:
            Er = elem_sym_all(rest)
        else:
            Er = np.ones(kappa.shape[:-1] + (1,))
        dEk = (k / n) * Er[..., k - 1]
        dEkm1 = ((k - 1) / n) * Er[..., k - 2] if k >= 2 else 0.0
        grad[..., i] = (dEk * E[..., k - 1] - E[..., k] * dEkm1) / E[..., k - 1] ** 2
    return grad


def two_value_ratio_gradient(a, b, n, k, E=None):
    """``(dF/da, dF/db_j)`` for two-value curvatures.

    ``dF/db_j`` is the derivative with respect to a single orbit entry, so
    the directional derivative along all orbit entries is ``(n-1)`` times it.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if E is None:
        E = two_value_all(a, b, n)
    Ek, Ekm1 = E[k], E[k - 1]
    # Drop the profile entry: n-1 copies of b.
    d_a_k = (k / n) * b ** (k - 1)
    d_a_km1 = ((k - 1) / n) * b ** (k - 2) if k >= 2 else np.zeros_like(b)
    # Drop one orbit entry: (a, b x (n-2)) over n-1 entries.
    if n >= 2:
        R = two_value_all(a, b, n - 1)
        d_b_k = (k / n) * R[k - 1]
        d_b_km1 = ((k - 1) / n) * R[k - 2] if k >= 2 else np.zeros_like(b)
    else:
        d_b_k = d_b_km1 = np.zeros_like(b)
    den = Ekm1**2
    Fa = (d_a_k * Ekm1 - Ek * d_a_km1) / den
    Fb = (d_b_k * Ekm1 - Ek * d_b_km1) / den
    return Fa, Fb
