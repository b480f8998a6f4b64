"""Coordinates ``(xi, eta) = (x - y, Z(x, y))`` and the coefficients of the
transformed viscous equation

    u_t + u u_eta = K(xi) u_eta_eta + A(xi) u_xi_eta + 2 u_xi_xi + B(xi) u_eta.

All coefficients depend on the curve only through ``phi'`` and ``phi''`` at
``G(xi)``, the abscissa where the characteristic line ``x - y = xi`` meets
the curve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import Line, MollifiedPolyline

_SAMPLE_POINTS = 100_001


@dataclass(frozen=True)
class CoeffSample:
    xi: np.ndarray | float
    K: np.ndarray | float
    A: np.ndarray | float
    B: np.ndarray | float
    Kprime: np.ndarray | float
    d: np.ndarray | float


def coefficients_from_slope(p1, p2):
    """``(K, A, B, K', d)`` from ``phi'`` and ``phi''`` at the foot point."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    q = 1.0 - p1
    K = (1.0 + p1 * p1) / (q * q)
    A = -2.0 * (1.0 + p1) / q
    B = -2.0 * p2 / q**3
    # G' = 1/q folded in
    Kp = 2.0 * (1.0 + p1) * p2 / q**4
    return K, A, B, Kp, local_ellipticity(K, A)


def local_ellipticity(K, A):
    """Smaller eigenvalue of ``[[K, A/2], [A/2, 2]]``."""
    half_trace = 0.5 * (K + 2.0)
    radius = np.sqrt((0.5 * (K - 2.0)) ** 2 + 0.25 * A * A)
    return half_trace - radius


def eval_KAB(curve, xi, g=None):
    """:class:`CoeffSample` at ``xi`` (scalar or array)."""
    xi_arr = np.asarray(xi, dtype=float)
    if g is None:
        g = geometry.G(curve, xi_arr)
    _, p1, p2 = curve.eval(g)
    K, A, B, Kp, d = coefficients_from_slope(p1, p2)
    if xi_arr.ndim == 0:
        K, A, B, Kp, d = (float(v) for v in (K, A, B, Kp, d))
        return CoeffSample(float(xi_arr), K, A, B, Kp, d)
    return CoeffSample(xi_arr, K, A, B, Kp, d)


def B_by_difference(curve, xi, h=1e-5):
    """``d/dxi [-2 / (1 - phi'(G(xi)))]`` by a central difference."""
    xi = np.asarray(xi, dtype=float)

    def f(s):
        return -2.0 / (1.0 - curve.dphi(geometry.G(curve, s)))

    return (f(xi + h) - f(xi - h)) / (2.0 * h)


def support_interval(curve):
    """``(G1, G2)``: the xi-interval outside which ``K' = B = 0``.

    ``None`` for a line (coefficients constant); the whole real line for a
    smooth perturbation without compact support.
    """
    if isinstance(curve, Line):
        return None
    if isinstance(curve, MollifiedPolyline):
        e = curve.eps0
        return (-e - float(curve.phi(-e)), e - float(curve.phi(e)))
    return (-np.inf, np.inf)


def _foot_samples(curve):
    """Dense sample of foot points ``G`` covering every slope the curve attains."""
    if isinstance(curve, Line):
        return np.array([0.0])
    if isinstance(curve, MollifiedPolyline):
        return np.linspace(-curve.eps0, curve.eps0, _SAMPLE_POINTS)
    w = curve.width
    return np.linspace(-50.0 * w, 50.0 * w, _SAMPLE_POINTS)


def ellipticity_constant(curve):
    """Largest ``d`` with ``K a1^2 + A a1 a2 + 2 a2^2 >= d (a1^2 + a2^2)`` for all xi."""
    g = _foot_samples(curve)
    _, p1, p2 = curve.eval(g)
    slopes = np.concatenate([p1, [curve.k1, curve.k2]])
    K, A, _, _, d = coefficients_from_slope(slopes, np.zeros_like(slopes))
    return float(d.min())


def coefficient_bounds(curve):
    """Sharp per-curve bounds ``K1 <= K <= K2``, ``|A| <= A_max``, ``|B| <= B_max``."""
    g = _foot_samples(curve)
    _, p1, p2 = curve.eval(g)
    slopes = np.concatenate([p1, [curve.k1, curve.k2]])
    curv = np.concatenate([p2, [0.0, 0.0]])
    K, A, B, Kp, d = coefficients_from_slope(slopes, curv)
    lo, hi = curve.slope_range
    K_exact = [((1 + s * s) / (1 - s) ** 2) for s in (lo, hi)]
    if lo < -1.0 < hi:
        K_exact.append(0.5)  # K is minimised at slope -1
    return {
        "K1": float(min(K.min(), *K_exact)),
        "K2": float(max(K.max(), *K_exact)),
        "A_max": float(np.abs(A).max()),
        "B_max": float(np.abs(B).max()),
        "Kprime_max": float(np.abs(Kp).max()),
        "d": float(d.min()),
    }


def to_transformed(curve, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x - y, geometry.Z(curve, x, y)


def from_transformed(curve, xi, eta):
    """Inverse map via ``x = G(xi) + eta``, ``y = x - xi``."""
    xi = np.asarray(xi, dtype=float)
    x = geometry.G(curve, xi) + np.asarray(eta, dtype=float)
    return x, x - xi


def jacobian(curve, x, y, h=1e-5):
    """Determinant of ``d(xi, eta)/d(x, y)`` by central differences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xi_xp, eta_xp = to_transformed(curve, x + h, y)
    xi_xm, eta_xm = to_transformed(curve, x - h, y)
    xi_yp, eta_yp = to_transformed(curve, x, y + h)
    xi_ym, eta_ym = to_transformed(curve, x, y - h)
    a = (xi_xp - xi_xm) / (2 * h)
    b = (xi_yp - xi_ym) / (2 * h)
    c = (eta_xp - eta_xm) / (2 * h)
    e = (eta_yp - eta_ym) / (2 * h)
    return a * e - b * c
