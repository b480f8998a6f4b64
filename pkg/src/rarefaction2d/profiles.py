"""Smooth rarefaction ansatz ``w`` and the viscous profile ``v``.

``w(t, eta)`` transports the arctan initial ramp ``w0`` along straight
characteristics. ``v(t, xi, eta)`` solves the one-dimensional Burgers
equation in ``eta`` with viscosity ``K(xi)`` from the same data; it is
evaluated from the Hopf-Cole quotient of integrals

    v = <(eta - y)/t>,   weights exp(E(y)),
    E(y) = -(eta - y)^2 / (4 K t) - W0(y) / (2 K),

where ``W0`` is the antiderivative of ``w0``. ``E`` is strictly concave
with its peak at the characteristic foot ``eta - w t``, so a window of a
few diffusion lengths around that point carries all of the mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transform
from .errors import QuadratureNotConverged
from .geometry import Line, safeguarded_newton
from .norms import DecaySeries, lp_norm

KAPPA = 2.0 / math.pi
_GL_ORDER = 16
_RAMP_HALF = 8.0
_CHUNK = 1 << 21


@dataclass(frozen=True)
class ProfileParams:
    u_minus: float
    u_plus: float
    window: float = 12.0
    panels: int = 4
    max_panels: int = 512
    quad_tol: float = 1e-11
    root_tol: float = 1e-13
    t_min: float = 1e-3

    def __post_init__(self):
        if not self.u_minus <= self.u_plus:
            raise ValueError("u_minus must not exceed u_plus")

    @property
    def mid(self):
        return 0.5 * (self.u_plus + self.u_minus)

    @property
    def half_jump(self):
        return 0.5 * (self.u_plus - self.u_minus)


def w0(params, eta):
    """Initial ramp from ``u_minus`` to ``u_plus``, centred at 0."""
    eta = np.asarray(eta, dtype=float)
    return params.mid + params.half_jump * KAPPA * np.arctan(eta)


def w0_prime(params, eta):
    eta = np.asarray(eta, dtype=float)
    return params.half_jump * KAPPA / (1.0 + eta * eta)


def w0_antiderivative(params, y):
    """``int_0^y w0``."""
    y = np.asarray(y, dtype=float)
    return params.mid * y + params.half_jump * KAPPA * (y * np.arctan(y) - 0.5 * np.log1p(y * y))


def eval_w(params, t, eta):
    """Inviscid solution: root of ``w = w0(eta - w t)`` (broadcasts)."""
    t, eta = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(eta, dtype=float))
    shape = t.shape
    tf, ef = t.ravel(), eta.ravel()
    if params.half_jump == 0.0:
        out = np.full(shape, params.mid)
        return float(out) if shape == () else out

    def fun(w, sel):
        foot = ef[sel] - w * tf[sel]
        return w - w0(params, foot), 1.0 + tf[sel] * w0_prime(params, foot)

    w, _, _ = safeguarded_newton(fun, w0(params, ef), params.root_tol)
    w = np.clip(w, params.u_minus, params.u_plus)
    return float(w[0]) if shape == () else w.reshape(shape)


def eval_w_eta(params, t, eta):
    w = eval_w(params, t, eta)
    d = w0_prime(params, np.asarray(eta) - w * np.asarray(t))
    return d / (1.0 + np.asarray(t) * d)


# ---------------------------------------------------------------------------
# Hopf-Cole quadrature


@dataclass
class HopfColeMoments:
    """Weighted moments of ``g = (eta - y)/t`` under ``exp(E)``.

    ``mean`` is ``v``; ``var`` and ``third`` are the second and third central
    moments; ``cov_e`` is ``Cov(g, E)``.
    """

    mean: np.ndarray
    var: np.ndarray
    third: np.ndarray
    cov_e: np.ndarray


def _unit_rule(panels):
    """Composite Gauss-Legendre nodes and weights on ``[0, 1]``."""
    xg, wg = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = 0.5 * (edges[1:] - edges[:-1])
    return (mids[:, None] + widths[:, None] * xg).ravel(), (widths[:, None] * wg).ravel()


def _moments_fixed(params, t, K, eta, peak, panels):
    # window split at -+RAMP_HALF so the unit-scale ramp of w0 gets its own panels
    half = params.window * np.sqrt(K * t)
    a, b = peak - half, peak + half
    c1 = np.clip(-_RAMP_HALF, a, b)
    c2 = np.clip(_RAMP_HALF, a, b)
    un, uw = _unit_rule(panels)
    ys, ws = [], []
    for lo, hi in ((a, c1), (c1, c2), (c2, b)):
        ys.append(lo[:, None] + (hi - lo)[:, None] * un)
        ws.append((hi - lo)[:, None] * uw)
    y = np.concatenate(ys, axis=1)
    quad_w = np.concatenate(ws, axis=1)
    g = (eta[:, None] - y) / t[:, None]
    E = -(eta[:, None] - y) ** 2 / (4.0 * K[:, None] * t[:, None]) - w0_antiderivative(params, y) / (
        2.0 * K[:, None]
    )
    E = E - E.max(axis=1, keepdims=True)
    wts = np.exp(E) * quad_w
    wts /= wts.sum(axis=1, keepdims=True)
    m = np.sum(wts * g, axis=1)
    dg = g - m[:, None]
    var = np.sum(wts * dg * dg, axis=1)
    third = np.sum(wts * dg**3, axis=1)
    eb = np.sum(wts * E, axis=1)
    cov_e = np.sum(wts * dg * (E - eb[:, None]), axis=1)
    return HopfColeMoments(m, var, third, cov_e)


def hopf_cole_moments(params, t, K, eta):
    """Moments at flattened points, with node doubling until ``v`` settles
    to ``quad_tol`` and its eta derivatives to ``100 * quad_tol``."""
    t, K, eta = (np.ascontiguousarray(a, dtype=float).ravel() for a in np.broadcast_arrays(t, K, eta))
    peak = eta - eval_w(params, t, eta) * t
    n = t.size
    out = HopfColeMoments(*(np.empty(n) for _ in range(4)))
    per_point = _GL_ORDER * params.panels * 6
    step = max(1, _CHUNK // per_point)
    for lo in range(0, n, step):
        sl = slice(lo, min(n, lo + step))
        args = (t[sl], K[sl], eta[sl], peak[sl])
        panels = params.panels
        prev = _moments_fixed(params, *args, panels)
        while True:
            panels *= 2
            cur = _moments_fixed(params, *args, panels)
            kk = K[sl]
            change = max(
                np.abs(cur.mean - prev.mean).max(),
                1e-2 * np.abs((cur.var - prev.var) / (2.0 * kk)).max(),
                1e-2 * np.abs((cur.third - prev.third) / (4.0 * kk * kk)).max(),
            )
            if change <= params.quad_tol * max(params.half_jump, 1.0):
                break
            if panels >= params.max_panels:
                raise QuadratureNotConverged(f"change {change:.3g} after {panels} panels")
            prev = cur
        for name in ("mean", "var", "third", "cov_e"):
            getattr(out, name)[sl] = getattr(cur, name)
    return out


def _constant_case(params, shape):
    return np.full(shape, params.mid)


def viscosity(curve, xi):
    """``(K, K')`` at ``xi``."""
    c = transform.eval_KAB(curve, xi)
    return np.asarray(c.K, dtype=float), np.asarray(c.Kprime, dtype=float)


def eval_v_K(params, t, K, eta):
    """Viscous profile for a given viscosity (broadcasts over ``t, K, eta``)."""
    t, K, eta = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, K, eta)))
    shape = t.shape
    if params.half_jump == 0.0:
        return _constant_case(params, shape)
    early = t < params.t_min
    out = np.empty(shape)
    out[early] = w0(params, eta[early])
    late = ~early
    if late.any():
        mom = hopf_cole_moments(params, t[late], K[late], eta[late])
        out[late] = np.clip(mom.mean, params.u_minus, params.u_plus)
    return out


def eval_v(params, t, xi, eta, curve):
    """Viscous profile at ``(t, xi, eta)``; scalar in, float out."""
    K, _ = viscosity(curve, xi)
    out = eval_v_K(params, t, K, eta)
    return float(out) if out.ndim == 0 else out


@dataclass
class Partials:
    v: np.ndarray
    v_t: np.ndarray
    v_xi: np.ndarray
    v_eta: np.ndarray
    v_eta_eta: np.ndarray
    v_xi_eta: np.ndarray
    v_xi_xi: np.ndarray

    def astuple(self):
        return self.v_t, self.v_xi, self.v_eta, self.v_eta_eta, self.v_xi_eta, self.v_xi_xi


def _partials_K(params, t, K, Kp, eta):
    mom = hopf_cole_moments(params, t, K, eta)
    t = np.broadcast_to(t, K.shape).ravel()
    K = K.ravel()
    v = mom.mean
    v_eta = 1.0 / t - mom.var / (2.0 * K)
    v_ee = mom.third / (4.0 * K * K)
    dv_dK = -mom.cov_e / K
    return v, v_eta, v_ee, dv_dK * Kp.ravel()


def xi_step(curve):
    """Central-difference step in xi for the cross derivatives."""
    span = transform.support_interval(curve)
    if span is None:
        return 1e-4
    if not np.all(np.isfinite(span)):
        return 1e-4 * max(curve.width, 1.0)
    return 1e-4 * (span[1] - span[0])


def v_partials(params, t, xi, eta, curve):
    """:class:`Partials` of the viscous profile at broadcast points.

    ``v_eta``, ``v_eta_eta`` and ``dv/dK`` come from differentiated
    quadrature; ``v_xi = dv/dK K'``; the xi cross derivatives use one
    central difference; ``v_t = K v_eta_eta - v v_eta``.
    """
    t, xi, eta = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, xi, eta)))
    shape = t.shape
    if params.half_jump == 0.0:
        z = np.zeros(shape)
        return Partials(_constant_case(params, shape), z, z, z, z, z, z.copy())
    h = xi_step(curve)
    xs = np.concatenate([xi.ravel(), xi.ravel() + h, xi.ravel() - h])
    K, Kp = viscosity(curve, xs)
    n = t.size
    tt = np.tile(t.ravel(), 3)
    ee = np.tile(eta.ravel(), 3)
    v, v_eta, v_ee, v_xi = _partials_K(params, tt, K, Kp, ee)
    c, p, m = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
    v_xi_eta = (v_eta[p] - v_eta[m]) / (2.0 * h)
    v_xi_xi = (v_xi[p] - v_xi[m]) / (2.0 * h)
    if isinstance(curve, Line):
        v_xi_eta = np.zeros(n)
        v_xi_xi = np.zeros(n)
    v_t = K[c] * v_ee[c] - v[c] * v_eta[c]
    parts = [v[c], v_t, v_xi[c], v_eta[c], v_ee[c], v_xi_eta, v_xi_xi]
    return Partials(*(a.reshape(shape) for a in parts))


def v_t_difference(params, t, xi, eta, curve, dt=1e-3):
    """``v_t`` by a central difference in time, independent of the PDE."""
    return (eval_v(params, np.asarray(t) + dt, xi, eta, curve) - eval_v(params, np.asarray(t) - dt, xi, eta, curve)) / (
        2.0 * dt
    )


def profile_on_grid(params, t, xi, eta, curve, partials=True):
    """Evaluate on the tensor grid ``xi x eta`` (arrays ``(len(xi), len(eta))``).

    The profile depends on xi only through ``K(xi)``, so rows sharing a
    viscosity value are computed once.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    h = xi_step(curve)
    if not partials:
        K, _ = viscosity(curve, xi)
        uk, inv = np.unique(K, return_inverse=True)
        vals = eval_v_K(params, t, uk[:, None], eta[None, :])
        return vals[inv]
    xs = np.concatenate([xi, xi + h, xi - h])
    K, Kp = viscosity(curve, xs)
    uk, inv = np.unique(K, return_inverse=True)
    n1, n2 = xi.size, eta.size
    tt = np.full((uk.size, n2), float(t))
    ee = np.broadcast_to(eta, (uk.size, n2))
    kk = np.broadcast_to(uk[:, None], (uk.size, n2))
    mom = hopf_cole_moments(params, tt, kk, ee)
    shp = (uk.size, n2)
    v_u = mom.mean.reshape(shp)
    var = mom.var.reshape(shp)
    v_eta_u = 1.0 / t - var / (2.0 * uk[:, None])
    v_ee_u = mom.third.reshape(shp) / (4.0 * uk[:, None] ** 2)
    dvdK_u = -mom.cov_e.reshape(shp) / uk[:, None]
    v = v_u[inv]
    v_eta = v_eta_u[inv]
    v_xi = dvdK_u[inv] * Kp[:, None]
    v_ee = v_ee_u[inv]
    c, p, m = slice(0, n1), slice(n1, 2 * n1), slice(2 * n1, 3 * n1)
    if isinstance(curve, Line):
        zero = np.zeros((n1, n2))
        v_xi_eta, v_xi_xi = zero, zero.copy()
    else:
        v_xi_eta = (v_eta[p] - v_eta[m]) / (2.0 * h)
        v_xi_xi = (v_xi[p] - v_xi[m]) / (2.0 * h)
    v_t = K[c, None] * v_ee[c] - v[c] * v_eta[c]
    return Partials(v[c], v_t, v_xi[c], v_eta[c], v_ee[c], v_xi_eta, v_xi_xi)


# ---------------------------------------------------------------------------
# decay measurements

DECAY_NORMS = (
    ("v_minus_w", math.inf),
    ("v_eta", 2.0),
    ("v_eta", math.inf),
    ("v_xi", 2.0),
    ("v_xi", math.inf),
    ("v_xi_eta", 2.0),
    ("v_xi", 1.0),
)


def default_decay_grid(params, curve, t, n_xi=65, n_eta=801):
    """Grid covering the coefficient support in xi and the spreading ramp in eta."""
    span = transform.support_interval(curve)
    if span is None:
        xi = np.linspace(-1.0, 1.0, n_xi)
    elif np.all(np.isfinite(span)):
        pad = 0.25 * (span[1] - span[0])
        xi = np.linspace(span[0] - pad, span[1] + pad, n_xi)
    else:
        xi = np.linspace(-10.0 * curve.width, 10.0 * curve.width, n_xi)
    K2 = transform.coefficient_bounds(curve)["K2"]
    umax = max(abs(params.u_minus), abs(params.u_plus))
    reach = umax * t + 12.0 * math.sqrt(K2 * t) + 20.0
    eta = np.linspace(params.u_minus * t - reach + umax * t, params.u_plus * t + reach - umax * t, n_eta)
    return xi, eta


def measure_profile_decay(params, curve, times, grid=None):
    """One :class:`DecaySeries` per entry of :data:`DECAY_NORMS`.

    ``grid`` is ``None`` (default grid per time) or a callable
    ``t -> (xi, eta)``.
    """
    series = {key: DecaySeries(key[0], key[1]) for key in DECAY_NORMS}
    for t in times:
        xi, eta = (grid or (lambda s: default_decay_grid(params, curve, s)))(t)
        h1 = xi[1] - xi[0]
        h2 = eta[1] - eta[0]
        part = profile_on_grid(params, t, xi, eta, curve)
        w = eval_w(params, t, eta)
        fields = {
            "v_minus_w": part.v - w[None, :],
            "v_eta": part.v_eta,
            "v_xi": part.v_xi,
            "v_xi_eta": part.v_xi_eta,
        }
        for (name, p), s in series.items():
            s.append(t, lp_norm(fields[name], p, h1, h2))
    return list(series.values())
