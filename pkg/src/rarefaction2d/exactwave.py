"""Exact inviscid rarefaction wave for a Riemann discontinuity along a curve.

For ``u_minus < u_plus`` the entropy solution is ``u_minus`` below the
lower fan boundary, ``u_plus`` above the upper one, and ``Z(x, y)/t``
between them. Because ``Z`` does not depend on time, the whole wave is
``clip(Z/t, u_minus, u_plus)``, and a fixed sample grid can reuse ``Z``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import RegionBoundaryTooClose


class Region(enum.IntEnum):
    MINUS = -1
    FAN = 0
    PLUS = 1


@dataclass(frozen=True)
class RiemannData:
    u_minus: float
    u_plus: float
    curve: geometry.Curve

    def __post_init__(self):
        if not self.u_minus < self.u_plus:
            raise ValueError(f"need u_minus < u_plus, got {self.u_minus} >= {self.u_plus}")

    @property
    def speed(self):
        return max(abs(self.u_minus), abs(self.u_plus))


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise ValueError("the wave is defined for t > 0 only")


def fan_boundaries(data, t, x):
    """Lower and upper fan boundary heights ``y`` above abscissa ``x``."""
    x = np.asarray(x, dtype=float)
    c = data.curve
    lo = data.u_minus * t + c.phi(x - data.u_minus * t)
    hi = data.u_plus * t + c.phi(x - data.u_plus * t)
    return lo, hi


def classify_region(data, t, x, y):
    """Region codes (see :class:`Region`) from the boundary curves."""
    _check_time(t)
    lo, hi = fan_boundaries(data, t, x)
    y = np.asarray(y, dtype=float)
    out = np.where(y < lo, Region.MINUS, np.where(y > hi, Region.PLUS, Region.FAN))
    return Region(int(out)) if out.ndim == 0 else out


def classify_region_by_Z(data, t, x, y, z=None):
    """Region codes from ``u_minus t <= Z <= u_plus t``."""
    _check_time(t)
    if z is None:
        z = geometry.Z(data.curve, x, y)
    z = np.asarray(z)
    out = np.where(z < data.u_minus * t, Region.MINUS, np.where(z > data.u_plus * t, Region.PLUS, Region.FAN))
    return Region(int(out)) if out.ndim == 0 else out


def wave_from_Z(data, t, z):
    return np.clip(np.asarray(z, dtype=float) / t, data.u_minus, data.u_plus)


def eval_rarefaction(data, t, x, y, z=None):
    """``u^R(t, x, y)``; pass a precomputed ``z`` to skip the implicit solve."""
    _check_time(t)
    if z is None:
        z = geometry.Z(data.curve, x, y)
    out = wave_from_Z(data, t, z)
    return float(out) if out.ndim == 0 else out


def compare_waves(data1, data2, t, x, y, z1=None, z2=None):
    """``max |u1^R - u2^R|`` over the given sample points.

    The reduction is a plain max over a fixed array, so the result does not
    depend on how the samples were produced.
    """
    if (data1.u_minus, data1.u_plus) != (data2.u_minus, data2.u_plus):
        raise ValueError("compared waves must share end states")
    u1 = eval_rarefaction(data1, t, x, y, z1)
    u2 = eval_rarefaction(data2, t, x, y, z2)
    return float(np.max(np.abs(np.asarray(u1) - np.asarray(u2))))


def comparison_samples(data1, data2, t, n=256, x_half=None, refine=3):
    """Sample points ``(x, y)`` covering both fans plus a margin.

    Points lie on an ``n x n`` grid in ``(x, y - phi1(x))`` with the offset
    range covering both fans and a margin of width ``(u_plus - u_minus) t``;
    at each abscissa extra points cluster around all four fan boundaries
    with a third of the base spacing.
    """
    c1, c2 = data1.curve, data2.curve
    jump = data1.u_plus - data1.u_minus
    spread = data1.speed * t
    if x_half is None:
        x_half = 3.0 * spread + 5.0 + _curve_scale(c1) + _curve_scale(c2)
    x = np.linspace(-x_half, x_half, n)
    base = c1.phi(x)
    b = np.stack([*fan_boundaries(data1, t, x), *fan_boundaries(data2, t, x)]) - base
    s_lo = b.min() - jump * t - 1.0
    s_hi = b.max() + jump * t + 1.0
    s = np.linspace(s_lo, s_hi, n)
    ds = (s_hi - s_lo) / (n - 1) / refine
    offsets = ds * np.arange(-refine, refine + 1)
    extra = (b[:, :, None] + offsets).transpose(1, 0, 2).reshape(n, -1)
    rows = np.concatenate([np.broadcast_to(s, (n, n)), extra], axis=1)
    xs = np.broadcast_to(x[:, None], rows.shape)
    ys = base[:, None] + rows
    return xs.ravel(), ys.ravel()


def _curve_scale(curve):
    if isinstance(curve, geometry.MollifiedPolyline):
        return curve.eps0
    if isinstance(curve, geometry.SmoothPerturbedLine):
        return 10.0 * curve.width
    return 0.0


def residual_inviscid(data, t, x, y, h):
    """Central-difference residual of ``u_t + u u_x + u u_y`` at one point.

    Raises :class:`RegionBoundaryTooClose` unless every point within ``2h``
    (in t, x and y) lies in the same region.
    """
    _check_time(t - 2 * h)
    offs = np.array([-2 * h, 0.0, 2 * h])
    T, X, Y = np.meshgrid(t + offs, x + offs, y + offs, indexing="ij")
    regions = np.concatenate(
        [np.ravel(classify_region(data, tt, X[i].ravel(), Y[i].ravel())) for i, tt in enumerate(t + offs)]
    )
    if np.any(regions != regions[0]):
        raise RegionBoundaryTooClose(f"stencil of width {2 * h:g} meets a fan boundary at ({t}, {x}, {y})")
    u = lambda tt, xx, yy: eval_rarefaction(data, tt, xx, yy)  # noqa: E731
    u0 = u(t, x, y)
    ut = (u(t + h, x, y) - u(t - h, x, y)) / (2 * h)
    ux = (u(t, x + h, y) - u(t, x - h, y)) / (2 * h)
    uy = (u(t, x, y + h) - u(t, x, y - h)) / (2 * h)
    return float(ut + u0 * (ux + uy))
