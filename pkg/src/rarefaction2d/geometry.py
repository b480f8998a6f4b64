"""Initial-discontinuity curves y = phi(x) and the implicit functions Z and G.

Three curve families are supported: straight lines, mollified two-slope
polylines and lines carrying a smooth localized perturbation. Every curve
is validated on construction against the hyperbolicity condition
``1 - phi'(x) >= d0 > 0``.

``Z(x, y)`` solves ``y - Z - phi(x - Z) = 0`` and ``G(xi)`` solves
``G - phi(G) = xi``; both residuals are strictly monotone with slope
bounded away from zero by ``d0``, so a bracketed Newton iteration is
globally convergent.
"""
from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import HyperbolicityViolated, NoConvergence

DEFAULT_TOL = 1e-12
MAX_ITER = 200
SLOPE_GRID_POINTS = 100_000
_BUMP_TABLE_POINTS = 20_001


def _sampled_slope_range(dphi, x):
    """Extremes of ``dphi`` on the grid ``x``, polished by bounded Brent
    searches in the cells around the sampled argmin and argmax."""
    s = dphi(x)
    out = []
    for idx, sign in ((int(np.argmin(s)), 1.0), (int(np.argmax(s)), -1.0)):
        lo, hi = x[max(idx - 1, 0)], x[min(idx + 1, x.size - 1)]
        best = sign * s[idx]
        if hi > lo:
            res = optimize.minimize_scalar(
                lambda v: sign * float(dphi(v)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14}
            )
            best = min(best, float(res.fun))
        out.append(sign * best)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# standard bump mollifier on [-1, 1]


def _bump_raw(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


@functools.lru_cache(maxsize=None)
def _bump_tables():
    """Normalisation constant and PCHIP tables for the cumulative integrals.

    Returns ``(C, A, M)`` where ``A(s) = int_{-1}^s a`` and
    ``M(s) = int_{-1}^s sigma a(sigma) dsigma`` for the unit-mass bump
    ``a(s) = C exp(-1/(1-s^2))``.
    """
    with warnings.catch_warnings():
        # quad flags roundoff near the flat ends; the value is good to ~1e-15
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        mass, _ = integrate.quad(
            lambda s: float(_bump_raw(s)), -1.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200
        )
    norm = 1.0 / mass
    s = np.linspace(-1.0, 1.0, _BUMP_TABLE_POINTS)
    xg, wg = np.polynomial.legendre.leggauss(12)
    mid = 0.5 * (s[:-1] + s[1:])
    half = 0.5 * (s[1:] - s[:-1])
    nodes = mid[:, None] + half[:, None] * xg
    vals = norm * _bump_raw(nodes)
    inc_a = (vals * wg).sum(axis=1) * half
    inc_m = (vals * nodes * wg).sum(axis=1) * half
    cum_a = np.concatenate([[0.0], np.cumsum(inc_a)])
    cum_m = np.concatenate([[0.0], np.cumsum(inc_m)])
    # pin the exact end values; the tables are only queried on (-1, 1)
    cum_a[-1] = 1.0
    cum_m[-1] = 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        table_a = PchipInterpolator(s, cum_a)
        table_m = PchipInterpolator(s, cum_m)
    return norm, table_a, table_m


def mollifier(x, eps0):
    """Bump ``alpha_eps0(x)``: symmetric, unit mass, support ``[-eps0, eps0]``."""
    norm, _, _ = _bump_tables()
    return norm / eps0 * _bump_raw(np.asarray(x, dtype=float) / eps0)


def mollifier_derivative(x, eps0):
    norm, _, _ = _bump_tables()
    s = np.asarray(x, dtype=float) / eps0
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    q = 1.0 - si * si
    out[inside] = np.exp(-1.0 / q) * (-2.0 * si / (q * q))
    return norm / (eps0 * eps0) * out


def mollifier_cdf(x, eps0):
    """``int_{-inf}^x alpha_eps0``."""
    _, table_a, _ = _bump_tables()
    s = np.asarray(x, dtype=float) / eps0
    out = np.where(s >= 1.0, 1.0, 0.0)
    inside = np.abs(s) < 1.0
    out[inside] = table_a(s[inside])
    return out


def _mollifier_first_moment(x, eps0):
    """``int_{-inf}^x y alpha_eps0(y) dy``; vanishes outside ``(-eps0, eps0)``."""
    _, _, table_m = _bump_tables()
    s = np.asarray(x, dtype=float) / eps0
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = eps0 * table_m(s[inside])
    return out


# ---------------------------------------------------------------------------
# curves


class Curve:
    """Base class; subclasses provide ``phi``, ``dphi``, ``d2phi``."""

    kind = "curve"

    def eval(self, x):
        return self.phi(x), self.dphi(x), self.d2phi(x)

    @property
    def d0(self):
        return self._d0

    @property
    def slope_range(self):
        """``(min phi', max phi')`` over the real line."""
        return self._slope_min, self._slope_max

    @property
    def asymptotic_slopes(self):
        return self.k1, self.k2

    def _finish(self, slope_min, slope_max):
        d0 = 1.0 - slope_max
        if not d0 > 0.0:
            raise HyperbolicityViolated(
                f"{self!r}: max phi' = {slope_max:.6g} >= 1 (d0 = {d0:.3g})"
            )
        object.__setattr__(self, "_slope_min", float(slope_min))
        object.__setattr__(self, "_slope_max", float(slope_max))
        object.__setattr__(self, "_d0", float(d0))


@dataclass(frozen=True)
class Line(Curve):
    k: float
    c: float = 0.0
    kind = "line"

    def __post_init__(self):
        self._finish(self.k, self.k)

    k1 = property(lambda self: self.k)
    k2 = property(lambda self: self.k)

    def phi(self, x):
        return self.k * np.asarray(x, dtype=float) + self.c

    def dphi(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.k)

    def d2phi(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def shifted(self, m):
        return Line(self.k, self.c + m)


@dataclass(frozen=True)
class MollifiedPolyline(Curve):
    """Two-slope broken line ``k1 x + c1`` (x <= 0) / ``k2 x + c2`` (x > 0)
    convolved with the bump of radius ``eps0``.

    Evaluated through the convolution identities against the cumulative
    mollifier integrals, so ``phi' = k1`` for ``x <= -eps0`` and ``k2`` for
    ``x >= eps0`` hold exactly.
    """

    k1: float
    c1: float
    k2: float
    c2: float
    eps0: float
    kind = "polyline"

    def __post_init__(self):
        if not self.eps0 > 0.0:
            raise ValueError("eps0 must be positive")
        if max(self.k1, self.k2) >= 1.0:
            raise HyperbolicityViolated(f"{self!r}: asymptotic slope >= 1")
        x = np.linspace(-self.eps0, self.eps0, SLOPE_GRID_POINTS)
        smin, smax = _sampled_slope_range(self.dphi, x)
        self._finish(min(smin, self.k1, self.k2), max(smax, self.k1, self.k2))

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        a = mollifier_cdf(x, self.eps0)
        m1 = _mollifier_first_moment(x, self.eps0)
        mid = self.k1 * x + self.c1 + (self.k2 - self.k1) * (x * a - m1) + (self.c2 - self.c1) * a
        return np.where(
            x >= self.eps0, self.k2 * x + self.c2, np.where(x <= -self.eps0, self.k1 * x + self.c1, mid)
        )

    def dphi(self, x):
        x = np.asarray(x, dtype=float)
        mid = (
            self.k1
            + (self.k2 - self.k1) * mollifier_cdf(x, self.eps0)
            + (self.c2 - self.c1) * mollifier(x, self.eps0)
        )
        return np.where(x >= self.eps0, self.k2, np.where(x <= -self.eps0, self.k1, mid))

    def d2phi(self, x):
        x = np.asarray(x, dtype=float)
        return (self.k2 - self.k1) * mollifier(x, self.eps0) + (
            self.c2 - self.c1
        ) * mollifier_derivative(x, self.eps0)

    def shifted(self, m):
        return MollifiedPolyline(self.k1, self.c1 + m, self.k2, self.c2 + m, self.eps0)


@dataclass(frozen=True)
class SmoothPerturbedLine(Curve):
    """``k x + c + amplitude * b(x / width)`` with ``b`` = arctan or a Gaussian bump."""

    k: float
    c: float
    amplitude: float
    width: float = 1.0
    shape: str = "arctan"
    kind = "perturbed"

    def __post_init__(self):
        if self.shape not in ("arctan", "gaussian"):
            raise ValueError(f"unknown perturbation shape {self.shape!r}")
        if not self.width > 0.0:
            raise ValueError("width must be positive")
        a, w = self.amplitude, self.width
        if self.shape == "arctan":
            peak = a / w  # phi' - k at s = 0
            lo, hi = self.k + min(peak, 0.0), self.k + max(peak, 0.0)
        else:
            peak = np.sqrt(2.0) * abs(a) * np.exp(-0.5) / w  # at s = -+1/sqrt(2)
            lo, hi = self.k - peak, self.k + peak
        x = np.linspace(-50.0 * w, 50.0 * w, SLOPE_GRID_POINTS)
        smin, smax = _sampled_slope_range(self.dphi, x)
        self._finish(min(lo, smin), max(hi, smax))

    k1 = property(lambda self: self.k)
    k2 = property(lambda self: self.k)

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        s = x / self.width
        bump = np.arctan(s) if self.shape == "arctan" else np.exp(-s * s)
        return self.k * x + self.c + self.amplitude * bump

    def dphi(self, x):
        s = np.asarray(x, dtype=float) / self.width
        if self.shape == "arctan":
            return self.k + self.amplitude / self.width / (1.0 + s * s)
        return self.k - 2.0 * self.amplitude / self.width * s * np.exp(-s * s)

    def d2phi(self, x):
        s = np.asarray(x, dtype=float) / self.width
        w2 = self.width * self.width
        if self.shape == "arctan":
            return -2.0 * self.amplitude / w2 * s / (1.0 + s * s) ** 2
        return -2.0 * self.amplitude / w2 * (1.0 - 2.0 * s * s) * np.exp(-s * s)

    def shifted(self, m):
        return SmoothPerturbedLine(self.k, self.c + m, self.amplitude, self.width, self.shape)


def eval_curve(curve, x):
    """``(phi, phi', phi'')`` at ``x``; floats for scalar input."""
    out = curve.eval(x)
    if np.ndim(x) == 0:
        return tuple(float(v) for v in out)
    return out


def mollify_polyline(k1, c1, k2, c2, eps0):
    """Smooth the broken line by the bump of radius ``eps0``.

    Affine input is returned as an exact :class:`Line`. Raises
    :class:`HyperbolicityViolated` when the smoothed slope reaches 1.
    """
    if k1 == k2 and c1 == c2:
        return Line(k1, c1)
    return MollifiedPolyline(k1, c1, k2, c2, eps0)


# ---------------------------------------------------------------------------
# implicit functions


@dataclass
class ImplicitResult:
    value: np.ndarray | float
    residual: np.ndarray | float
    iterations: int = field(default=0)


def safeguarded_newton(fun, x0, tol, max_iter=MAX_ITER):
    """Vectorised bracketed Newton for strictly increasing ``F``.

    ``fun(x, sel)`` returns ``(F, F')`` for the parameter subset ``sel``.
    The bracket is grown geometrically from ``x0``; Newton steps leaving it
    are replaced by bisection, as are steps after one that failed to halve
    the bracket.
    """
    x = np.array(x0, dtype=float, copy=True).ravel()
    n = x.size
    everyone = np.arange(n)
    f, df = fun(x, everyone)
    lo = x.copy()
    hi = x.copy()
    width = 1.0 + np.abs(x)
    for side, sign in ((lo, -1.0), (hi, 1.0)):
        fs = f.copy()
        step = width.copy()
        bad = np.nonzero(sign * fs < 0.0)[0]
        grow = 0
        while bad.size:
            side[bad] += sign * step[bad]
            step[bad] *= 2.0
            fs_bad, _ = fun(side[bad], bad)
            bad = bad[sign * fs_bad < 0.0]
            grow += 1
            if grow > 1100:
                raise NoConvergence("could not bracket root")
    iters = np.zeros(n, dtype=int)
    eps = np.finfo(float).eps
    prev_width = np.full(n, np.inf)
    active = np.nonzero(np.abs(f) > tol)[0]
    for _ in range(max_iter):
        if not active.size:
            break
        xa, fa, dfa = x[active], f[active], df[active]
        lo[active] = np.where(fa < 0.0, xa, lo[active])
        hi[active] = np.where(fa > 0.0, xa, hi[active])
        la, ha = lo[active], hi[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - fa / dfa
        # bisect when Newton leaves the bracket or stalls in it
        outside = ~((xn > la) & (xn < ha)) | (ha - la > 0.5 * prev_width[active])
        prev_width[active] = ha - la
        xn = np.where(outside, 0.5 * (la + ha), xn)
        x[active] = xn
        iters[active] += 1
        fa, dfa = fun(xn, active)
        f[active] = fa
        df[active] = dfa
        collapsed = (hi[active] - lo[active]) <= 4.0 * eps * np.maximum(1.0, np.abs(xn))
        active = active[(np.abs(fa) > tol) & ~collapsed]
    if active.size:
        raise NoConvergence(
            f"{active.size} points unconverged after {max_iter} iterations "
            f"(max |F| = {np.abs(f[active]).max():.3g})"
        )
    return x, f, iters


def _pack(shape, value, residual, iters):
    if shape == ():
        return ImplicitResult(float(value[0]), float(residual[0]), int(iters.max(initial=0)))
    return ImplicitResult(value.reshape(shape), residual.reshape(shape), int(iters.max(initial=0)))


def solve_Z(curve, x, y, tol=DEFAULT_TOL):
    """Solve ``y - Z - phi(x - Z) = 0`` for ``Z`` (scalars or arrays)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()

    def fun(z, sel):
        g = xf[sel] - z
        # increasing orientation: -(y - Z - phi(x - Z))
        return z - yf[sel] + curve.phi(g), 1.0 - curve.dphi(g)

    z0 = (yf - curve.phi(xf)) * curve.d0
    z, f, iters = safeguarded_newton(fun, z0, tol)
    return _pack(shape, z, -f, iters)


def Z(curve, x, y, tol=DEFAULT_TOL):
    """Array shortcut for ``solve_Z(...).value``."""
    return solve_Z(curve, x, y, tol).value


def dZ(curve, x, y, z=None):
    """``(Z_x, Z_y, Z_xx, Z_xy, Z_yy)`` from the implicit-function identities."""
    if z is None:
        z = Z(curve, x, y)
    g = np.asarray(x, dtype=float) - z
    _, p1, p2 = curve.eval(g)
    q = 1.0 - p1
    zx = -p1 / q
    zy = 1.0 / q
    zxx = -p2 / q**3
    return zx, zy, zxx, -zxx, zxx


def solve_G(curve, xi, tol=DEFAULT_TOL):
    """Solve ``-xi + G - phi(G) = 0`` for ``G``."""
    xi = np.asarray(xi, dtype=float)
    shape = xi.shape
    xf = xi.ravel()

    def fun(g, sel):
        return g - curve.phi(g) - xf[sel], 1.0 - curve.dphi(g)

    phi0 = float(curve.phi(0.0))
    g0 = (xf + phi0) * curve.d0
    g, f, iters = safeguarded_newton(fun, g0, tol)
    return _pack(shape, g, f, iters)


def G(curve, xi, tol=DEFAULT_TOL):
    return solve_G(curve, xi, tol).value


def dG(curve, xi, g=None):
    """``G'(xi) = 1 / (1 - phi'(G(xi)))``."""
    if g is None:
        g = G(curve, xi)
    return 1.0 / (1.0 - curve.dphi(g))
