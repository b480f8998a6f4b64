"""Finite-difference solvers for viscous Burgers in two coordinate systems.

Original coordinates (axis 1 = x, axis 2 = y)::

    u_t + (u^2/2)_x + (u^2/2)_y = u_xx + u_yy

Transformed coordinates (axis 1 = xi, axis 2 = eta)::

    u_t + (u^2/2)_eta = 2 u_xi_xi + A(xi) u_xi_eta + K(xi) u_eta_eta + B(xi) u_eta

Both use Dirichlet data on the outer ring of nodes. The linear part is a
9-point stencil with per-row weights; advection is local Lax-Friedrichs
(monotone) or centered. The explicit update is monotone under the bound
returned by :meth:`Simulation.stable_dt` when the stencil has no negative
off-centre weights.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exactwave, geometry, transform
from .errors import CflViolation, ConfigError, NonFiniteValue
from .fields import Field2D, Grid2D
from .norms import DecaySeries, lp_norm

SCHEMES = ("explicit", "semi-implicit-diffusion")
ADVECTION = ("llf", "centered")
MIXED = ("centered", "positive")
BOUNDARY_MODES = ("exact-wave", "viscous-profile")


@dataclass
class SolverConfig:
    scheme: str = "explicit"
    cfl: float = 0.8
    boundary: str = "exact-wave"
    end_time: float = 1.0
    snapshot_times: tuple = ()
    advection: str = "llf"
    mixed_stencil: str = "centered"
    workers: int = 1
    check_max_principle: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("solver.scheme", f"expected one of {SCHEMES}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError("solver.cfl", "must lie in (0, 1]")
        if self.boundary not in BOUNDARY_MODES:
            raise ConfigError("solver.boundary", f"expected one of {BOUNDARY_MODES}")
        if self.advection not in ADVECTION:
            raise ConfigError("solver.advection", f"expected one of {ADVECTION}")
        if self.mixed_stencil not in MIXED:
            raise ConfigError("solver.mixed_stencil", f"expected one of {MIXED}")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if any(s > self.end_time for s in self.snapshot_times):
            raise ConfigError("solver.snapshots", "snapshot beyond end time")


# ---------------------------------------------------------------------------
# stencils


@dataclass
class LinearOperator2D:
    """Second-order operator ``a11 u_11 + a12 u_12 + a22 u_22 + b2 u_2``.

    Coefficients are scalars or column arrays of shape ``(n1, 1)`` (they may
    vary along axis 1 only).
    """

    a11: object = 1.0
    a22: object = 1.0
    a12: object = 0.0
    b2: object = 0.0
    advect1: bool = True
    advect2: bool = True

    def interior(self, name):
        v = getattr(self, name)
        if np.ndim(v) == 0:
            return float(v)
        return np.asarray(v, dtype=float)[1:-1]


def original_operator():
    return LinearOperator2D()


def transformed_operator(curve, grid):
    """Coefficient columns of the transformed equation on ``grid`` (axis 1 = xi)."""
    c = transform.eval_KAB(curve, grid.axis1())
    col = lambda a: np.asarray(a, dtype=float)[:, None]  # noqa: E731
    return LinearOperator2D(a11=2.0, a22=col(c.K), a12=col(c.A), b2=col(c.B), advect1=False, advect2=True)


def stencil_weights(op, h1, h2, mixed="centered"):
    """Nine-point weights ``{(di, dj): w}`` for the interior rows."""
    a11, a22, a12, b2 = (op.interior(k) for k in ("a11", "a22", "a12", "b2"))
    w = {
        (0, 0): -2.0 * a11 / h1**2 - 2.0 * a22 / h2**2,
        (1, 0): a11 / h1**2,
        (-1, 0): a11 / h1**2,
        (0, 1): a22 / h2**2 + b2 / (2 * h2),
        (0, -1): a22 / h2**2 - b2 / (2 * h2),
    }
    if np.any(np.asarray(a12) != 0.0):
        hh = h1 * h2
        if mixed == "centered":
            q = a12 / (4 * hh)
            w[(1, 1)] = q
            w[(-1, -1)] = q
            w[(1, -1)] = -q
            w[(-1, 1)] = -q
        else:
            ap = np.maximum(a12, 0.0)
            am = np.maximum(-a12, 0.0)
            w[(0, 0)] = w[(0, 0)] + (ap + am) / hh
            for key in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                w[key] = w[key] - (ap + am) / (2 * hh)
            w[(1, 1)] = ap / (2 * hh)
            w[(-1, -1)] = ap / (2 * hh)
            w[(1, -1)] = am / (2 * hh)
            w[(-1, 1)] = am / (2 * hh)
    return w


def stencil_is_monotone(op, h1, h2, mixed="centered"):
    """True when every off-centre weight is non-negative."""
    w = stencil_weights(op, h1, h2, mixed)
    return all(np.all(np.asarray(v) >= -1e-14 * abs(np.max(w[(0, 0)]))) for k, v in w.items() if k != (0, 0))


def stable_dt(op, grid, alpha, safety=0.8, mixed="centered"):
    """Largest explicit step keeping the centre weight of the update non-negative.

    ``alpha`` bounds ``|u|`` (the advection speed). The diffusive and
    advective rates are summed, which is what monotonicity needs.
    """
    h1, h2 = grid.h1, grid.h2
    w = stencil_weights(op, h1, h2, mixed)
    rate = float(np.max(-np.asarray(w[(0, 0)])))
    if op.advect1:
        rate += alpha / h1
    if op.advect2:
        rate += alpha / h2
    return safety / rate


# ---------------------------------------------------------------------------
# boundary data


class Boundary:
    """Dirichlet values on the outer ring, produced by ``fn(t, x1, x2)``.

    With ``knot_ratio`` set, ``fn`` is only evaluated on geometric time
    knots ``(1 + knot_ratio)^k`` (for ``t >= 1``) and values in between
    come from cubic Lagrange interpolation; this is for suppliers that are
    costly per call.
    """

    def __init__(self, grid, fn, knot_ratio=None):
        self.grid = grid
        self.mask = grid.boundary_mask()
        X1, X2 = grid.mesh()
        self.x1 = X1[self.mask]
        self.x2 = X2[self.mask]
        self.fn = fn
        self.knot_ratio = knot_ratio
        self._cache = {}
        self._knots = {}

    def _direct(self, t):
        return np.asarray(self.fn(t, self.x1, self.x2), dtype=float)

    def _knot(self, k):
        if k not in self._knots:
            if len(self._knots) > 64:
                self._knots.clear()
            self._knots[k] = self._direct((1.0 + self.knot_ratio) ** k)
        return self._knots[k]

    def values(self, t):
        key = float(t)
        if key in self._cache:
            return self._cache[key]
        if self.knot_ratio is None or key < 1.0:
            out = self._direct(key)
        else:
            base = math.log1p(self.knot_ratio)
            k0 = math.floor(math.log(key) / base)
            ks = range(k0 - 1, k0 + 3)
            ts = [(1.0 + self.knot_ratio) ** k for k in ks]
            out = 0.0
            for i, k in enumerate(ks):
                li = 1.0
                for j, tj in enumerate(ts):
                    if j != i:
                        li *= (key - tj) / (ts[i] - tj)
                out = out + li * self._knot(k)
        self._cache = {key: out}
        return out


def exact_wave_boundary(grid, data, coords="original"):
    """``u^R`` on the ring; ``Z`` is solved once and reused for every time."""
    b = Boundary(grid, None)
    if coords == "original":
        z = geometry.Z(data.curve, b.x1, b.x2)
    else:
        z = b.x2  # eta is Z itself
    b.fn = lambda t, x1, x2: exactwave.wave_from_Z(data, t, z)
    return b


def viscous_profile_boundary(grid, params, curve, coords="transformed", knot_ratio=None):
    from . import profiles

    b = Boundary(grid, None, knot_ratio)
    if coords == "transformed":
        xi, eta = b.x1, b.x2
    else:
        xi, eta = transform.to_transformed(curve, b.x1, b.x2)
    K, _ = profiles.viscosity(curve, xi)
    b.fn = lambda t, x1, x2: profiles.eval_v_K(params, t, K, eta)
    return b


# ---------------------------------------------------------------------------
# stepping


def _llf_divergence(u, axis, h):
    """``d/dx (u^2/2)`` on interior nodes via local Lax-Friedrichs fluxes."""
    a = np.take(u, np.arange(u.shape[axis] - 1), axis=axis)
    b = np.take(u, np.arange(1, u.shape[axis]), axis=axis)
    speed = np.maximum(np.abs(a), np.abs(b))
    flux = 0.25 * (a * a + b * b) - 0.5 * speed * (b - a)
    d = (np.take(flux, np.arange(1, flux.shape[axis]), axis=axis) - np.take(flux, np.arange(flux.shape[axis] - 1), axis=axis)) / h
    return d


def _centered_divergence(u, axis, h):
    f = 0.5 * u * u
    n = u.shape[axis]
    return (np.take(f, np.arange(2, n), axis=axis) - np.take(f, np.arange(0, n - 2), axis=axis)) / (2 * h)


class Simulation:
    """A discretised problem: grid, operator, boundary supplier and options."""

    def __init__(self, grid, op, boundary, config=None, source=None):
        self.grid = grid
        self.op = op
        self.boundary = boundary
        # optional forcing: source(t) -> array over interior nodes
        self.source = source
        self.config = config or SolverConfig()
        self.weights = stencil_weights(op, grid.h1, grid.h2, self.config.mixed_stencil)
        self._implicit = None

    @classmethod
    def original(cls, grid, boundary, config=None, source=None):
        return cls(grid, original_operator(), boundary, config, source)

    @classmethod
    def transformed(cls, grid, curve, boundary, config=None, source=None):
        return cls(grid, transformed_operator(curve, grid), boundary, config, source)

    def stable_dt(self, alpha):
        if self.config.scheme == "explicit":
            return stable_dt(self.op, self.grid, alpha, self.config.cfl, self.config.mixed_stencil)
        rate = 0.0
        if self.op.advect1:
            rate += alpha / self.grid.h1
        if self.op.advect2:
            rate += alpha / self.grid.h2
        return self.config.cfl / rate

    def _advection(self, u, rows):
        """Advective term on interior rows ``rows`` (a slice of interior indices)."""
        lo, hi = rows.start, rows.stop
        block = u[lo : hi + 2]
        out = 0.0
        centered = self.config.advection == "centered"
        if self.op.advect1:
            d = _centered_divergence(block, 0, self.grid.h1) if centered else _llf_divergence(block[:, 1:-1], 0, self.grid.h1)
            out = out + (d[:, 1:-1] if centered else d)
        if self.op.advect2:
            inner = block[1:-1]
            d = _centered_divergence(inner, 1, self.grid.h2) if centered else _llf_divergence(inner, 1, self.grid.h2)
            out = out + d
        return out

    def _linear(self, u, rows):
        lo, hi = rows.start, rows.stop
        n2 = u.shape[1]
        acc = 0.0
        for (di, dj), w in self.weights.items():
            if np.ndim(w) > 0:
                w = w[lo:hi]
            acc = acc + w * u[1 + lo + di : 1 + hi + di, 1 + dj : n2 - 1 + dj]
        return acc

    def rhs(self, u, rows):
        return self._linear(u, rows) - self._advection(u, rows)

    def _row_blocks(self):
        n = self.grid.n1 - 2
        k = max(1, min(self.config.workers, n))
        edges = np.linspace(0, n, k + 1).astype(int)
        return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def step(self, field, dt, alpha=None, check=True):
        """One step from ``field`` to ``field.t + dt``."""
        u = field.values
        t_new = field.t + dt
        ring = self.boundary.values(t_new)
        if check:
            if alpha is None:
                alpha = max(float(np.abs(u).max()), float(np.abs(ring).max()))
            limit = self.stable_dt(alpha)
            if dt > limit * (1 + 1e-12):
                raise CflViolation(f"dt={dt:.4g} exceeds stable bound {limit:.4g}")
        new = np.empty_like(u)
        forcing = None if self.source is None else self.source(field.t)
        if self.config.scheme == "explicit":
            blocks = self._row_blocks()

            def work(rows):
                r = self.rhs(u, rows)
                if forcing is not None:
                    r = r + forcing[rows]
                new[1 + rows.start : 1 + rows.stop, 1:-1] = u[1 + rows.start : 1 + rows.stop, 1:-1] + dt * r

            if len(blocks) == 1:
                work(blocks[0])
            else:
                with ThreadPoolExecutor(len(blocks)) as pool:
                    list(pool.map(work, blocks))
        else:
            self._implicit_step(u, new, dt, ring, forcing)
        new[self.boundary.mask] = ring
        if not np.all(np.isfinite(new)):
            raise NonFiniteValue(f"non-finite values after step to t={t_new:g}")
        return Field2D(self.grid, t_new, new)

    # semi-implicit: (I - dt L) u_new = u - dt adv(u), boundary at the new time
    def _implicit_step(self, u, new, dt, ring, forcing=None):
        from scipy import sparse
        from scipy.sparse.linalg import factorized

        n1, n2 = self.grid.shape
        m1, m2 = n1 - 2, n2 - 2
        if self._implicit is None or self._implicit[0] != dt:
            idx = np.arange(m1 * m2).reshape(m1, m2)
            rows, cols, vals = [], [], []
            for (di, dj), w in self.weights.items():
                w = np.broadcast_to(w, (m1, m2)) if np.ndim(w) else np.full((m1, m2), w)
                i0, i1 = max(0, -di), m1 - max(0, di)
                j0, j1 = max(0, -dj), m2 - max(0, dj)
                rows.append(idx[i0:i1, j0:j1].ravel())
                cols.append(idx[i0 + di : i1 + di, j0 + dj : j1 + dj].ravel())
                vals.append(-dt * w[i0:i1, j0:j1].ravel())
            mat = sparse.csc_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m1 * m2, m1 * m2)
            ) + sparse.identity(m1 * m2, format="csc")
            self._implicit = (dt, factorized(mat))
        # boundary contributions of the linear operator at the new time
        ub = np.zeros_like(u)
        ub[self.boundary.mask] = ring
        bterm = self._linear(ub, slice(0, m1))
        adv = self._advection(u, slice(0, m1))
        rhs = u[1:-1, 1:-1] - dt * adv + dt * bterm
        if forcing is not None:
            rhs = rhs + dt * forcing
        new[1:-1, 1:-1] = self._implicit[1](rhs.ravel()).reshape(m1, m2)


# convenience wrappers matching the single-step interface


def step_original(field, dt, boundary=None, config=None):
    """One step of the original-coordinate equation; the ring is held fixed
    unless a :class:`Boundary` is given."""
    if boundary is None:
        boundary = _frozen_ring(field)
    return Simulation.original(field.grid, boundary, config).step(field, dt)


def step_transformed(field, dt, curve, boundary=None, config=None):
    if boundary is None:
        boundary = _frozen_ring(field)
    return Simulation.transformed(field.grid, curve, boundary, config).step(field, dt)


def _frozen_ring(field):
    ring = field.values[field.grid.boundary_mask()].copy()
    return Boundary(field.grid, lambda t, x1, x2: ring)


# ---------------------------------------------------------------------------
# time integration


@dataclass
class RunResult:
    snapshots: list
    series: dict
    steps: int
    dt_max: float
    max_principle_violation: float = 0.0
    extras: dict = field(default_factory=dict)


def run(sim, initial, config=None, reference=None, norms=((math.inf,),), observers=()):
    """Advance ``initial`` to ``config.end_time``.

    At ``initial.t``, every snapshot time, and the end time the difference
    ``u - reference(t)`` is measured in each norm of ``norms`` (tuples whose
    first entry is ``p``) and each ``observer(t, field)`` is called. The
    advection bound ``alpha`` is fixed up front from the initial and
    boundary data, which the maximum principle keeps valid.
    """
    config = config or sim.config
    stops = sorted({float(s) for s in config.snapshot_times if s > initial.t} | {float(config.end_time)})
    alpha = float(np.abs(initial.values).max())
    for t in (initial.t, config.end_time):
        if t > 0:
            alpha = max(alpha, float(np.abs(sim.boundary.values(t)).max()))
    dt_max = sim.stable_dt(alpha)
    series = {}
    snapshots = []
    h1, h2 = sim.grid.h1, sim.grid.h2

    def record(f):
        if reference is not None:
            diff = f.values - reference(f.t)
            for spec in norms:
                p = spec[0]
                key = f"u_minus_ref_L{'inf' if math.isinf(p) else format(p, 'g')}"
                series.setdefault(key, DecaySeries(key, p)).append(f.t, lp_norm(diff, p, h1, h2))
        for obs in observers:
            obs(f.t, f)

    f = initial
    steps = 0
    worst = 0.0
    if initial.t in {float(s) for s in config.snapshot_times}:
        snapshots.append(initial)
        record(initial)
    for stop in stops:
        n = max(1, math.ceil((stop - f.t) / dt_max - 1e-9))
        dt = (stop - f.t) / n
        for k in range(n):
            if config.check_max_principle:
                ring = sim.boundary.values(f.t + dt)
                lo = min(float(f.values.min()), float(ring.min()))
                hi = max(float(f.values.max()), float(ring.max()))
            f = sim.step(f, dt, alpha=alpha)
            if k == n - 1:
                f = Field2D(sim.grid, stop, f.values)
            steps += 1
            if config.check_max_principle:
                worst = max(worst, lo - float(f.values.min()), float(f.values.max()) - hi)
        snapshots.append(f)
        record(f)
    return RunResult(snapshots, series, steps, dt_max, worst)


# ---------------------------------------------------------------------------
# initial data


def bump(x, y, amplitude=1.0, center=(0.0, 0.0), radius=1.0):
    """Smooth bump with peak ``amplitude`` and support in the disc of ``radius``."""
    r2 = ((np.asarray(x) - center[0]) ** 2 + (np.asarray(y) - center[1]) ** 2) / radius**2
    out = np.zeros(np.broadcast(x, y).shape)
    inside = r2 < 1.0
    out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def smooth_initial_original(grid, data, params=None, perturbation=None):
    """``w0(Z(x, y))`` plus an optional bump ``(amplitude, center, radius)``."""
    from . import profiles

    params = params or profiles.ProfileParams(data.u_minus, data.u_plus)
    X, Y = grid.mesh()
    u = profiles.w0(params, geometry.Z(data.curve, X, Y))
    if perturbation:
        amp, center, radius = perturbation
        u = u + bump(X, Y, amp, center, radius)
    return Field2D(grid, 0.0, u)
