"""Quick property suite behind the ``verify`` command.

Each check returns ``(name, passed, worst_value, limit)``. The suite is
deterministic for a given seed and takes a few seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exactwave, geometry, profiles, solver, transform
from .fields import Grid2D
from .norms import DecaySeries, fit_decay, lp_norm


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float


def _result(name, value, limit):
    value = float(value)
    return CheckResult(name, bool(value <= limit), value, float(limit))


def _sample_xy(curve, rng, n, scale=10.0):
    x = rng.uniform(-scale, scale, n)
    y = curve.phi(x) + rng.uniform(-scale, scale, n)
    return x, y


def coefficient_identity(curve, xi, tamper=None):
    """``max |A^2 - 8K + 4|``; ``tamper='A'`` overwrites one ``A`` with -3."""
    c = transform.eval_KAB(curve, xi)
    A = np.array(c.A, dtype=float, copy=True)
    if tamper == "A":
        A[len(A) // 2] = -3.0
    return float(np.max(np.abs(A * A - 8.0 * c.K + 4.0)))


def run_suite(data, samples=1000, seed=0, tamper="none"):
    rng = np.random.default_rng(seed)
    curve = data.curve
    out = []
    jump = data.u_plus - data.u_minus

    xi = np.sort(rng.uniform(-20.0, 20.0, samples))
    out.append(_result("coefficient_identity", coefficient_identity(curve, xi, tamper), 1e-12))
    c = transform.eval_KAB(curve, xi)
    d = transform.ellipticity_constant(curve)
    out.append(_result("ellipticity_positive", -d, 0.0))
    out.append(_result("ellipticity_is_lower_bound", float(np.max(d - c.d)), 1e-12))

    x, y = _sample_xy(curve, rng, samples)
    rz = geometry.solve_Z(curve, x, y)
    out.append(_result("Z_residual", np.max(np.abs(rz.residual)), 1e-12))
    rg = geometry.solve_G(curve, x - y)
    out.append(_result("G_residual", np.max(np.abs(rg.residual)), 1e-12))
    z = rz.value
    zx, zy, *_ = geometry.dZ(curve, x, y, z)
    out.append(_result("Zx_plus_Zy", np.max(np.abs(zx + zy - 1.0)), 1e-9))
    out.append(_result("x_minus_Z_is_G", np.max(np.abs(x - z - rg.value)), 1e-9))
    side = y - curve.phi(x)
    away = np.abs(side) > 1e-9
    out.append(_result("sign_Z", float(np.sum(np.sign(z[away]) != np.sign(side[away]))), 0.0))

    eta = rng.uniform(-10.0, 10.0, samples)
    xb, yb = transform.from_transformed(curve, xi, eta)
    xi2, eta2 = transform.to_transformed(curve, xb, yb)
    out.append(_result("round_trip", max(np.max(np.abs(xi2 - xi)), np.max(np.abs(eta2 - eta))), 1e-10))
    jac = transform.jacobian(curve, x[:64], y[:64])
    out.append(_result("unit_jacobian", np.max(np.abs(jac - 1.0)), 1e-6))

    for t in (1.0, 4.0):
        u = np.asarray(exactwave.eval_rarefaction(data, t, x, y, z))
        outside = np.maximum(data.u_minus - u, u - data.u_plus)
        out.append(_result(f"wave_in_range_t{t:g}", float(outside.max()), 0.0))
        ux = np.asarray(exactwave.eval_rarefaction(data, t, x, y + 1e-3))
        out.append(_result(f"wave_monotone_in_y_t{t:g}", float(np.max(u - ux)), 0.0))

    higher = exactwave.RiemannData(data.u_minus, data.u_plus, curve.shifted(1.0))
    worst_order, worst_shift = -math.inf, 0.0
    for t in (1.0, 2.0):
        xs, ys = exactwave.comparison_samples(higher, data, t, 64)
        u_hi = np.asarray(exactwave.eval_rarefaction(higher, t, xs, ys))
        u_lo = np.asarray(exactwave.eval_rarefaction(data, t, xs, ys))
        worst_order = max(worst_order, float(np.max(u_hi - u_lo)))
        worst_shift = max(worst_shift, float(np.max(np.abs(u_hi - u_lo))) * curve.d0 * t)
    out.append(_result("comparison_ordered", worst_order, 1e-10))
    out.append(_result("shift_bound_ratio", worst_shift, 1.0 + 1e-6))

    params = profiles.ProfileParams(data.u_minus, data.u_plus)
    n_p = min(samples, 64)
    xi_p = rng.uniform(-3.0, 3.0, n_p)
    eta_p = rng.uniform(-6.0, 6.0, n_p)
    for t in (1.0, 4.0):
        part = profiles.v_partials(params, t, xi_p, eta_p, curve)
        vt = profiles.v_t_difference(params, t, xi_p, eta_p, curve)
        K = transform.eval_KAB(curve, xi_p).K
        res = vt + part.v * part.v_eta - K * part.v_eta_eta
        out.append(_result(f"profile_pde_residual_t{t:g}", np.max(np.abs(res)) / jump, 1e-6))
        out.append(_result(f"profile_v_eta_positive_t{t:g}", -float(np.min(part.v_eta)), 0.0))
        inside = np.maximum(data.u_minus - part.v, part.v - data.u_plus)
        out.append(_result(f"profile_in_range_t{t:g}", float(np.max(inside)), 0.0))
    w = profiles.eval_w(params, 2.0, eta_p)
    out.append(_result("w_root_residual", np.max(np.abs(w - profiles.w0(params, eta_p - 2.0 * w))), 1e-12))

    span = transform.support_interval(curve)
    if span is not None and np.all(np.isfinite(span)):
        far = np.concatenate([np.linspace(span[0] - 5.0, span[0] - 0.05, 8), np.linspace(span[1] + 0.05, span[1] + 5.0, 8)])
        part = profiles.v_partials(params, 2.0, far, np.zeros_like(far), curve)
        out.append(_result("v_xi_support", np.max(np.abs(part.v_xi)) / jump, 1e-8))

    grid = Grid2D.square(6.0, 33)
    cfg = solver.SolverConfig(end_time=2.0, snapshot_times=(2.0,), check_max_principle=True)
    sim = solver.Simulation.original(grid, solver.exact_wave_boundary(grid, data), cfg)
    res = solver.run(sim, solver.smooth_initial_original(grid, data, params, (0.5, (0.0, 0.0), 2.0)), cfg)
    out.append(_result("max_principle", res.max_principle_violation, 1e-12))
    op = solver.original_operator()
    out.append(_result("stencil_monotone", 0.0 if solver.stencil_is_monotone(op, grid.h1, grid.h2) else 1.0, 0.0))

    s = DecaySeries("synthetic", 2.0)
    for t in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0):
        s.append(t, (1.0 + t) ** -0.5)
    out.append(_result("fit_exact_power_law", abs(fit_decay(s).exponent + 0.5), 1e-12))
    g = Grid2D(-8.0, 8.0, 161, -8.0, 8.0, 161)
    X, Y = g.mesh()
    gauss = np.exp(-(X * X + Y * Y))
    out.append(_result("lp_norm_gaussian", abs(lp_norm(gauss, 2.0, g.h1, g.h2) - math.sqrt(math.pi / 2.0)), 1e-8))
    return out
