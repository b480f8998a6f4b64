"""Acceptance criteria 1-12, each recorded as one PASS/FAIL line.

Criteria 5, 10 and 11 run the full experiments and take several minutes.
"""
import math
import os
import time

import numpy as np
import pytest

from rarefaction2d import analysis, cli, config, geometry, profiles, solver, transform
from rarefaction2d.exactwave import RiemannData
from rarefaction2d.fields import Field2D, Grid2D
from rarefaction2d.profiles import ProfileParams
from rarefaction2d.reference1d import crank_nicolson, riemann_viscous

from conftest import random_admissible_curve

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")
POLY = geometry.mollify_polyline(-1.0, 0.0, 0.5, 0.0, 1.0)
UNIT = ProfileParams(-1.0, 1.0)


def test_c01_coefficient_identity(criterion):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        c = random_admissible_curve(rng)
        s = transform.eval_KAB(c, rng.uniform(-30, 30, 1000))
        worst = max(worst, float(np.max(np.abs(s.A**2 - 8 * s.K + 4)) / max(1.0, float(s.K.max()))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    assert criterion(1, "A^2 - 8K = -4", ok, f"max err {worst:.1e}, {elapsed:.2f} s")


def _richardson(f, exact, h):
    return np.max(np.abs(f(h) - exact)) / np.max(np.abs(f(h / 2) - exact))


def test_c02_implicit_functions(criterion):
    rng = np.random.default_rng(2)
    res = ident = 0.0
    sign_ok = True
    for c in (POLY, geometry.SmoothPerturbedLine(0.0, 0.0, 0.5, 1.0, "arctan"), geometry.Line(-0.5, 1.0)):
        x = rng.uniform(-20, 20, 10_000)
        y = c.phi(x) + rng.uniform(-20, 20, 10_000)
        rz, rg = geometry.solve_Z(c, x, y), geometry.solve_G(c, x - y)
        res = max(res, float(np.abs(rz.residual).max()), float(np.abs(rg.residual).max()))
        zx, zy, *_ = geometry.dZ(c, x, y, rz.value)
        ident = max(ident, float(np.abs(zx + zy - 1).max()), float(np.abs(x - rz.value - rg.value).max()))
        side = y - c.phi(x)
        keep = np.abs(side) > 1e-9
        sign_ok &= bool(np.all(np.sign(rz.value[keep]) == np.sign(side[keep])))
    foot = np.array([-0.6, -0.25, 0.2, 0.55])
    z = np.array([0.3, -1.0, 2.0, 0.7])
    x, y = foot + z, POLY.phi(foot) + z
    zx, zy, zxx, zxy, zyy = geometry.dZ(POLY, x, y)
    Z = lambda a, b: geometry.Z(POLY, a, b)  # noqa: E731
    ratios = [
        _richardson(lambda s: (Z(x + s, y) - Z(x - s, y)) / (2 * s), zx, 2e-2),
        _richardson(lambda s: (Z(x, y + s) - Z(x, y - s)) / (2 * s), zy, 2e-2),
        _richardson(lambda s: (Z(x + s, y) - 2 * Z(x, y) + Z(x - s, y)) / s**2, zxx, 2e-2),
        _richardson(lambda s: (Z(x + s, y + s) - Z(x + s, y - s) - Z(x - s, y + s) + Z(x - s, y - s)) / (4 * s * s), zxy, 2e-2),
        _richardson(lambda s: (Z(x, y + s) - 2 * Z(x, y) + Z(x, y - s)) / s**2, zyy, 2e-2),
    ]
    ok = res <= 1e-12 and ident <= 1e-9 and sign_ok and all(3.5 <= r <= 4.5 for r in ratios)
    detail = f"residual {res:.1e}, identities {ident:.1e}, ratios {min(ratios):.2f}..{max(ratios):.2f}"
    assert criterion(2, "implicit functions Z and G", ok, detail)


def test_c03_coordinate_map(criterion):
    rng = np.random.default_rng(3)
    jac = trip = 0.0
    for c in (POLY, geometry.SmoothPerturbedLine(-0.5, 0.2, 0.4, 0.7, "gaussian")):
        xi, eta = rng.uniform(-10, 10, (2, 1000))
        x, y = transform.from_transformed(c, xi, eta)
        xi2, eta2 = transform.to_transformed(c, x, y)
        trip = max(trip, float(np.abs(xi2 - xi).max()), float(np.abs(eta2 - eta).max()))
        jac = max(jac, float(np.abs(transform.jacobian(c, x[:200], y[:200]) - 1).max()))
    ok = jac <= 1e-6 and trip <= 1e-10
    assert criterion(3, "unit Jacobian and round trip", ok, f"Jacobian {jac:.1e}, round trip {trip:.1e}")


def test_c04_viscous_profile(criterion):
    jump = UNIT.u_plus - UNIT.u_minus
    g1, g2 = transform.support_interval(POLY)
    xi = np.linspace(g1 - 1, g2 + 1, 64)
    worst_res, min_eta = 0.0, math.inf
    for t in (1.0, 4.0, 16.0):
        eta = np.linspace(-t - 6, t + 6, 64)
        XI, ETA = np.meshgrid(xi, eta, indexing="ij")
        part = profiles.v_partials(UNIT, t, XI, ETA, POLY)
        K = transform.eval_KAB(POLY, XI).K
        # time derivative by differences, so the residual is not an identity
        vt = profiles.v_t_difference(UNIT, t, XI, ETA, POLY)
        worst_res = max(worst_res, float(np.abs(vt + part.v * part.v_eta - K * part.v_eta_eta).max()))
        min_eta = min(min_eta, float(part.v_eta.min()))
    L, h = 60.0, 0.02
    s = np.arange(-L, L + h / 2, h)
    far = lambda t: (float(profiles.eval_w(UNIT, t, -L)), float(profiles.eval_w(UNIT, t, L)))  # noqa: E731
    ref = crank_nicolson(profiles.w0(UNIT, s), s, 2.0, 0.0, 2.0, 0.004, far)
    keep = np.abs(s) <= 8
    cn = float(np.abs(profiles.eval_v_K(UNIT, 2.0, 2.0, s[keep]) - ref[keep]).max())
    delta = 0.05
    xo = np.concatenate([np.linspace(g1 - 6, g1 - delta, 10), np.linspace(g2 + delta, g2 + 6, 10)])
    outside = float(np.abs(profiles.profile_on_grid(UNIT, 3.0, xo, np.linspace(-6, 6, 25), POLY).v_xi).max())
    ok = worst_res <= 1e-6 * jump and min_eta > 0 and cn <= 1e-4 and outside <= 1e-8 * jump
    detail = f"residual {worst_res:.1e}, min v_eta {min_eta:.1e}, CN gap {cn:.1e}, v_xi outside {outside:.1e}"
    assert criterion(4, "Hopf-Cole profile", ok, detail)


def test_c05_profile_decay(criterion):
    cfg = config.load(os.path.join(CONFIGS, "profile_decay.cfg"))
    data = cfg.riemann()
    params = ProfileParams(data.u_minus, data.u_plus)
    grid = lambda t: profiles.default_decay_grid(params, data.curve, t, cfg["profile.n_xi"], cfg["profile.n_eta"])  # noqa: E731
    rep = analysis.experiment_profile_decay(params, data.curve, cfg["profile.times"], grid)
    # unit jump for reference: the window [1, 100] is still pre-asymptotic there
    unit = analysis.experiment_profile_decay(
        UNIT, geometry.Line(-1.0, 0.0), cfg["profile.times"], lambda t: profiles.default_decay_grid(UNIT, geometry.Line(-1.0, 0.0), t, 9, 801)
    )
    detail = ", ".join(f"{k} {f.exponent:.3f}" for k, f in rep.fits.items())
    detail += f"; info only: jump 2, K = 1/2 gives v_minus_w {unit.fits['v_minus_w_Linf'].exponent:.3f}"
    assert criterion(5, "profile decay over [1, 100], jump 8", rep.passed, detail)


SAMPLE_PAIRS = [
    (RiemannData(-1, 1, geometry.Line(0.0, 0.0)), RiemannData(-1, 1, geometry.Line(0.0, -1.0))),
    (RiemannData(-1, 1, POLY), RiemannData(-1, 1, POLY.shifted(-1.0))),
    (RiemannData(-1, 1, POLY), RiemannData(-1, 1, geometry.Line(-1.0, 0.0))),
    (RiemannData(-1, 1, geometry.SmoothPerturbedLine(0.0, 0.0, 0.5, 1.0, "gaussian")), RiemannData(-1, 1, geometry.Line(0.0, 0.0))),
    (RiemannData(-1, 1, POLY), RiemannData(-1, 1, geometry.Line(0.5, 0.0))),
]


def test_c06_comparison(criterion):
    # each pair has phi2 <= phi1 everywhere
    x = np.linspace(-50, 50, 20001)
    for d1, d2 in SAMPLE_PAIRS:
        assert np.all(d2.curve.phi(x) <= d1.curve.phi(x) + 1e-12)
    rep = analysis.experiment_comparison(SAMPLE_PAIRS, (1.0, 2.0, 4.0, 8.0), 256, 1e-10)
    assert criterion(6, "comparison of ordered curves", rep.passed, f"max u1 - u2 = {rep.info['worst']:.1e}")


def test_c07_shift_bound(criterion):
    rep = analysis.experiment_shift_bound(RiemannData(-1, 1, POLY), (0.5, 2.0), (1.0, 2.0, 4.0, 8.0, 16.0))
    assert criterion(7, "shift bound M/(d0 t)", rep.passed, f"worst ratio {rep.info['worst_ratio']:.12f}")


def test_c08_curve_stability(criterion):
    cfg = config.load(os.path.join(CONFIGS, "compare.cfg"), ("curve", "curve2", "riemann"))
    d1, d2 = cfg.riemann("curve"), cfg.riemann("curve2")
    x = np.linspace(-200, 200, 40001)
    gap = float(np.abs(d1.curve.phi(x) - d2.curve.phi(x)).max())
    rep = analysis.experiment_curve_stability(d1, d2, cfg["compare.times"], cfg["compare.n"])
    detail = f"curve gap {gap:.3f}, envelope {rep.info['envelope']:.4f}, worst rise {rep.info['worst_rise']:.1e}"
    assert criterion(8, "curve stability t sup|u1 - u2|", rep.passed and gap < 1.0, detail)


def _psi(t, s):
    return 0.5 * riemann_viscous(s, t, -1.0, 1.0, 2.0)


def test_c09_solver_validation(criterion):
    data = RiemannData(-1.0, 1.0, POLY)
    g = Grid2D.square(6.0, 81)
    cfg = solver.SolverConfig(end_time=45.0, check_max_principle=True)
    sim = solver.Simulation.original(g, solver.exact_wave_boundary(g, data), cfg)
    init = solver.smooth_initial_original(g, data, perturbation=(0.9, (0.0, 0.0), 2.0))
    r = solver.run(sim, init.replace(np.clip(init.values, -1, 1)), cfg)
    errs = []
    for n in (33, 65):
        gr = Grid2D.square(8.0, n)
        c = solver.SolverConfig(advection="centered", end_time=2.0)
        s = solver.Simulation.original(gr, solver.Boundary(gr, lambda t, x, y: _psi(t, x + y)), c)
        X, Y = gr.mesh()
        out = solver.run(s, Field2D(gr, 1.0, _psi(1.0, X + Y)), c)
        errs.append(float(np.abs(out.snapshots[-1].values - _psi(2.0, X + Y)).max()))
    ratio = errs[0] / errs[1]
    ok = r.steps >= 10_000 and r.max_principle_violation <= 0.0 and 3.0 <= ratio <= 5.0
    detail = f"{r.steps} steps, violation {r.max_principle_violation:.1e}, psi ratio {ratio:.2f}"
    assert criterion(9, "maximum principle and psi(x+y) order", ok, detail)


@pytest.mark.slow
def test_c10_stability_decay(criterion):
    cfg = config.load(os.path.join(CONFIGS, "decay.cfg"))
    spec = analysis.MainRunSpec(
        half_width=cfg["decay.half_width"], n=cfg["decay.n"], times=cfg["decay.times"],
        perturbation=(cfg["perturbation.amplitude"], (0.0, 0.0), cfg["perturbation.radius"]),
    )
    rep = analysis.experiment_stability_decay(cfg.riemann(), spec, doubling=True)
    sup = next(s for s in rep.series if s.label == "u_minus_uR" and math.isinf(s.p))
    detail = (
        f"sup {', '.join(f'{v:.4f}' for v in sup.values)}; exponent {rep.fits['u_minus_uR_Linf'].exponent:.3f}; "
        f"truncation {rep.info['truncation_rel']:.1e}"
    )
    assert criterion(10, "main stability run, 512^2", rep.passed, detail)


@pytest.mark.slow
def test_c11_perturbation_norms(criterion):
    rep = analysis.experiment_perturbation_norms(RiemannData(-1.0, 1.0, POLY))
    l8 = next(s for s in rep.series if s.label == "pert" and s.p == 8.0)
    detail = (
        f"L6/ln exponent {rep.fits['pert_L6_over_log'].exponent:.3f}, L8 exponent {rep.fits['pert_L8'].exponent:.4f}, "
        f"L8 {', '.join(f'{v:.3f}' for v in l8.values)}"
    )
    assert criterion(11, "perturbation L6/L8 norms", rep.passed, detail)


SMALL = """
curve.kind = polyline
curve.k1 = -1
curve.k2 = 0.5
curve2.kind = line
curve2.k = -1
riemann.u_minus = -1
riemann.u_plus = 1
grid.n1 = 24
grid.n2 = 24
solver.end_time = 1
solver.snapshots = 0.5, 1
perturbation.amplitude = 0.5
perturbation.radius = 2
profile.times = 1, 2, 4, 8
profile.n_xi = 17
profile.n_eta = 201
decay.n = 33
decay.half_width = 20
compare.n = 32
verify.samples = 200
"""


def test_c12_determinism(tmp_path, criterion, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(SMALL)
    transformed = tmp_path / "tr.cfg"
    transformed.write_text(SMALL + "solver.coords = transformed\ngrid.x_lo = -3\ngrid.x_hi = 2\n")
    mismatched = []
    runs = [(name, cfg) for name in cli.COMMANDS] + [("simulate", transformed)]
    for i, (name, path) in enumerate(runs):
        trees, codes = [], []
        for j, workers in enumerate((1, 1, 3)):
            out = tmp_path / f"{i}_{j}"
            codes.append(cli.main([name, "--config", str(path), "--out", str(out), "--workers", str(workers), "--plots"]))
            trees.append({f: (out / f).read_bytes() for f in sorted(os.listdir(out))})
        if not (trees[0] == trees[1] == trees[2] and len(set(codes)) == 1 and trees[0]):
            mismatched.append(name)
    capsys.readouterr()
    ok = not mismatched
    assert criterion(12, "byte-identical outputs across reruns and workers", ok, f"{len(runs)} runs x 3, mismatched {mismatched}")
