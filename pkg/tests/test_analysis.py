import math

import numpy as np
import pytest

from rarefaction2d import analysis, geometry, profiles
from rarefaction2d.exactwave import RiemannData

POLY = geometry.mollify_polyline(-1.0, 0.0, 0.5, 0.0, 1.0)


def test_report_passed_and_rows():
    rep = analysis.Report("x")
    assert rep.passed
    rep.checks["a"] = True
    rep.checks["b"] = False
    assert not rep.passed


def test_identical_curves_have_zero_gap():
    d = RiemannData(-1, 1, POLY)
    rep = analysis.experiment_curve_stability(d, d, (1.0, 2.0, 4.0), n=32)
    assert rep.passed and rep.info["envelope"] == 0.0


def test_comparison_detects_wrong_order():
    hi = RiemannData(-1, 1, geometry.Line(0.0, 1.0))
    lo = RiemannData(-1, 1, geometry.Line(0.0, 0.0))
    assert analysis.experiment_comparison([(hi, lo)], (1.0, 2.0), n=32).passed
    assert not analysis.experiment_comparison([(lo, hi)], (1.0, 2.0), n=32).passed


def test_shift_bound_is_sharp_for_flat_line():
    # for a horizontal line the bound M/(d0 t) is attained inside the fan
    rep = analysis.experiment_shift_bound(RiemannData(-1, 1, geometry.Line(0.0, 0.0)), (0.5,), (2.0, 4.0), n=64)
    assert rep.passed and rep.info["worst_ratio"] == pytest.approx(1.0, abs=1e-9)


def test_profile_decay_on_line_curve():
    c = geometry.Line(-1.0, 0.0)
    P = profiles.ProfileParams(-4.0, 4.0)
    rep = analysis.experiment_profile_decay(P, c, (1, 2, 4, 8, 16), lambda t: profiles.default_decay_grid(P, c, t, 9, 401))
    assert rep.checks["v_xi_Linf_zero"]
    assert "v_xi_Linf" not in rep.fits
    assert rep.fits["v_eta_Linf"].exponent < -0.8


def test_stability_decay_small_run():
    spec = analysis.MainRunSpec(half_width=20.0, n=33, times=(4.0, 8.0, 16.0, 32.0))
    rep = analysis.experiment_stability_decay(RiemannData(-1, 1, POLY), spec, doubling=True)
    names = {(s.label, s.p) for s in rep.series}
    assert ("u_minus_uR", math.inf) in names and ("domain_doubling_rel_change", math.inf) in names
    assert {"monotone_decrease", "exponent", "truncation"} <= set(rep.checks)
    assert np.isfinite(rep.info["truncation_rel"])


def test_perturbation_norms_small_run():
    spec = analysis.PerturbationSpec(xi_half=8.0, eta_half=16.0, n_xi=17, n_eta=33, times=(1.0, 2.0, 3.0, 4.0))
    rep = analysis.experiment_perturbation_norms(RiemannData(-1, 1, POLY), spec)
    assert set(rep.checks) == {"L6_log_bounded", "L8_exponent"}
    assert {"L8_monotone", "L8_peak_over_first", "pert0_L6"} <= set(rep.info)
    l8 = next(s for s in rep.series if s.label == "pert" and s.p == 8.0)
    assert all(v > 0 for v in l8.values)
