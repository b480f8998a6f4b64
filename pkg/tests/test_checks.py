import numpy as np
import pytest

from rarefaction2d import checks, geometry
from rarefaction2d.exactwave import RiemannData


@pytest.mark.parametrize(
    "curve",
    [
        geometry.mollify_polyline(-1.0, 0.0, 0.5, 0.0, 1.0),
        geometry.Line(-0.5, 0.3),
        geometry.SmoothPerturbedLine(0.0, 0.0, 0.5, 1.0, "arctan"),
    ],
)
def test_suite_passes(curve):
    results = checks.run_suite(RiemannData(-1.0, 1.0, curve), samples=300)
    failed = [r.name for r in results if not r.passed]
    assert not failed
    assert len({r.name for r in results}) == len(results) >= 20


def test_tampered_coefficient_is_caught():
    data = RiemannData(-1.0, 1.0, geometry.mollify_polyline(-1.0, 0.0, 0.5, 0.0, 1.0))
    results = checks.run_suite(data, samples=300, tamper="A")
    assert [r.name for r in results if not r.passed] == ["coefficient_identity"]


def test_coefficient_identity_value():
    c = geometry.Line(0.0, 0.0)
    xi = np.linspace(-3, 3, 11)
    assert checks.coefficient_identity(c, xi) <= 1e-12
    # (-3)^2 - 8 + 4 = 5
    assert checks.coefficient_identity(c, xi, tamper="A") == pytest.approx(5.0)
    # A = -3 is the true value for slope 1/5, so the tamper is invisible there
    assert checks.coefficient_identity(geometry.Line(0.2, 0.0), xi, tamper="A") <= 1e-12
