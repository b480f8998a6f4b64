import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rarefaction2d import geometry
from rarefaction2d.exactwave import RiemannData

settings.register_profile("repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def polyline():
    return geometry.mollify_polyline(-1.0, 0.0, 0.5, 0.0, 1.0)


@pytest.fixture(scope="session")
def curves(polyline):
    return {
        "line": geometry.Line(0.3, 1.0),
        "polyline": polyline,
        "step": geometry.mollify_polyline(-1.0, -0.5, -1.0, 0.5, 2.0),
        "arctan": geometry.SmoothPerturbedLine(0.0, 0.0, 0.5, 1.0, "arctan"),
        "gaussian": geometry.SmoothPerturbedLine(-0.5, 0.2, 0.4, 0.7, "gaussian"),
    }


@pytest.fixture(scope="session")
def riemann(polyline):
    return RiemannData(-1.0, 1.0, polyline)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_admissible_curve(rng):
    """One of the three curve families with random admissible parameters."""
    kind = rng.integers(3)
    if kind == 0:
        return geometry.Line(rng.uniform(-3.0, 0.8), rng.uniform(-2.0, 2.0))
    if kind == 1:
        k1, k2 = rng.uniform(-3.0, 0.7, 2)
        eps0 = rng.uniform(0.5, 2.0)
        c1 = rng.uniform(-1.0, 1.0)
        # keep the jump contribution to the slope below half the margin
        c2 = c1 + rng.uniform(-0.5, 0.5) * (1.0 - max(k1, k2)) * eps0
        return geometry.mollify_polyline(k1, c1, k2, c2, eps0)
    k = rng.uniform(-2.0, 0.3)
    width = rng.uniform(0.5, 2.0)
    amp = rng.uniform(-0.5, 0.5) * (1.0 - k) * width
    return geometry.SmoothPerturbedLine(k, rng.uniform(-1, 1), amp, width, "arctan")


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    def record(number, title, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
