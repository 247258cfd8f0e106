import math

import numpy as np
import pytest
from scipy import integrate

from dsgain import default_params, generate_grid, generate_winner_a1


def z_angular(d, a, b):
    """Independent oracle: average overlap of the rectangle with its copy
    shifted by ``d`` in direction theta, integrated over theta."""
    def f(t):
        return max(a - d * math.cos(t), 0.0) * max(b - d * math.sin(t), 0.0)

    # integrand kinks where either positive part switches off
    kinks = [t for t in (math.acos(min(1.0, a / d)) if d > 0 else 0.0,
                         math.asin(min(1.0, b / d)) if d > 0 else 0.0) if 0.0 < t < math.pi / 2]
    val = integrate.quad(f, 0.0, math.pi / 2, points=kinks or None, limit=200, epsabs=1e-15, epsrel=1e-13)[0]
    return 2.0 / (math.pi * a * b) * val


def circle_containment(d, a, b, n, rng):
    """Monte-Carlo oracle: fraction of points at distance d from a uniform
    point of an a x b rectangle that stay inside. Returns (estimate, n)."""
    p = rng.random((n, 2)) * [a, b]
    t = rng.random(n) * 2 * np.pi
    q = p + d * np.stack([np.cos(t), np.sin(t)], axis=1)
    inside = (q[:, 0] >= 0) & (q[:, 0] < a) & (q[:, 1] >= 0) & (q[:, 1] < b)
    return inside.mean()


# rows x cols layouts of 10 m rooms shown as the basic validation scenarios
VALIDATION_LAYOUTS = [(2, 3), (3, 3), (3, 4)]


@pytest.fixture(scope="session")
def params():
    return default_params()


@pytest.fixture(scope="session")
def winner():
    return generate_winner_a1(4.0, 3.0)


@pytest.fixture(scope="session")
def grid_3x2():
    return generate_grid(3, 2, 10.0, 10.0)


@pytest.fixture(scope="session")
def grid_3x3():
    return generate_grid(3, 3, 10.0, 10.0)


# filled by test_acceptance; echoed after the run so the verdicts survive output capture
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
