import math

import numpy as np
import pytest

from surgerybench.neck_solver import SurgeryInput, solve_neck
from surgerybench.profiles import solve_fc, solve_h0

# R/N close to pi/2 keeps the slope target cos(R/N) reachable on t <= 100
FEASIBLE_RATIO = 1.5


@pytest.fixture(scope="session")
def h0_half():
    return solve_h0(0.5, 50.0, 1e-10)


@pytest.fixture(scope="session")
def fc_half(h0_half):
    return solve_fc(0.5, h0_half)


@pytest.fixture(scope="session")
def feasible_input():
    return SurgeryInput(3, 3, FEASIBLE_RATIO, 0.5, 1.0)


@pytest.fixture(scope="session")
def feasible_certificate(feasible_input):
    first = solve_neck(feasible_input)
    inp = SurgeryInput(3, 3, FEASIBLE_RATIO, 0.5, 1.0, rho_over_N=first.kappa / 2)
    return solve_neck(inp)


def analytic_pair(coeffs, start=0.0, end=2.0):
    """Smooth positive pair built from trigonometric and polynomial pieces."""
    from surgerybench.warp_core import WarpProfilePair

    c0, c1, w1, ph, d0, d1, w2, d2 = coeffs

    def h(t):
        t = np.asarray(t, dtype=float)
        s, c = np.sin(w1 * t + ph), np.cos(w1 * t + ph)
        return c0 + c1 * s, c1 * w1 * c, -c1 * w1 * w1 * s

    def f(t):
        t = np.asarray(t, dtype=float)
        s, c = np.sin(w2 * t), np.cos(w2 * t)
        return d0 + d1 * c + d2 * t * t, -d1 * w2 * s + 2 * d2 * t, -d1 * w2 * w2 * c + 2 * d2

    return WarpProfilePair.from_functions(h, f, start, end)


def random_coeffs(rng):
    c1 = rng.uniform(-0.5, 0.5)
    d1 = rng.uniform(-0.5, 0.5)
    return (rng.uniform(1.0, 2.0), c1, rng.uniform(0.2, 2.0), rng.uniform(0, 2 * math.pi),
            rng.uniform(1.0, 2.0), d1, rng.uniform(0.2, 2.0), rng.uniform(0.0, 0.3))
