import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from replicator_lab.game_core import PayoffMatrix

# first calls pay for loading the compiled integrator
settings.register_profile("default", deadline=None)
settings.load_profile("default")

payoff = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
matrices = st.builds(PayoffMatrix, payoff, payoff, payoff, payoff)
unit = st.floats(0, 1, allow_nan=False)


def random_matrix(rng, lo=-5.0, hi=5.0):
    return PayoffMatrix(*rng.uniform(lo, hi, 4).tolist())


def bisection_roots(f, lo=0.0, hi=1.0, n=10_000, xtol=1e-13):
    """Roots of a scalar function on [lo, hi]: exact grid zeros plus bisected sign changes."""
    grid = np.linspace(lo, hi, n + 1)
    vals = np.broadcast_to(np.asarray(f(grid), dtype=float), grid.shape)
    roots = [float(x) for x, v in zip(grid, vals) if v == 0.0]
    for i in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        a, b, fa = grid[i], grid[i + 1], vals[i]
        while b - a > xtol:
            mid = 0.5 * (a + b)
            fm = f(mid)
            if fm == 0:
                a = b = mid
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    return sorted(roots)


def central_difference(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


# acceptance results, printed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, text in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
