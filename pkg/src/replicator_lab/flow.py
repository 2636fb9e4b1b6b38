"""Numerical flow of the reduced replicator equation on [0, 1].

Adaptive Dormand-Prince 5(4) with max step 0.1 and min step 1e-12. The
state is clamped to [0, 1] after every accepted step and the run stops
early once the field is negligible next to a known fixed point.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numba
import numpy as np

from .game_core import EPS_PAY, PayoffMatrix, reduced_field_coefficients
from .local_analysis import fixed_points, is_degenerate, simplex_points

MAX_STEP = 0.1
MIN_STEP = 1e-12
OMEGA_HORIZONS = (1e2, 1e3, 1e4)
OMEGA_AGREEMENT = 1e-6

_REASONS = ("Converged", "HorizonReached", "StepFailure")


class TerminalReason(enum.Enum):
    Converged = "Converged"
    HorizonReached = "HorizonReached"
    StepFailure = "StepFailure"


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    terminal_reason: TerminalReason
    # largest excursion outside [0, 1] removed by clamping
    max_clamp_violation: float = 0.0

    @property
    def final(self) -> float:
        return float(self.states[-1])

    def state_at(self, t: float) -> float:
        """State at time ``t``; constant after early termination."""
        if t >= self.times[-1]:
            return self.final
        return float(np.interp(t, self.times, self.states))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x1", "x2"])
            for t, x in zip(self.times, self.states):
                w.writerow([f"{t:.17g}", f"{x:.17g}", f"{1.0 - x:.17g}"])


# Dormand-Prince tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1 = 71 / 57600
_E3 = -71 / 16695
_E4 = 71 / 1920
_E5 = -17253 / 339200
_E6 = 22 / 525
_E7 = -1 / 40


@numba.njit(cache=True)
def _f(x, c1, c2, c3):
    return x * (c1 + x * (c2 + x * c3))


@numba.njit(cache=True)
def _dp45(x0, horizon, tol, c1, c2, c3, fps, checkpoints, max_step, min_step):
    cap = 1024
    ts = np.empty(cap)
    xs = np.empty(cap)
    ts[0] = 0.0
    xs[0] = x0
    n = 1
    t = 0.0
    x = x0
    k1 = _f(x, c1, c2, c3)
    h = min(max_step, horizon)
    reason = 1
    violation = 0.0
    ci = 0
    while t < horizon:
        while ci < checkpoints.shape[0] and checkpoints[ci] <= t:
            ci += 1
        target = horizon
        if ci < checkpoints.shape[0] and checkpoints[ci] < horizon:
            target = checkpoints[ci]
        step = min(h, target - t)
        k2 = _f(x + step * _A21 * k1, c1, c2, c3)
        k3 = _f(x + step * (_A31 * k1 + _A32 * k2), c1, c2, c3)
        k4 = _f(x + step * (_A41 * k1 + _A42 * k2 + _A43 * k3), c1, c2, c3)
        k5 = _f(x + step * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), c1, c2, c3)
        k6 = _f(x + step * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
                c1, c2, c3)
        xn = x + step * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _f(xn, c1, c2, c3)
        err = step * abs(_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = tol + tol * max(abs(x), abs(xn))
        ratio = err / scale
        if ratio <= 1.0:
            t = target if step == target - t else t + step
            if xn < 0.0:
                violation = max(violation, -xn)
                xn = 0.0
                k7 = 0.0
            elif xn > 1.0:
                violation = max(violation, xn - 1.0)
                xn = 1.0
                k7 = 0.0
            x = xn
            k1 = k7
            if n == cap:
                cap *= 2
                ts2 = np.empty(cap)
                xs2 = np.empty(cap)
                ts2[:n] = ts[:n]
                xs2[:n] = xs[:n]
                ts = ts2
                xs = xs2
            ts[n] = t
            xs[n] = x
            n += 1
            if abs(k1) < tol * 1e-3:
                near = False
                for z in fps:
                    if abs(x - z) < tol:
                        near = True
                        break
                if near:
                    reason = 0
                    break
            fac = 5.0 if ratio == 0.0 else min(5.0, max(0.2, 0.9 * ratio ** -0.2))
            h = min(max_step, step * fac)
        else:
            h = step * max(0.2, 0.9 * ratio ** -0.25)
            if h < min_step:
                reason = 2
                break
    return ts[:n].copy(), xs[:n].copy(), reason, violation


def integrate(m: PayoffMatrix, x0: float, horizon: float, tol: float = 1e-9,
              checkpoints: Optional[Sequence[float]] = None,
              eps: float = EPS_PAY, max_step: float = MAX_STEP) -> Trajectory:
    """Integrate the reduced field from ``x0`` up to ``horizon``.

    ``checkpoints`` are times the step controller lands on exactly.
    """
    x0 = float(x0)
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0 must lie in [0, 1], got {x0}")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    _, c1, c2, c3 = (float(c) for c in reduced_field_coefficients(m))
    if _f(x0, c1, c2, c3) == 0.0:
        return Trajectory(np.array([0.0, float(horizon)]), np.array([x0, x0]),
                          TerminalReason.Converged)
    if is_degenerate(m, eps):
        locs = np.array([x0])
    else:
        locs = np.array([float(p.location) for p in simplex_points(fixed_points(m, eps))])
    cps = np.sort(np.asarray(checkpoints if checkpoints is not None else [], dtype=float))
    ts, xs, reason, violation = _dp45(x0, float(horizon), float(tol), c1, c2, c3, locs, cps,
                                      float(max_step), MIN_STEP)
    return Trajectory(ts, xs, TerminalReason(_REASONS[reason]), violation)


def omega_limit_estimate(m: PayoffMatrix, x0: float, tol: float = 1e-9,
                         eps: float = EPS_PAY) -> Optional[float]:
    """Estimated omega-limit of ``x0``; ``None`` means undetermined.

    A single run to the longest horizon lands exactly on the shorter ones
    and is read off at each of them. The limit is accepted when the last two horizons agree within 1e-6. Failing that, a
    run that moved monotonically toward the next fixed point ahead of it,
    with the gap still shrinking, is assigned that point: a bounded
    monotone orbit of a scalar ODE cannot pass a fixed point. This covers
    the algebraic approach to non-hyperbolic points.
    """
    traj = integrate(m, x0, OMEGA_HORIZONS[-1], tol, checkpoints=OMEGA_HORIZONS[:-1], eps=eps)
    if is_degenerate(m, eps):
        return float(x0)
    locs = sorted(float(p.location) for p in simplex_points(fixed_points(m, eps)))
    at = [traj.state_at(h) for h in OMEGA_HORIZONS]
    last = at[-1]
    if abs(at[-1] - at[-2]) <= OMEGA_AGREEMENT:
        return _snap(last, locs, tol)

    x_start = float(traj.states[0])
    direction = np.sign(last - x_start)
    if direction == 0:
        return None
    diffs = np.diff(traj.states)
    if np.any(direction * diffs < -1e-9):
        return None
    ahead = [z for z in locs if direction * (z - last) >= 0]
    if not ahead:
        return None
    target = min(ahead, key=lambda z: abs(z - last))
    if abs(target - at[-1]) < abs(target - at[-2]):
        return target
    return None


def _snap(x: float, locs: list, tol: float) -> float:
    for z in locs:
        if abs(x - z) <= max(OMEGA_AGREEMENT, tol):
            return z
    return x


@dataclass(frozen=True)
class BasinMap:
    grid: np.ndarray
    limits: list  # float limit or None (undetermined)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x0", "limit"])
            for x0, lim in zip(self.grid, self.limits):
                w.writerow([f"{x0:.17g}", "Undetermined" if lim is None else f"{lim:.17g}"])


def basin_sweep(m: PayoffMatrix, grid_size: int, eps: float = EPS_PAY) -> BasinMap:
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    from ._parallel import parallel_map

    grid = np.linspace(0.0, 1.0, grid_size)
    limits = parallel_map(_omega_task, [(m, float(x0), eps) for x0 in grid])
    return BasinMap(grid, limits)


def _omega_task(args):
    m, x0, eps = args
    return omega_limit_estimate(m, x0, eps=eps)
