"""Data model and vector fields for the symmetric two-strategy game.

Strategy ``T`` is the predominantly two-point offense, ``Th`` the
predominantly three-point offense. ``x1`` is always the share of ``T``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real
from typing import Mapping

EPS_PAY = 1e-9
SIMPLEX_RENORM = 1e-9

PARAM_NAMES = ("alpha", "beta", "gamma", "delta")


class Strategy(enum.Enum):
    T = "T"
    Th = "Th"


def compare(a: Real, b: Real, eps: float = EPS_PAY) -> int:
    """Three-way comparison of payoffs under the relative-absolute tolerance.

    Returns 0 when ``|a - b| <= eps * max(1, |a|, |b|)``, otherwise the sign
    of ``a - b``. ``eps=0`` gives exact comparison, which is exact for
    ``Fraction`` inputs.
    """
    diff = a - b
    if eps and abs(diff) <= eps * max(1.0, abs(a), abs(b)):
        return 0
    if diff == 0:
        return 0
    return 1 if diff > 0 else -1


def is_zero(v: Real, eps: float = EPS_PAY) -> bool:
    return abs(v) <= eps


@dataclass(frozen=True)
class PayoffMatrix:
    """alpha = pi(T,T), beta = pi(T,Th), gamma = pi(Th,T), delta = pi(Th,Th)."""

    alpha: Real
    beta: Real
    gamma: Real
    delta: Real

    def __post_init__(self):
        for name in PARAM_NAMES:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, Real):
                raise TypeError(f"{name} must be a real number, got {v!r}")
            if not math.isfinite(float(v)):
                raise ValueError(f"{name} must be finite, got {v!r}")

    @classmethod
    def from_json(cls, doc: Mapping) -> "PayoffMatrix":
        missing = [k for k in PARAM_NAMES if k not in doc]
        if missing:
            raise ValueError(f"payoff matrix missing keys: {', '.join(missing)}")
        extra = set(doc) - set(PARAM_NAMES)
        if extra:
            raise ValueError(f"unknown payoff keys: {', '.join(sorted(extra))}")
        return cls(*(doc[k] for k in PARAM_NAMES))

    def to_json(self) -> dict:
        return {k: _plain(getattr(self, k)) for k in PARAM_NAMES}

    def astuple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def replace(self, **changes) -> "PayoffMatrix":
        unknown = set(changes) - set(PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        values = dict(zip(PARAM_NAMES, self.astuple()))
        values.update(changes)
        return PayoffMatrix(**values)

    def shifted(self, c: Real) -> "PayoffMatrix":
        return PayoffMatrix(self.alpha + c, self.beta + c, self.gamma + c, self.delta + c)

    def as_float(self) -> "PayoffMatrix":
        return PayoffMatrix(*(float(v) for v in self.astuple()))

    @property
    def payoff_range(self) -> float:
        vals = [float(v) for v in self.astuple()]
        return max(vals) - min(vals)


def _plain(v):
    if isinstance(v, int):
        return v
    return float(v)


def _simplex_pair(a: Real, b: Real, label: str) -> tuple:
    for v in (a, b):
        if not math.isfinite(float(v)):
            raise ValueError(f"{label} entries must be finite")
        if v < 0 or v > 1:
            raise ValueError(f"{label} entries must lie in [0, 1], got ({a}, {b})")
    total = a + b
    if total == 1:
        return a, b
    if abs(total - 1) < SIMPLEX_RENORM:
        return a / total, b / total
    raise ValueError(f"{label} entries must sum to 1, got {total}")


@dataclass(frozen=True)
class PopulationState:
    """League strategy-share profile ``(x1, x2)`` on the 1-simplex.

    Inputs whose sum is within 1e-9 of one are renormalized; anything
    further off is rejected.
    """

    x1: Real
    x2: Real

    def __post_init__(self):
        a, b = _simplex_pair(self.x1, self.x2, "population state")
        object.__setattr__(self, "x1", a)
        object.__setattr__(self, "x2", b)

    @classmethod
    def from_x1(cls, x1: Real) -> "PopulationState":
        return cls(x1, 1 - x1)

    def share(self, s: Strategy) -> Real:
        return self.x1 if s is Strategy.T else self.x2


@dataclass(frozen=True)
class MixedStrategy:
    p_T: Real
    p_Th: Real

    def __post_init__(self):
        a, b = _simplex_pair(self.p_T, self.p_Th, "mixed strategy")
        object.__setattr__(self, "p_T", a)
        object.__setattr__(self, "p_Th", b)

    @classmethod
    def pure(cls, s: Strategy) -> "MixedStrategy":
        return cls(1, 0) if s is Strategy.T else cls(0, 1)

    @classmethod
    def from_state(cls, x: PopulationState) -> "MixedStrategy":
        return cls(x.x1, x.x2)

    def prob(self, s: Strategy) -> Real:
        return self.p_T if s is Strategy.T else self.p_Th

    def to_json(self) -> list:
        return [_plain(self.p_T), _plain(self.p_Th)]


def payoff_pure(m: PayoffMatrix, s: Strategy, s_opp: Strategy) -> Real:
    if s is Strategy.T:
        return m.alpha if s_opp is Strategy.T else m.beta
    return m.gamma if s_opp is Strategy.T else m.delta


def payoff_vs_population(m: PayoffMatrix, s: Strategy, x: PopulationState) -> Real:
    if s is Strategy.T:
        return m.alpha * x.x1 + m.beta * x.x2
    return m.gamma * x.x1 + m.delta * x.x2


def average_payoff(m: PayoffMatrix, x: PopulationState) -> Real:
    return (x.x1 * payoff_vs_population(m, Strategy.T, x)
            + x.x2 * payoff_vs_population(m, Strategy.Th, x))


def payoff_advantage(m: PayoffMatrix, x1: Real) -> Real:
    """pi(T, x) - pi(Th, x) as a function of x1 (linear, defined on all reals)."""
    return (m.alpha - m.gamma) * x1 + (m.beta - m.delta) * (1 - x1)


def replicator_field_2d(m: PayoffMatrix, x: PopulationState) -> tuple:
    avg = average_payoff(m, x)
    return (x.x1 * (payoff_vs_population(m, Strategy.T, x) - avg),
            x.x2 * (payoff_vs_population(m, Strategy.Th, x) - avg))


def replicator_field_reduced(m: PayoffMatrix, x1: Real) -> Real:
    """Right-hand side of the one-dimensional system in x1.

    Evaluated in factored form, ``x1 (x1 - 1) [delta + beta (x1 - 1) - delta x1 +
    (gamma - alpha) x1]``, for any real x1.
    """
    a, b, g, d = m.alpha, m.beta, m.gamma, m.delta
    return x1 * (-1 + x1) * (d + b * (-1 + x1) - d * x1 + (g - a) * x1)


def reduced_field_coefficients(m: PayoffMatrix) -> tuple:
    """Coefficients ``(c0, c1, c2, c3)`` of the cubic reduced field in x1."""
    b0 = m.delta - m.beta
    b1 = m.beta - m.delta + m.gamma - m.alpha
    return (0 * b0, -b0, b0 - b1, b1)


def reduced_field_derivative(m: PayoffMatrix, x1: Real) -> Real:
    _, c1, c2, c3 = reduced_field_coefficients(m)
    return c1 + 2 * c2 * x1 + 3 * c3 * x1 * x1


def mixed_payoff(m: PayoffMatrix, sigma: MixedStrategy, x: PopulationState) -> Real:
    total = 0
    for s in Strategy:
        for s_opp in Strategy:
            total += sigma.prob(s) * x.share(s_opp) * payoff_pure(m, s, s_opp)
    return total
