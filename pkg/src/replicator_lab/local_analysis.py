"""Fixed points, linearization, classification and bifurcation loci of the
reduced replicator equation.

The cubic field factors as ``x1 (1 - x1) A(x1)`` where ``A`` is the payoff
advantage of ``T`` over ``Th``; every result below follows from that form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .game_core import (
    EPS_PAY,
    PARAM_NAMES,
    PayoffMatrix,
    compare,
    is_zero,
    reduced_field_derivative,
    replicator_field_reduced,
)

FIELD_RESIDUAL_TOL = 1e-9


class FixedPointKind(enum.Enum):
    P1_AllThree = "P1_AllThree"
    P2_AllTwo = "P2_AllTwo"
    P3_Interior = "P3_Interior"
    P3_CoincidesP1 = "P3_CoincidesP1"
    P3_CoincidesP2 = "P3_CoincidesP2"
    DegenerateLine = "DegenerateLine"
    # only emitted with include_exterior=True
    P3_Exterior = "P3_Exterior"


class Classification(enum.Enum):
    Sink = "Sink"
    Source = "Source"
    NonHyperbolic = "NonHyperbolic"
    Unclassified = "Unclassified"


@dataclass(frozen=True)
class FixedPoint:
    location: float
    kind: FixedPointKind
    classification: Classification
    derivative: float
    # closed interval of fixed points, only for DegenerateLine
    span: Optional[tuple] = None

    @property
    def in_simplex(self) -> bool:
        return self.kind is not FixedPointKind.P3_Exterior


def classify_derivative(deriv, eps: float = EPS_PAY) -> Classification:
    if deriv < -eps:
        return Classification.Sink
    if deriv > eps:
        return Classification.Source
    return Classification.NonHyperbolic


def denominator(m: PayoffMatrix):
    return -m.alpha + m.beta - m.delta + m.gamma


def interior_location(m: PayoffMatrix, eps: float = EPS_PAY):
    """The P3 formula value, or None when the denominator is degenerate."""
    d = denominator(m)
    if is_zero(d, eps):
        return None
    return (m.beta - m.delta) / d


def is_degenerate(m: PayoffMatrix, eps: float = EPS_PAY) -> bool:
    """True when the field vanishes identically (beta == delta and gamma == alpha)."""
    return compare(m.beta, m.delta, eps) == 0 and compare(m.gamma, m.alpha, eps) == 0


def linearize_at(m: PayoffMatrix, x_star) -> float:
    """Analytic derivative of the reduced field at ``x_star``."""
    return reduced_field_derivative(m, x_star)


def _point(m, loc, kind, eps):
    deriv = linearize_at(m, loc)
    return FixedPoint(loc, kind, classify_derivative(deriv, eps), deriv)


def fixed_points(m: PayoffMatrix, eps: float = EPS_PAY,
                 include_exterior: bool = False) -> list:
    """All fixed points of the reduced field on [0, 1], ordered by location.

    P3 is merged into P1/P2 when beta == delta / alpha == gamma (under
    ``eps``). A constant-advantage-zero game returns one DegenerateLine
    entry. With ``include_exterior`` a P3 lying outside [0, 1] is appended
    as ``P3_Exterior``.
    """
    if is_degenerate(m, eps):
        return [FixedPoint(0.0, FixedPointKind.DegenerateLine,
                           Classification.Unclassified, 0.0, span=(0.0, 1.0))]

    kind0, kind1 = FixedPointKind.P1_AllThree, FixedPointKind.P2_AllTwo
    points = []
    p3 = interior_location(m, eps)
    exterior = None
    if p3 is not None:
        if compare(m.beta, m.delta, eps) == 0:
            kind0 = FixedPointKind.P3_CoincidesP1
        elif compare(m.gamma, m.alpha, eps) == 0:
            kind1 = FixedPointKind.P3_CoincidesP2
        elif 0 < p3 < 1:
            points.append(_point(m, p3, FixedPointKind.P3_Interior, eps))
        else:
            exterior = _point(m, p3, FixedPointKind.P3_Exterior, eps)

    points.insert(0, _point(m, 0 * m.alpha, kind0, eps))
    points.append(_point(m, 0 * m.alpha + 1, kind1, eps))
    if include_exterior and exterior is not None:
        points.append(exterior)
    return points


def simplex_points(points: list) -> list:
    return [p for p in points if p.in_simplex]


@dataclass(frozen=True)
class Feasibility:
    p3_in_simplex: bool
    paper_condition_holds: bool

    @property
    def disagreement(self) -> bool:
        return self.p3_in_simplex != self.paper_condition_holds

    def to_json(self) -> dict:
        return {"p3_in_simplex": self.p3_in_simplex,
                "paper_condition_holds": self.paper_condition_holds,
                "disagreement": self.disagreement}


def feasibility_check(m: PayoffMatrix, eps: float = EPS_PAY) -> Feasibility:
    """Direct interval test of P3 next to the payoff-condition union.

    The union is evaluated term by term:
    [d<b and g<=a] or [d=b and (g<a or g>a)] or [d>b and g<=a].
    """
    p3 = interior_location(m, eps)
    in_simplex = p3 is not None and 0 <= p3 <= 1

    db = compare(m.delta, m.beta, eps)
    ga = compare(m.gamma, m.alpha, eps)
    union = ((db < 0 and ga <= 0)
             or (db == 0 and ga != 0)
             or (db > 0 and ga <= 0))
    return Feasibility(in_simplex, union)


def paper_conditions(m: PayoffMatrix, eps: float = EPS_PAY) -> dict:
    """Payoff-inequality sink/source/saddle flags for P3."""
    db = compare(m.delta, m.beta, eps)
    ga = compare(m.gamma, m.alpha, eps)
    shifted = compare(m.gamma, m.alpha - m.beta + m.delta, eps)
    quotient = None
    if db != 0:
        quotient = (m.alpha * m.delta - m.alpha * m.beta) / (m.delta - m.beta)
    saddle = ((db == 0 and shifted != 0)
              or (db != 0 and compare(m.gamma, quotient, eps) == 0))
    return {
        "sink": db < 0 and ga > 0,
        "source": db > 0 and ga < 0,
        "saddle": saddle,
    }


@dataclass(frozen=True)
class ClassificationRecord:
    location: float
    kind: FixedPointKind
    classification: Classification
    paper_label: Optional[str]
    derivative: float
    conditions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "location": float(self.location),
            "kind": self.kind.value,
            "classification": self.classification.value,
            "paper_label": self.paper_label,
            "derivative": float(self.derivative),
            "conditions": self.conditions,
        }


_P3_KINDS = (FixedPointKind.P3_Interior, FixedPointKind.P3_CoincidesP1,
             FixedPointKind.P3_CoincidesP2, FixedPointKind.P3_Exterior)


def classify(m: PayoffMatrix, fp: FixedPoint, eps: float = EPS_PAY) -> ClassificationRecord:
    """Derivative-sign classification of ``fp`` alongside the payoff-condition labels.

    A one-dimensional field has no saddles; wherever the saddle
    conditions hold the point is reported ``NonHyperbolic`` with
    ``paper_label="Saddle"``.
    """
    if fp.kind is FixedPointKind.DegenerateLine:
        if not is_degenerate(m, eps):
            raise ValueError("DegenerateLine fixed point does not belong to this matrix")
        return ClassificationRecord(fp.location, fp.kind, Classification.Unclassified,
                                    None, 0.0, {"degenerate": True})

    residual = replicator_field_reduced(m, fp.location)
    if abs(residual) > FIELD_RESIDUAL_TOL:
        raise ValueError(f"field does not vanish at {fp.location} (residual {residual:.3g})")
    expected = {
        FixedPointKind.P1_AllThree: 0, FixedPointKind.P3_CoincidesP1: 0,
        FixedPointKind.P2_AllTwo: 1, FixedPointKind.P3_CoincidesP2: 1,
    }.get(fp.kind)
    if expected is not None and fp.location != expected:
        raise ValueError(f"{fp.kind.value} must sit at {expected}, got {fp.location}")
    if fp.kind in (FixedPointKind.P3_Interior, FixedPointKind.P3_Exterior):
        p3 = interior_location(m, eps)
        if p3 is None or abs(p3 - fp.location) > 1e-12:
            raise ValueError("P3 location inconsistent with the payoff matrix")

    deriv = linearize_at(m, fp.location)
    cls = classify_derivative(deriv, eps)
    conds = {}
    label = None
    if fp.kind in _P3_KINDS:
        conds = paper_conditions(m, eps)
        if conds["sink"]:
            label = "Sink"
        elif conds["source"]:
            label = "Source"
        elif conds["saddle"]:
            label = "Saddle"
    if fp.location == 0:
        # linear coefficient near x1 = 0 and the endpoint stability rule
        conds["linear_coefficient"] = float(m.beta - m.delta)
        conds["endpoint_stable"] = compare(m.beta, m.delta, eps) < 0
    elif fp.location == 1:
        conds["linear_coefficient"] = float(m.gamma - m.alpha)
        conds["endpoint_stable"] = compare(m.gamma, m.alpha, eps) < 0
    return ClassificationRecord(fp.location, fp.kind, cls, label, deriv, conds)


class BifurcationKind(enum.Enum):
    BetaEqualsDelta = "BetaEqualsDelta"
    GammaEqualsAlpha = "GammaEqualsAlpha"


@dataclass(frozen=True)
class BifurcationLocus:
    kind: BifurcationKind
    parameter: str
    crossing_parameter: float
    side_classifications: tuple
    at_classification: Classification

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "parameter": self.parameter,
            "crossing_parameter": float(self.crossing_parameter),
            "side_classifications": [c.value for c in self.side_classifications],
            "at_classification": self.at_classification.value,
        }


_PARTNER = {
    "alpha": ("gamma", BifurcationKind.GammaEqualsAlpha),
    "gamma": ("alpha", BifurcationKind.GammaEqualsAlpha),
    "beta": ("delta", BifurcationKind.BetaEqualsDelta),
    "delta": ("beta", BifurcationKind.BetaEqualsDelta),
}


def p3_classification(m: PayoffMatrix, eps: float = EPS_PAY) -> Classification:
    """Derivative-sign class of the P3 branch wherever it sits on the real line."""
    if is_degenerate(m, eps):
        return Classification.Unclassified
    p3 = interior_location(m, eps)
    if p3 is None:
        return Classification.Unclassified
    return classify_derivative(linearize_at(m, p3), eps)


def crossing_value(m: PayoffMatrix, varying: str):
    """Value of ``varying`` at which its bifurcation line is crossed."""
    partner, _ = _PARTNER[varying]
    return getattr(m, partner)


def quotient_crossing_value(m: PayoffMatrix, varying: str):
    """Crossing located through the quotient form gamma = (a d - a b)/(d - b).

    Only defined for alpha/gamma sweeps with delta != beta; the condition is
    solved for the varied parameter.
    """
    if varying not in ("alpha", "gamma"):
        raise ValueError("quotient form only constrains alpha or gamma")
    den = m.delta - m.beta
    if den == 0:
        return None
    if varying == "gamma":
        return (m.alpha * m.delta - m.alpha * m.beta) / den
    # gamma (d - b) = alpha (d - b), linear in alpha
    return m.gamma * den / den


def bifurcation_scan(m_base: PayoffMatrix, varying: str, range_: tuple, steps: int,
                     eps: float = EPS_PAY) -> list:
    """Crossings of beta = delta / gamma = alpha met while sweeping one parameter.

    The crossing is solved in closed form; ``steps`` only sets the offset
    (one grid spacing) at which the two sides are classified.
    """
    if varying not in _PARTNER:
        raise ValueError(f"unknown parameter {varying!r}; expected one of {PARAM_NAMES}")
    lo, hi = range_
    if not lo < hi:
        raise ValueError("range must satisfy lo < hi")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    _, kind = _PARTNER[varying]
    value = crossing_value(m_base, varying)
    if not lo <= value <= hi:
        return []
    h = (hi - lo) / (steps - 1)
    before = p3_classification(m_base.replace(**{varying: value - h}), eps)
    after = p3_classification(m_base.replace(**{varying: value + h}), eps)
    m_at = m_base.replace(**{varying: value})
    if is_degenerate(m_at, eps):
        at = Classification.Unclassified
    else:
        # collided point: x1 = 0 on beta = delta, x1 = 1 on gamma = alpha
        z = 0 if kind is BifurcationKind.BetaEqualsDelta else 1
        at = classify_derivative(linearize_at(m_at, z), eps)
    return [BifurcationLocus(kind, varying, value, (before, after), at)]
