"""Monotone-function certificates, global verdicts and symmetric Nash equilibria.

Two monotone functions are used on the open interval S1 = {0 < x1 < 1}:

* ``Z1 = log(1 - x1)``, with ``dZ1/dt = x1 * B(x1)``
* ``Z2 = log(x1)``, with ``dZ2/dt = (x1 - 1) * B(x1)``

where ``B(x1) = delta + beta (x1 - 1) - delta x1 + (gamma - alpha) x1`` is
the linear bracket of the reduced field. If Z decreases along every orbit
in S1, omega-limits lie on the boundary point where Z does not tend to its
supremum: x1 = 1 for Z1 and x1 = 0 for Z2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .flow import omega_limit_estimate
from .game_core import (
    EPS_PAY,
    MixedStrategy,
    PayoffMatrix,
    PopulationState,
    Strategy,
    compare,
    mixed_payoff,
    payoff_advantage,
    payoff_vs_population,
    replicator_field_reduced,
)
from .local_analysis import (
    Classification,
    FixedPointKind,
    classify,
    fixed_points,
    is_degenerate,
)

SIGN_SAMPLES = 10_000
INDIFFERENCE_TOL = 1e-9
CONFIRM_STARTS = (0.01, 0.5, 0.99)
PROBE_OFFSET = 0.01


class CertificateId(enum.Enum):
    Z1_LogOneMinusX = "Z1_LogOneMinusX"
    Z2_LogX = "Z2_LogX"


class SignProof(enum.Enum):
    AnalyticNegative = "AnalyticNegative"
    SampledNegative = "SampledNegative"
    Inconclusive = "Inconclusive"


class Verdict(enum.Enum):
    GloballyStableAt0 = "GloballyStableAt0"
    GloballyStableAt1 = "GloballyStableAt1"
    InteriorAttractor = "InteriorAttractor"
    Bistable = "Bistable"
    DegenerateLine = "DegenerateLine"
    Undetermined = "Undetermined"


class NashSource(enum.Enum):
    StabilityTheorem = "StabilityTheorem"
    BestResponseOracle = "BestResponseOracle"
    Both = "Both"


def bracket(m: PayoffMatrix, x1):
    return m.delta + m.beta * (-1 + x1) - m.delta * x1 + (m.gamma - m.alpha) * x1


def z1(x1):
    return math.log1p(-x1) if x1 < 1 else -math.inf


def z1_dot(m: PayoffMatrix, x1):
    return x1 * bracket(m, x1)


def z2(x1):
    return math.log(x1) if x1 > 0 else -math.inf


def z2_dot(m: PayoffMatrix, x1):
    return (-1 + x1) * bracket(m, x1)


@dataclass(frozen=True)
class MonotoneCertificate:
    function_id: CertificateId
    condition_holds: bool
    derivative_sign_proof: SignProof
    # subset of {0, 1} containing every interior omega-limit
    omega_limit_conclusion: tuple = ()

    def __post_init__(self):
        if self.omega_limit_conclusion and not self.condition_holds:
            raise ValueError("an omega-limit conclusion requires the certificate condition")

    def to_json(self) -> dict:
        return {
            "function_id": self.function_id.value,
            "condition_holds": self.condition_holds,
            "derivative_sign_proof": self.derivative_sign_proof.value,
            "omega_limit_conclusion": [f"x1={z}" for z in self.omega_limit_conclusion],
        }


def _sign_proof(linear) -> SignProof:
    """Prove ``linear < 0`` on (0, 1): endpoint check first, then dense sampling."""
    if linear(0) < 0 and linear(1) < 0:
        return SignProof.AnalyticNegative
    xs = np.linspace(0.0, 1.0, SIGN_SAMPLES + 2)[1:-1]
    if np.all(linear(xs) < 0):
        return SignProof.SampledNegative
    return SignProof.Inconclusive


def _float_matrix(m):
    return PayoffMatrix(*(float(v) for v in m.astuple()))


def certificate_z1(m: PayoffMatrix, eps: float = EPS_PAY) -> MonotoneCertificate:
    holds = compare(m.beta, m.delta, eps) > 0 and compare(m.alpha, m.gamma, eps) >= 0
    if not holds:
        return MonotoneCertificate(CertificateId.Z1_LogOneMinusX, False, SignProof.Inconclusive)
    mf = _float_matrix(m)
    # dZ1/dt = x1 * B with x1 > 0 on S1
    proof = _sign_proof(lambda x: bracket(mf, x))
    omega = (1,) if proof is not SignProof.Inconclusive else ()
    return MonotoneCertificate(CertificateId.Z1_LogOneMinusX, True, proof, omega)


def certificate_z2(m: PayoffMatrix, eps: float = EPS_PAY) -> MonotoneCertificate:
    holds = compare(m.beta, m.delta, eps) == 0 and compare(m.alpha, m.gamma, eps) < 0
    if not holds:
        return MonotoneCertificate(CertificateId.Z2_LogX, False, SignProof.Inconclusive)
    mf = _float_matrix(m)
    # dZ2/dt = (x1 - 1) * B with x1 - 1 < 0 on S1
    proof = _sign_proof(lambda x: -bracket(mf, x))
    omega = (0,) if proof is not SignProof.Inconclusive else ()
    return MonotoneCertificate(CertificateId.Z2_LogX, True, proof, omega)


@dataclass(frozen=True)
class NashResult:
    strategy_pair: tuple
    source: NashSource
    certificate: Optional[CertificateId] = None
    degenerate: bool = False

    @property
    def sigma(self) -> MixedStrategy:
        return self.strategy_pair[0]

    def to_json(self) -> dict:
        return {
            "strategy_pair": [s.to_json() for s in self.strategy_pair],
            "source": self.source.value,
            "certificate": self.certificate.value if self.certificate else None,
            "degenerate": self.degenerate,
        }


def is_symmetric_nash(m: PayoffMatrix, sigma: MixedStrategy, eps: float = EPS_PAY) -> bool:
    """Neither pure deviation beats ``sigma`` against itself (ties allowed)."""
    x = PopulationState(sigma.p_T, sigma.p_Th)
    own = mixed_payoff(m, sigma, x)
    best = max(payoff_vs_population(m, s, x) for s in Strategy)
    return compare(own, best, eps) >= 0


def _pair(z) -> tuple:
    s = MixedStrategy(z, 1 - z)
    return (s, s)


def best_response_nash(m: PayoffMatrix, eps: float = EPS_PAY) -> list:
    """Symmetric Nash profiles enumerated from the payoff inequalities alone."""
    src = NashSource.BestResponseOracle
    if is_degenerate(m, eps):
        return [NashResult(_pair(1), src, degenerate=True),
                NashResult(_pair(0), src, degenerate=True)]
    out = []
    if compare(m.alpha, m.gamma, eps) >= 0:
        out.append(NashResult(_pair(1), src))
    for fp in fixed_points(m, eps):
        if fp.kind is FixedPointKind.P3_Interior:
            if abs(payoff_advantage(m, fp.location)) < INDIFFERENCE_TOL:
                out.append(NashResult(_pair(fp.location), src))
    if compare(m.delta, m.beta, eps) >= 0:
        out.append(NashResult(_pair(0), src))
    return out


@dataclass(frozen=True)
class StabilityJudgement:
    location: float
    stable: bool
    method: str
    certificate: Optional[CertificateId] = None


def _probe_starts(z) -> list:
    return [s for s in (z - PROBE_OFFSET, z + PROBE_OFFSET) if 0 < s < 1]


def asymptotic_stability(m: PayoffMatrix, eps: float = EPS_PAY,
                         certificates: Optional[list] = None) -> list:
    """Judge each fixed point in [0, 1]: derivative sign, then certificate, then integration."""
    if is_degenerate(m, eps):
        return []
    certs = certificates if certificates is not None else [certificate_z1(m, eps),
                                                           certificate_z2(m, eps)]
    out = []
    for fp in fixed_points(m, eps):
        if fp.classification is Classification.Sink:
            out.append(StabilityJudgement(fp.location, True, "derivative"))
            continue
        if fp.classification is Classification.Source:
            out.append(StabilityJudgement(fp.location, False, "derivative"))
            continue
        cert = next((c for c in certs if c.omega_limit_conclusion == (fp.location,)), None)
        if cert is not None:
            out.append(StabilityJudgement(fp.location, True, "certificate", cert.function_id))
            continue
        limits = [omega_limit_estimate(m, s, eps=eps) for s in _probe_starts(float(fp.location))]
        stable = bool(limits) and all(
            lim is not None and abs(lim - fp.location) <= 1e-6 for lim in limits)
        out.append(StabilityJudgement(fp.location, stable, "integration"))
    return out


def nash_from_stability(m: PayoffMatrix, eps: float = EPS_PAY,
                        judgements: Optional[list] = None) -> list:
    """Symmetric profiles [x*, x*] at every asymptotically stable fixed point."""
    if judgements is None:
        judgements = asymptotic_stability(m, eps)
    out = []
    for j in judgements:
        if not j.stable:
            continue
        pair = _pair(j.location)
        source = (NashSource.Both if is_symmetric_nash(m, pair[0], eps)
                  else NashSource.StabilityTheorem)
        out.append(NashResult(pair, source, j.certificate))
    return out


def phase_line_targets(m: PayoffMatrix, eps: float = EPS_PAY) -> list:
    """``(lo, hi, target)`` for each open interval between fixed points in [0, 1]."""
    locs = sorted(fp.location for fp in fixed_points(m, eps))
    out = []
    for lo, hi in zip(locs, locs[1:]):
        v = replicator_field_reduced(m, (lo + hi) / 2)
        target = hi if v > 0 else lo if v < 0 else None
        out.append((lo, hi, target))
    return out


def _expected_limit(targets: list, x0: float):
    for lo, hi, target in targets:
        if x0 == lo or x0 == hi:
            return x0
        if lo < x0 < hi:
            return target
    return x0


@dataclass
class StabilityReport:
    payoffs: PayoffMatrix
    verdict: Verdict
    attractors: list
    fixed_points: list
    certificates: list
    stability: list
    nash_from_stability: list
    best_response_nash: list
    numerical: list = field(default_factory=list)
    evidence: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "payoffs": self.payoffs.to_json(),
            "verdict": self.verdict.value,
            "attractors": [float(a) for a in self.attractors],
            "fixed_points": [r.to_json() for r in self.fixed_points],
            "certificates": [c.to_json() for c in self.certificates],
            "stability": [{"location": float(j.location), "asymptotically_stable": j.stable,
                           "method": j.method,
                           "certificate": j.certificate.value if j.certificate else None}
                          for j in self.stability],
            "nash": {
                "from_stability": [n.to_json() for n in self.nash_from_stability],
                "best_response": [n.to_json() for n in self.best_response_nash],
                "degenerate": any(n.degenerate for n in self.best_response_nash),
            },
            "numerical": self.numerical,
            "evidence": self.evidence,
        }


def global_verdict(m: PayoffMatrix, eps: float = EPS_PAY, confirm: bool = True) -> StabilityReport:
    """Aggregate certificates, phase-line analysis and numerical confirmation.

    With ``confirm`` the flow is integrated from 0.01, 0.5 and 0.99 to
    horizon 1e4 (or convergence); a numerical limit contradicting the
    analytic verdict downgrades it to ``Undetermined``.
    """
    fps = fixed_points(m, eps)
    records = [classify(m, fp, eps) for fp in fps]
    certs = [certificate_z1(m, eps), certificate_z2(m, eps)]
    judgements = asymptotic_stability(m, eps, certs)
    evidence = []
    for j in judgements:
        evidence.append({"claim": f"x1={float(j.location):.17g} asymptotically "
                                  f"{'stable' if j.stable else 'unstable'}",
                         "method": j.method,
                         "certificate": j.certificate.value if j.certificate else None})

    if is_degenerate(m, eps):
        verdict, attractors, targets = Verdict.DegenerateLine, [], None
        evidence.append({"claim": "field vanishes identically", "method": "algebraic"})
    else:
        targets = phase_line_targets(m, eps)
        limits = sorted({t for _, _, t in targets if t is not None}, key=float)
        attractors = limits
        if len(limits) == 1:
            z = limits[0]
            verdict = (Verdict.GloballyStableAt0 if z == 0 else
                       Verdict.GloballyStableAt1 if z == 1 else Verdict.InteriorAttractor)
        elif len(limits) == 2:
            verdict = Verdict.Bistable
        else:
            verdict = Verdict.Undetermined
        evidence.append({"claim": f"interior omega-limits {[float(z) for z in limits]}",
                         "method": "phase_line"})
        for c in certs:
            if c.omega_limit_conclusion:
                agrees = list(c.omega_limit_conclusion) == [float(z) for z in limits]
                evidence.append({"claim": f"omega-limits in {list(c.omega_limit_conclusion)}",
                                 "method": "certificate",
                                 "certificate": c.function_id.value,
                                 "agrees": agrees})
                if not agrees:
                    verdict = Verdict.Undetermined

    numerical = []
    if confirm:
        for x0 in CONFIRM_STARTS:
            lim = omega_limit_estimate(m, x0, eps=eps)
            expected = x0 if targets is None else _expected_limit(targets, x0)
            agrees = None if lim is None else abs(lim - float(expected)) <= 1e-6
            numerical.append({"x0": x0, "omega_limit": lim, "expected": float(expected),
                              "agrees": agrees})
            if agrees is False:
                verdict = Verdict.Undetermined
        evidence.append({"claim": "integration from interior starts",
                         "method": "integration",
                         "agrees": all(n["agrees"] is not False for n in numerical)})

    return StabilityReport(
        payoffs=m,
        verdict=verdict,
        attractors=attractors,
        fixed_points=records,
        certificates=certs,
        stability=judgements,
        nash_from_stability=nash_from_stability(m, eps, judgements),
        best_response_nash=best_response_nash(m, eps),
        numerical=numerical,
        evidence=evidence,
    )
