"""Evolutionary dynamics of symmetric two-strategy games.

Replicator fixed points and their stability, monotone-function global
certificates, symmetric Nash equilibria, a numerical flow used as an
oracle, and a finite-league imitation simulator.
"""

from .game_core import (
    EPS_PAY,
    MixedStrategy,
    PayoffMatrix,
    PopulationState,
    Strategy,
    average_payoff,
    mixed_payoff,
    payoff_pure,
    payoff_vs_population,
    replicator_field_2d,
    replicator_field_reduced,
)
from .local_analysis import (
    Classification,
    FixedPoint,
    FixedPointKind,
    bifurcation_scan,
    classify,
    feasibility_check,
    fixed_points,
    linearize_at,
)
from .global_analysis import (
    Verdict,
    best_response_nash,
    certificate_z1,
    certificate_z2,
    global_verdict,
    nash_from_stability,
)
from .flow import basin_sweep, integrate, omega_limit_estimate
from .league_abm import LeagueState, RevisionProtocol, empirical_state, run, step

__version__ = "0.1.0"
