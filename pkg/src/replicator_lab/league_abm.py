"""Finite league of N teams revising strategies by pairwise proportional imitation.

A revising team (uniform) samples another team (uniform among the other
N - 1) and copies its strategy with probability ``max(0, pi_j - pi_i) / R``,
where payoffs are taken against the current league profile (revising team
included) and ``R`` is the payoff range of the matrix. Each team revises
at Poisson rate ``rate``; the mean-field drift is
``(rate / R) * x1 x2 (pi(T, x) - pi(Th, x))``, so the default
``rate = R`` reproduces the replicator equation in the same time units.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .game_core import PayoffMatrix, PopulationState, Strategy, payoff_vs_population


@dataclass(frozen=True)
class LeagueState:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("team counts must be non-negative")

    @property
    def N(self) -> int:
        return self.n1 + self.n2

    @classmethod
    def from_counts(cls, N: int, n1: int) -> "LeagueState":
        if N < 1:
            raise ValueError("league needs at least one team")
        if not 0 <= n1 <= N:
            raise ValueError(f"n1 must lie in [0, {N}], got {n1}")
        return cls(n1, N - n1)


class ProtocolKind(enum.Enum):
    PairwiseProportionalImitation = "PairwiseProportionalImitation"


@dataclass(frozen=True)
class RevisionProtocol:
    kind: ProtocolKind = ProtocolKind.PairwiseProportionalImitation
    # revisions per team per unit time; None means the payoff range
    rate: Optional[float] = None

    def __post_init__(self):
        if self.rate is not None and not self.rate > 0:
            raise ValueError("revision rate must be positive")

    def team_rate(self, m: PayoffMatrix) -> float:
        if self.rate is not None:
            return float(self.rate)
        return m.payoff_range or 1.0


def empirical_state(s: LeagueState) -> PopulationState:
    if s.N == 0:
        raise ValueError("empty league has no population state")
    return PopulationState(s.n1 / s.N, s.n2 / s.N)


def _advantage(m: PayoffMatrix, n1: int, N: int) -> float:
    x = PopulationState(n1 / N, (N - n1) / N)
    return float(payoff_vs_population(m, Strategy.T, x) - payoff_vs_population(m, Strategy.Th, x))


def step(s: LeagueState, m: PayoffMatrix, protocol: RevisionProtocol,
         rng: np.random.Generator) -> LeagueState:
    """One revision event, drawn team by team."""
    N = s.N
    if N < 2 or s.n1 == 0 or s.n2 == 0:
        return s
    i = rng.integers(N)
    j = rng.integers(N - 1)
    if j >= i:
        j += 1
    # teams [0, n1) play T
    si, sj = i < s.n1, j < s.n1
    if si == sj:
        return s
    R = m.payoff_range
    if R == 0:
        return s
    adv = _advantage(m, s.n1, N)
    gain = adv if sj else -adv
    if gain <= 0 or rng.random() >= gain / R:
        return s
    return LeagueState(s.n1 + 1, s.n2 - 1) if sj else LeagueState(s.n1 - 1, s.n2 + 1)


@dataclass(frozen=True)
class LeagueRun:
    """State after every strategy switch; ``times[0] = 0`` is the start."""

    N: int
    times: np.ndarray
    n1: np.ndarray
    horizon: float

    def __iter__(self) -> Iterator:
        for t, n1 in zip(self.times, self.n1):
            yield float(t), LeagueState(int(n1), self.N - int(n1))

    @property
    def final(self) -> LeagueState:
        return LeagueState(int(self.n1[-1]), self.N - int(self.n1[-1]))

    def x1_at(self, ts) -> np.ndarray:
        idx = np.searchsorted(self.times, np.asarray(ts, dtype=float), side="right") - 1
        return self.n1[idx] / self.N

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "n1", "n2", "x1"])
            for t, n in zip(self.times, self.n1):
                w.writerow([f"{t:.17g}", int(n), self.N - int(n), f"{n / self.N:.17g}"])


def run(s0: LeagueState, m: PayoffMatrix, protocol: RevisionProtocol, horizon: float,
        seed: int) -> LeagueRun:
    """Event-driven simulation to ``horizon``, deterministic in ``seed``.

    Only revisions that change the state are drawn: from state n1 a switch
    happens at total rate ``rate * n1 n2 |A| / ((N - 1) R)`` and its
    direction is fixed by the sign of the advantage A. This is the same
    process as repeating ``step`` at rate ``rate * N`` with the idle
    events thinned out.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    N = s0.N
    times = [0.0]
    counts = [s0.n1]
    R = m.payoff_range
    if N >= 2 and R > 0:
        rate = protocol.team_rate(m)
        n1, t = s0.n1, 0.0
        while 0 < n1 < N:
            adv = _advantage(m, n1, N)
            total = rate * n1 * (N - n1) * abs(adv) / ((N - 1) * R)
            if total <= 0:
                break
            t += rng.exponential(1.0 / total)
            if t > horizon:
                break
            n1 += 1 if adv > 0 else -1
            times.append(t)
            counts.append(n1)
    return LeagueRun(N, np.array(times), np.array(counts, dtype=np.int64), float(horizon))


def _run_task(args):
    s0, m, protocol, horizon, seed = args
    return run(s0, m, protocol, horizon, seed)


def run_replicas(s0: LeagueState, m: PayoffMatrix, protocol: RevisionProtocol,
                 horizon: float, seed: int, replicas: int) -> list:
    """Runs for seeds ``seed .. seed + replicas - 1``, in seed order."""
    from ._parallel import parallel_map

    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    return parallel_map(_run_task, [(s0, m, protocol, horizon, seed + k) for k in range(replicas)])


def batch_summary(runs: list, seed: int, checkpoints) -> dict:
    checkpoints = np.asarray(checkpoints, dtype=float)
    traj = np.array([r.x1_at(checkpoints) for r in runs])
    return {
        "N": runs[0].N,
        "horizon": runs[0].horizon,
        "replicas": len(runs),
        "runs": [{"seed": seed + k, "terminal_n1": r.final.n1, "terminal_n2": r.final.n2,
                  "terminal_x1": r.final.n1 / r.N, "switches": len(r.times) - 1}
                 for k, r in enumerate(runs)],
        "checkpoints": checkpoints.tolist(),
        "mean_x1": traj.mean(axis=0).tolist(),
    }


def write_summary(summary: dict, path) -> None:
    from ._serialize import dumps

    with open(path, "w") as fh:
        fh.write(dumps(summary))
        fh.write("\n")
