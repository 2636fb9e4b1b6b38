"""Command-line front-end: ``analyze``, ``integrate``, ``sweep``, ``simulate``.

Exit codes: 0 success, 2 configuration or validation error, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import flow, global_analysis as ga, league_abm as abm, local_analysis as la
from ._parallel import parallel_map, worker_count
from ._serialize import dumps, fmt_float
from .game_core import EPS_PAY, PARAM_NAMES, PayoffMatrix

SUMMARY_CHECKPOINTS = 20


class ConfigError(Exception):
    pass


def _number(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{what} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{what} must be finite")
    return v


@dataclass(frozen=True)
class AnalysisConfig:
    payoffs: PayoffMatrix
    tolerance: float = EPS_PAY
    protocol_rate: Optional[float] = None

    @classmethod
    def from_json(cls, doc) -> "AnalysisConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - {"payoffs", "tolerance", "protocol"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        raw = doc.get("payoffs")
        if not isinstance(raw, dict):
            raise ConfigError("config needs a 'payoffs' object with alpha, beta, gamma, delta")
        for k in PARAM_NAMES:
            if k in raw:
                _number(raw[k], f"payoffs.{k}")
        try:
            payoffs = PayoffMatrix.from_json(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        tol = _number(doc.get("tolerance", EPS_PAY), "tolerance")
        if not tol > 0:
            raise ConfigError("tolerance must be positive")
        rate = None
        protocol = doc.get("protocol")
        if protocol is not None:
            if not isinstance(protocol, dict) or set(protocol) - {"rate"}:
                raise ConfigError("protocol must be an object with an optional 'rate'")
            if protocol.get("rate") is not None:
                rate = _number(protocol["rate"], "protocol.rate")
                if not rate > 0:
                    raise ConfigError("protocol.rate must be positive")
        return cls(payoffs, tol, rate)

    def to_json(self) -> dict:
        doc = {"payoffs": self.payoffs.to_json(), "tolerance": self.tolerance}
        if self.protocol_rate is not None:
            doc["protocol"] = {"rate": self.protocol_rate}
        return doc

    @classmethod
    def load(cls, path) -> "AnalysisConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config JSON: {exc}") from None
        return cls.from_json(doc)


def analysis_report(cfg: AnalysisConfig) -> dict:
    m, eps = cfg.payoffs, cfg.tolerance
    report = ga.global_verdict(m, eps).to_json()
    feas = la.feasibility_check(m, eps)
    fps = []
    for fp in la.fixed_points(m, eps):
        entry = {"location": float(fp.location), "kind": fp.kind.value}
        if fp.span is not None:
            entry["span"] = list(fp.span)
        fps.append(entry)
    nash = report["nash"]
    if nash["degenerate"]:
        nash["degenerate_family"] = "every symmetric profile [s, s] with s in [0, 1]"
    return {
        "payoffs": m.to_json(),
        "tolerance": eps,
        "fixed_points": fps,
        "classifications": report["fixed_points"],
        "feasibility": feas.to_json(),
        "certificates": report["certificates"],
        "global_verdict": {
            "verdict": report["verdict"],
            "attractors": report["attractors"],
            "stability": report["stability"],
            "numerical": report["numerical"],
        },
        "nash": nash,
        "evidence": report["evidence"],
    }


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_analyze(args) -> int:
    cfg = AnalysisConfig.load(args.config)
    _write_text(dumps(analysis_report(cfg)) + "\n", args.out)
    return 0


def cmd_integrate(args) -> int:
    cfg = AnalysisConfig.load(args.config)
    if not 0 <= args.x0 <= 1:
        raise ConfigError(f"x0 must lie in [0, 1], got {args.x0}")
    if not args.horizon > 0:
        raise ConfigError("horizon must be positive")
    if not args.tol > 0:
        raise ConfigError("tol must be positive")
    if not args.max_step > 0:
        raise ConfigError("max-step must be positive")
    traj = flow.integrate(cfg.payoffs, args.x0, args.horizon, args.tol,
                          eps=cfg.tolerance, max_step=args.max_step)
    traj.to_csv(args.out)
    summary = {"terminal_t": float(traj.times[-1]), "terminal_x1": traj.final,
               "terminal_reason": traj.terminal_reason.value, "samples": len(traj.times)}
    sys.stdout.write(dumps(summary, indent=0).replace(",\n", ", ").replace("\n", "") + "\n")
    return 0


def _sweep_row(args):
    m, param, value, eps, bifurcation = args
    p3 = la.interior_location(m, eps)
    if la.is_degenerate(m, eps):
        p3 = None
    verdict = ga.global_verdict(m, eps).verdict.value
    return {
        "param": param,
        "value": value,
        "p3_location": p3,
        "p3_in_simplex": p3 is not None and 0 <= p3 <= 1,
        "classification": la.p3_classification(m, eps).value,
        "verdict": verdict,
        "bifurcation": bifurcation,
    }


def sweep_rows(cfg: AnalysisConfig, param: str, lo: float, hi: float, steps: int) -> list:
    m, eps = cfg.payoffs, cfg.tolerance
    loci = la.bifurcation_scan(m, param, (lo, hi), steps, eps)
    tasks = [(m.replace(**{param: float(v)}), param, float(v), eps, False)
             for v in np.linspace(lo, hi, steps)]
    tasks += [(m.replace(**{param: locus.crossing_parameter}), param,
               float(locus.crossing_parameter), eps, True) for locus in loci]
    tasks.sort(key=lambda t: (t[2], t[4]))
    return parallel_map(_sweep_row, tasks)


SWEEP_COLUMNS = ("param", "value", "p3_location", "p3_in_simplex", "classification",
                 "verdict", "bifurcation")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def cmd_sweep(args) -> int:
    cfg = AnalysisConfig.load(args.config)
    if not args.lo < args.hi:
        raise ConfigError("sweep range must satisfy lo < hi")
    if args.steps < 2:
        raise ConfigError("steps must be at least 2")
    rows = sweep_rows(cfg, args.param, args.lo, args.hi, args.steps)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_cell(row[c]) for c in SWEEP_COLUMNS])
    return 0


def cmd_simulate(args) -> int:
    cfg = AnalysisConfig.load(args.config)
    if args.teams < 1:
        raise ConfigError("teams must be at least 1")
    if not 0 <= args.n1 <= args.teams:
        raise ConfigError(f"n1 must lie in [0, {args.teams}]")
    if args.replicas < 1:
        raise ConfigError("replicas must be at least 1")
    if not args.horizon > 0:
        raise ConfigError("horizon must be positive")
    protocol = abm.RevisionProtocol(rate=cfg.protocol_rate)
    s0 = abm.LeagueState.from_counts(args.teams, args.n1)
    runs = abm.run_replicas(s0, cfg.payoffs, protocol, args.horizon, args.seed, args.replicas)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, r in enumerate(runs):
        r.to_csv(out / f"run_{args.seed + k}.csv")
    checkpoints = np.linspace(0, args.horizon, SUMMARY_CHECKPOINTS + 1)[1:]
    summary = abm.batch_summary(runs, args.seed, checkpoints)
    summary["payoffs"] = cfg.payoffs.to_json()
    abm.write_summary(summary, out / "summary.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="replicator-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="fixed points, stability, certificates and Nash report")
    a.add_argument("--config", required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    i = sub.add_parser("integrate", help="integrate the reduced flow to CSV")
    i.add_argument("--config", required=True)
    i.add_argument("--x0", type=float, required=True)
    i.add_argument("--horizon", type=float, required=True)
    i.add_argument("--tol", type=float, default=1e-9)
    i.add_argument("--max-step", type=float, default=flow.MAX_STEP)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_integrate)

    s = sub.add_parser("sweep", help="one-parameter sweep with exact bifurcation loci")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True, choices=PARAM_NAMES)
    s.add_argument("--lo", type=float, required=True)
    s.add_argument("--hi", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="finite-league imitation runs")
    m.add_argument("--config", required=True)
    m.add_argument("--teams", type=int, required=True)
    m.add_argument("--n1", type=int, required=True)
    m.add_argument("--horizon", type=float, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--replicas", type=int, default=1)
    m.add_argument("--out-dir", required=True)
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        try:
            worker_count()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
