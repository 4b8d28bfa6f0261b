"""Command-line entry points.

Subcommands: simulate, bounds, diagnose, sweep, kinetic-limit, preset.
Exit codes: 0 success, 2 blow-up detected (simulate), 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as nio
from .bounds import BoundInputs, sup_bound
from .config import ConfigError, load_config
from .kinetic import kinetic_limit_study
from .lyapunov import (
    HypothesisViolationError,
    WindowPositivityError,
    diagnose_hair_trigger,
    monitor_entropy_inequality,
    pattern_metrics,
)
from .presets import PRESET_NAMES, run_preset
from .solver import BlowUpDetected, CompletedBounded, RunOutcome, run
from .sweep import bisect, scan


def _write_run_artifacts(out_dir: Path, cfg, outcome: RunOutcome) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    from .config import config_to_dict

    nio.write_json(out_dir / "config.json", config_to_dict(cfg))
    nio.write_snapshots_ndjson(out_dir / "snapshots.ndjson", outcome.snapshots)
    nio.write_summary_csv(out_dir / "summary.csv", outcome)
    payload = nio.status_payload(outcome)
    payload["clamped_count"] = outcome.clamped_count
    nio.write_json(out_dir / "status.json", payload)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    outcome = run(cfg.build_initial(), cfg.params, cfg.kernel, cfg.solver)
    _write_run_artifacts(Path(args.out), cfg, outcome)
    payload = nio.status_payload(outcome)
    print(json.dumps(payload))
    if isinstance(outcome.status, CompletedBounded):
        return 0
    return 2


def cmd_bounds(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    from .config import params_from_dict

    params, kernel = params_from_dict(raw)
    inputs = BoundInputs(
        dim=int(raw.get("N", 1)),
        alpha=params.alpha,
        beta=params.beta,
        kappa=params.kappa,
        floor_radius=kernel.scaled_floor_radius,
        floor_value=kernel.scaled_floor_value,
        margin=float(raw.get("K", 2.0)),
        u0_sup=float(raw.get("u0_sup", 1.0)),
        sobolev_const=float(raw.get("G", 1.0)),
    )
    anchor = raw.get("m")
    report = sup_bound(inputs, None if anchor is None else int(anchor))
    payload = {
        "alpha_star": report.alpha_star,
        "s_star": None if report.s_star == float("inf") else report.s_star,
        "prefactor": report.prefactor,
        "exponent": report.exponent,
        "sup_bound": report.sup_bound,
        "mu_star": report.mu_star,
        "mu_star_note": report.mu_star_note,
        "inputs": {
            "N": inputs.dim, "alpha": inputs.alpha, "beta": inputs.beta,
            "kappa": inputs.kappa, "floor_radius": inputs.floor_radius,
            "floor_value": inputs.floor_value, "K": inputs.margin,
            "u0_sup": inputs.u0_sup, "G": inputs.sobolev_const,
        },
    }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_diagnose(args) -> int:
    cfg = load_config(args.config)
    if cfg.diagnostics is None:
        raise ConfigError("config has no diagnostics section")
    snaps = nio.read_snapshots_ndjson(args.snapshots, cfg.grid)
    if len(snaps) < 2:
        raise ConfigError("need at least two snapshots to diagnose")
    outcome = RunOutcome(
        status=CompletedBounded(),
        snapshots=tuple(snaps),
        history_t=np.array([s.time for s in snaps]),
        history_sup=np.array([s.sup_abs() for s in snaps]),
        history_inf=np.array([float(np.min(s.values)) for s in snaps]),
        history_dt=np.zeros(len(snaps)),
    )
    d = cfg.diagnostics
    horizon = d.horizon if d.horizon is not None else snaps[-1].time
    level = d.pattern_level if d.pattern_level is not None \
        else cfg.params.steady_state()
    ht = diagnose_hair_trigger(outcome, cfg.params, d.compact_set, d.tol,
                               horizon, d.lyapunov)
    payload: dict = {
        "hair_trigger": {
            "compact_set": list(ht.compact_set),
            "converged": ht.converged,
            "convergence_time": ht.convergence_time,
            "hypothesis_a": ht.hypothesis_a,
            "hypothesis_b_sup": ht.hypothesis_b_sup,
            "hypothesis_b_admissible": ht.hypothesis_b_admissible,
        },
        "pattern": [],
    }
    for s in snaps[-1:]:
        pm = pattern_metrics(s, level)
        payload["pattern"].append({
            "t": s.time,
            "crossing_count": pm.crossing_count,
            "max_amplitude": pm.max_amplitude,
            "dominant_wavelength": pm.dominant_wavelength,
        })
    try:
        rep = monitor_entropy_inequality(outcome, cfg.params, cfg.kernel,
                                         d.lyapunov)
        payload["lyapunov_residuals"] = [
            {"t_start": p.t_start, "t_end": p.t_end,
             "max_residual": p.max_residual, "tol": p.tol}
            for p in rep.pairs
        ]
        payload["lyapunov_passed"] = rep.passed
        payload["delta_admissible"] = rep.delta_admissible
    except (HypothesisViolationError, WindowPositivityError, ValueError) as exc:
        payload["lyapunov_residuals"] = []
        payload["lyapunov_refused"] = str(exc)
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.sweep
    param = args.param or (spec.param if spec else None)
    if param is None:
        raise ConfigError("no sweep parameter given (flag --param or config)")
    mode = args.mode or (spec.mode if spec else "bisect")
    if mode == "scan":
        if args.values:
            values = [float(v) for v in args.values.split(",")]
        elif spec and spec.values:
            values = list(spec.values)
        else:
            raise ConfigError("scan mode needs --values or config values")
        result = scan(cfg, param, values)
        payload = {"mode": "scan", "param": param,
                   "table": [[v, s] for v, s in result.table]}
    else:
        lo = args.lo if args.lo is not None else (spec.lo if spec else None)
        hi = args.hi if args.hi is not None else (spec.hi if spec else None)
        if lo is None or hi is None:
            raise ConfigError("bisect mode needs --lo and --hi (or config)")
        tol = args.tol if args.tol is not None else (spec.tol if spec else 0.05)
        result = bisect(cfg, param, float(lo), float(hi), float(tol))
        payload = {
            "mode": "bisect", "param": param, "found": result.found,
            "threshold": result.threshold, "last_bounded": result.last_bounded,
            "note": result.note, "runs": [[v, s] for v, s in result.runs],
        }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_kinetic_limit(args) -> int:
    cfg = load_config(args.config)
    if not cfg.grid.is_periodic:
        raise ConfigError("kinetic limit study needs a periodic grid")
    eps_values = tuple(float(v) for v in args.eps.split(","))
    density0 = np.asarray(cfg.build_initial().values)
    rows = kinetic_limit_study(cfg.grid, density0, cfg.params, cfg.kernel,
                               cfg.kinetic_speed, cfg.solver.t_end, eps_values)
    lines = ["eps,linf_error,order"]
    for r in rows:
        order = "" if r.order is None else nio.fmt(r.order)
        lines.append(f"{nio.fmt(r.eps)},{nio.fmt(r.linf_error)},{order}")
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_preset(args) -> int:
    result = run_preset(args.name, args.out)
    payload = nio.status_payload(result["outcome"])
    payload["dir"] = str(result["dir"])
    print(json.dumps(payload))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlfkpp",
                                description="nonlocal Fisher-KPP experiments")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("bounds", help="explicit sup-norm bound constants")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("diagnose", help="post-process solver snapshots")
    s.add_argument("--snapshots", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("sweep", help="parameter scan or blow-up bisection")
    s.add_argument("--config", required=True)
    s.add_argument("--param")
    s.add_argument("--mode", choices=("scan", "bisect"))
    s.add_argument("--values", help="comma-separated values (scan)")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("kinetic-limit", help="two-speed diffusion-limit errors")
    s.add_argument("--config", required=True)
    s.add_argument("--eps", required=True, help="comma-separated eps values")
    s.add_argument("--out")
    s.set_defaults(func=cmd_kinetic_limit)

    s = sub.add_parser("preset", help="run a named figure-style preset")
    s.add_argument("name", choices=PRESET_NAMES)
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_preset)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
