"""Experiment presets mirroring the figure-style runs, plus artifact output.

Front experiments (fig1*, fig2*) integrate the pinned front setup
(u = 1 left of the window, u = 0 right of it) on [-5, 5], beta = kappa = 1.
Oscillatory experiments (fig3* onward) run the positive oscillatory bump on a
periodic domain of length 10.  Display times are taken where the source
experiments state them and default to {0, T/4, T/2, T} elsewhere.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as nio
from .config import (
    ConfigError,
    DiagnosticsConfig,
    ExperimentConfig,
    FrontInitial,
    OscillatoryBump,
    config_to_dict,
)
from .lyapunov import (
    HypothesisViolationError,
    LyapunovConfig,
    WindowPositivityError,
    diagnose_hair_trigger,
    monitor_entropy_inequality,
    pattern_metrics,
)
from .model import DirichletExtension, Grid1D, Kernel, ModelParams, Periodic
from .solver import SolverConfig, run


def _front_config(alpha, mu, *, kernel_shape="uniform", diffusion=1.0,
                  t_end=10.0, dt=1e-4, integrator=None, n_cells=1000):
    if integrator is None:
        integrator = "imex" if diffusion > 0.0 else "rk4"
    grid = Grid1D(-5.0, 5.0, n_cells, DirichletExtension(1.0, 0.0))
    return ExperimentConfig(
        params=ModelParams(alpha=alpha, beta=1.0, mu=mu, kappa=1.0,
                           diffusion=diffusion),
        kernel=Kernel(kernel_shape),
        grid=grid,
        initial=FrontInitial(),
        solver=SolverConfig(t_end=t_end, dt_initial=dt, integrator=integrator,
                            snapshot_stride=200),
    )


def _bump_config(alpha, mu, *, beta=1.0, kappa=1.0, kernel_shape="uniform",
                 t_end=50.0, dt=1e-3, n_cells=1000, blowup_threshold=1e12):
    grid = Grid1D(-5.0, 5.0, n_cells, Periodic())
    diag = DiagnosticsConfig(
        lyapunov=LyapunovConfig(delta=0.5),
        compact_set=(-2.0, 2.0),
        tol=1e-2,
        horizon=t_end,
    )
    return ExperimentConfig(
        params=ModelParams(alpha=alpha, beta=beta, mu=mu, kappa=kappa,
                           diffusion=1.0),
        kernel=Kernel(kernel_shape),
        grid=grid,
        initial=OscillatoryBump(),
        solver=SolverConfig(t_end=t_end, dt_initial=dt, integrator="imex",
                            snapshot_stride=100,
                            blowup_threshold=blowup_threshold),
        diagnostics=diag,
    )


def _build_registry():
    reg: dict[str, tuple] = {}

    # pinned-front runs, uniform kernel: rows mu = 1, 10, 100
    reg["fig1a"] = (lambda: _front_config(1.0, 1.0, dt=1e-3), None)
    reg["fig1b"] = (lambda: _front_config(3000.0, 1.0, t_end=5.0, dt=2e-5), None)
    reg["fig1c"] = (lambda: _front_config(2.8, 1.0, diffusion=0.0), None)
    reg["fig1d"] = (lambda: _front_config(2.0, 10.0, dt=1e-3), None)
    reg["fig1e"] = (lambda: _front_config(6.0, 10.0), None)
    reg["fig1f"] = (lambda: _front_config(1.9, 10.0, diffusion=0.0), None)
    reg["fig1g"] = (lambda: _front_config(2.0, 100.0), None)
    reg["fig1h"] = (lambda: _front_config(2.56, 100.0), None)
    reg["fig1i"] = (lambda: _front_config(1.2, 100.0, diffusion=0.0), None)

    # pinned-front runs, logistic kernel
    reg["fig2a"] = (lambda: _front_config(4.22, 10.0, kernel_shape="logistic"), None)
    reg["fig2b"] = (lambda: _front_config(2.3, 100.0, kernel_shape="logistic"), None)
    reg["fig2c"] = (lambda: _front_config(3.0, 1.0, kernel_shape="logistic",
                                          diffusion=0.0, dt=1e-3), None)

    # oscillatory-bump runs, uniform kernel (fig3a is the initial profile)
    reg["fig3a"] = (lambda: _bump_config(1.5, 1.0, t_end=0.01), (0.0,))
    reg["fig3b"] = (lambda: _bump_config(1.5, 1.0), None)
    reg["fig3c"] = (lambda: _bump_config(1.5, 50.0, dt=5e-4), None)
    reg["fig3d"] = (lambda: _bump_config(1.5, 150.0, dt=2e-4), None)
    reg["fig3e"] = (lambda: _bump_config(2.0, 150.0, dt=2e-4), None)

    # oscillatory-bump runs, logistic kernel
    reg["fig4a"] = (lambda: _bump_config(1.5, 1.0, kernel_shape="logistic"), None)
    reg["fig4b"] = (lambda: _bump_config(1.5, 50.0, kernel_shape="logistic",
                                         dt=5e-4), None)
    reg["fig4c"] = (lambda: _bump_config(1.5, 150.0, kernel_shape="logistic",
                                         dt=2e-4), None)
    reg["fig4d"] = (lambda: _bump_config(3.8, 150.0, kernel_shape="logistic",
                                         dt=1e-4), None)

    # small-beta/kappa plateau runs (huge equilibria)
    reg["fig5"] = (lambda: _bump_config(1.1, 150.0, beta=0.1, kappa=0.2,
                                        t_end=100.0), (1.25, 100.0))
    # equilibrium kappa^(-1/beta) = 1e20 here, so the detector threshold is
    # lifted above any physically expected value
    reg["fig6"] = (lambda: _bump_config(1.09, 48.0, beta=0.1, kappa=0.01,
                                        t_end=100.0, blowup_threshold=1e24),
                   (1.295, 100.0))
    return reg


_REGISTRY = _build_registry()

PRESET_NAMES = tuple(sorted(_REGISTRY))


def preset_config(name: str) -> tuple[ExperimentConfig, tuple[float, ...]]:
    """Config and display times for a named preset."""
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    builder, times = _REGISTRY[name]
    cfg = builder()
    if times is None:
        t = cfg.solver.t_end
        times = (0.0, t / 4.0, t / 2.0, t)
    return cfg, times


def _nearest_snapshot(snapshots, t):
    times = np.array([s.time for s in snapshots])
    return snapshots[int(np.argmin(np.abs(times - t)))]


def _diagnostics_payload(cfg: ExperimentConfig, outcome) -> dict:
    d = cfg.diagnostics
    u_star = cfg.params.steady_state()
    horizon = d.horizon if d.horizon is not None else cfg.solver.t_end
    level = d.pattern_level if d.pattern_level is not None else u_star

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
            "sup_distance": [
                [float(t), float(v)] for t, v in zip(ht.times, ht.sup_distance)
            ],
        },
        "pattern": [],
    }
    for s in outcome.snapshots[-1:]:
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
        if rep.note:
            payload["lyapunov_note"] = rep.note
    except (HypothesisViolationError, WindowPositivityError, ValueError) as exc:
        payload["lyapunov_residuals"] = []
        payload["lyapunov_refused"] = str(exc)
    return payload


def run_preset(name: str, out_dir) -> dict:
    """Run a preset and write its artifacts; returns paths and the outcome."""
    cfg, display_times = preset_config(name)
    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)

    outcome = run(cfg.build_initial(), cfg.params, cfg.kernel, cfg.solver)

    nio.write_json(out / "config.json", config_to_dict(cfg))
    nio.write_snapshots_ndjson(out / "snapshots.ndjson", outcome.snapshots)
    nio.write_summary_csv(out / "summary.csv", outcome)

    profiles = {}
    for t in display_times:
        snap = _nearest_snapshot(outcome.snapshots, t)
        profiles[snap.time] = np.asarray(snap.values)
    final = outcome.snapshots[-1]
    profiles.setdefault(final.time, np.asarray(final.values))
    nio.write_profiles_csv(out / "profiles.csv", cfg.grid, profiles)

    payload = nio.status_payload(outcome)
    payload["clamped_count"] = outcome.clamped_count
    if cfg.diagnostics is not None and len(outcome.snapshots) >= 2:
        payload.update(_diagnostics_payload(cfg, outcome))
    nio.write_json(out / "diagnostics.json", payload)

    return {
        "config": cfg,
        "outcome": outcome,
        "dir": out,
        "paths": {
            "config": out / "config.json",
            "snapshots": out / "snapshots.ndjson",
            "summary": out / "summary.csv",
            "profiles": out / "profiles.csv",
            "diagnostics": out / "diagnostics.json",
        },
    }
