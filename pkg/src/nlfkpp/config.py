"""JSON-facing experiment configuration.

Parameter schema:

    {"alpha": ..., "beta": ..., "mu": ..., "kappa": ..., "diffusion": ...,
     "kernel": {"shape": "uniform|logistic|gaussian|tabulated",
                "sigma": ..., "samples": [[x, y], ...]?,
                "floor_radius": ...?, "floor_value": ...?}}

plus grid / initial / solver / diagnostics / sweep sections for full
experiment configs (see README).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .lyapunov import LyapunovConfig
from .model import (
    DirichletExtension,
    Field,
    Grid1D,
    Kernel,
    ModelParams,
    Periodic,
    front_initial_condition,
)
from .solver import SolverConfig


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class FrontInitial:
    """Piecewise front profile connecting 1 (left) to 0 (right)."""


@dataclass(frozen=True)
class OscillatoryBump:
    """floor + amplitude * (1 + cos(wavenumber * x)) / 2; strictly positive."""

    amplitude: float = 0.2
    wavenumber: float = 3.0
    floor: float = 0.01


@dataclass(frozen=True)
class ConstantTimesNoise:
    """level * uniform(0, 1) noise from a seeded generator."""

    level: float
    seed: int


@dataclass(frozen=True)
class CustomInitial:
    """Nodal values loaded from a JSON file holding one array."""

    file: str


InitialSpec = FrontInitial | OscillatoryBump | ConstantTimesNoise | CustomInitial


def build_initial(spec: InitialSpec, grid: Grid1D) -> Field:
    if isinstance(spec, FrontInitial):
        return front_initial_condition(grid)
    x = grid.nodes()
    if isinstance(spec, OscillatoryBump):
        vals = spec.floor + spec.amplitude * (1.0 + np.cos(spec.wavenumber * x)) / 2.0
        return Field(grid, vals, 0.0)
    if isinstance(spec, ConstantTimesNoise):
        rng = np.random.default_rng(spec.seed)
        return Field(grid, spec.level * rng.random(grid.n_nodes), 0.0)
    if isinstance(spec, CustomInitial):
        vals = np.asarray(json.loads(Path(spec.file).read_text()), dtype=float)
        return Field(grid, vals, 0.0)
    raise ConfigError(f"unknown initial spec {spec!r}")


@dataclass(frozen=True)
class DiagnosticsConfig:
    lyapunov: LyapunovConfig
    compact_set: tuple[float, float] = (-2.0, 2.0)
    tol: float = 1e-2
    horizon: float | None = None      # defaults to the run's t_end
    pattern_level: float | None = None  # defaults to the steady state


@dataclass(frozen=True)
class SweepSpec:
    param: str
    mode: str = "scan"                 # scan | bisect
    values: tuple[float, ...] | None = None
    lo: float | None = None
    hi: float | None = None
    tol: float = 0.05

    def __post_init__(self):
        if self.mode not in ("scan", "bisect"):
            raise ConfigError(f"unknown sweep mode {self.mode!r}")
        if self.mode == "scan" and not self.values:
            raise ConfigError("scan sweep needs a values list")
        if self.mode == "bisect" and (self.lo is None or self.hi is None):
            raise ConfigError("bisect sweep needs lo and hi")


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    kernel: Kernel
    grid: Grid1D
    initial: InitialSpec
    solver: SolverConfig
    diagnostics: DiagnosticsConfig | None = None
    sweep: SweepSpec | None = None
    kinetic_speed: float = 1.0

    def build_initial(self) -> Field:
        vals = build_initial(self.initial, self.grid)
        if float(np.min(vals.values)) < 0.0:
            raise ConfigError("initial data must be nonnegative")
        return vals


# ---------------------------------------------------------------- to JSON --

def params_to_dict(params: ModelParams, kernel: Kernel) -> dict:
    kd: dict = {"shape": kernel.shape, "sigma": kernel.sigma}
    if kernel.samples is not None:
        kd["samples"] = [list(p) for p in kernel.samples]
    kd["floor_radius"] = kernel.floor_radius
    kd["floor_value"] = kernel.floor_value
    return {
        "alpha": params.alpha,
        "beta": params.beta,
        "mu": params.mu,
        "kappa": params.kappa,
        "diffusion": params.diffusion,
        "kernel": kd,
    }


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = params_to_dict(cfg.params, cfg.kernel)
    g = cfg.grid
    gd: dict = {"x_left": g.x_left, "x_right": g.x_right, "n_cells": g.n_cells}
    if g.is_periodic:
        gd["boundary"] = {"type": "periodic"}
    else:
        gd["boundary"] = {
            "type": "dirichlet",
            "left": g.boundary.left_value,
            "right": g.boundary.right_value,
        }
    out["grid"] = gd

    init = cfg.initial
    if isinstance(init, FrontInitial):
        out["initial"] = {"type": "front"}
    elif isinstance(init, OscillatoryBump):
        out["initial"] = {"type": "oscillatory_bump", **asdict(init)}
    elif isinstance(init, ConstantTimesNoise):
        out["initial"] = {"type": "constant_noise", **asdict(init)}
    else:
        out["initial"] = {"type": "custom", "file": init.file}

    out["solver"] = asdict(cfg.solver)
    if cfg.diagnostics is not None:
        d = cfg.diagnostics
        out["diagnostics"] = {
            "delta": d.lyapunov.delta,
            "interior_margin": d.lyapunov.interior_margin,
            "hypothesis_rtol": d.lyapunov.hypothesis_rtol,
            "compact_set": list(d.compact_set),
            "tol": d.tol,
            "horizon": d.horizon,
            "pattern_level": d.pattern_level,
        }
    if cfg.sweep is not None:
        s = cfg.sweep
        sd: dict = {"param": s.param, "mode": s.mode, "tol": s.tol}
        if s.values is not None:
            sd["values"] = list(s.values)
        if s.lo is not None:
            sd["lo"] = s.lo
        if s.hi is not None:
            sd["hi"] = s.hi
        out["sweep"] = sd
    if cfg.kinetic_speed != 1.0:
        out["kinetic_speed"] = cfg.kinetic_speed
    return out


# -------------------------------------------------------------- from JSON --

def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing {key!r} in {where}")
    return d[key]


def kernel_from_dict(d: dict) -> Kernel:
    try:
        samples = d.get("samples")
        return Kernel(
            shape=_require(d, "shape", "kernel"),
            sigma=float(d.get("sigma", 1.0)),
            samples=tuple(map(tuple, samples)) if samples is not None else None,
            floor_radius=d.get("floor_radius"),
            floor_value=d.get("floor_value"),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad kernel spec: {exc}") from exc


def params_from_dict(d: dict) -> tuple[ModelParams, Kernel]:
    try:
        params = ModelParams(
            alpha=float(_require(d, "alpha", "params")),
            beta=float(_require(d, "beta", "params")),
            mu=float(_require(d, "mu", "params")),
            kappa=float(_require(d, "kappa", "params")),
            diffusion=float(d.get("diffusion", 1.0)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad model parameters: {exc}") from exc
    return params, kernel_from_dict(_require(d, "kernel", "config"))


def grid_from_dict(d: dict) -> Grid1D:
    bd = d.get("boundary", {"type": "periodic"})
    btype = bd.get("type", "periodic")
    if btype == "periodic":
        boundary = Periodic()
    elif btype == "dirichlet":
        boundary = DirichletExtension(float(bd.get("left", 0.0)),
                                      float(bd.get("right", 0.0)))
    else:
        raise ConfigError(f"unknown boundary type {btype!r}")
    try:
        return Grid1D(
            x_left=float(_require(d, "x_left", "grid")),
            x_right=float(_require(d, "x_right", "grid")),
            n_cells=int(_require(d, "n_cells", "grid")),
            boundary=boundary,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad grid spec: {exc}") from exc


def initial_from_dict(d: dict) -> InitialSpec:
    kind = d.get("type", "front")
    if kind == "front":
        return FrontInitial()
    if kind == "oscillatory_bump":
        return OscillatoryBump(
            amplitude=float(d.get("amplitude", 0.2)),
            wavenumber=float(d.get("wavenumber", 3.0)),
            floor=float(d.get("floor", 0.01)),
        )
    if kind == "constant_noise":
        return ConstantTimesNoise(level=float(_require(d, "level", "initial")),
                                  seed=int(_require(d, "seed", "initial")))
    if kind == "custom":
        return CustomInitial(file=str(_require(d, "file", "initial")))
    raise ConfigError(f"unknown initial type {kind!r}")


def solver_from_dict(d: dict) -> SolverConfig:
    try:
        return SolverConfig(
            t_end=float(_require(d, "t_end", "solver")),
            dt_initial=float(d.get("dt_initial", 1e-4)),
            dt_min=float(d.get("dt_min", 1e-12)),
            cfl_safety=float(d.get("cfl_safety", 0.9)),
            blowup_threshold=float(d.get("blowup_threshold", 1e12)),
            convolution_method=str(d.get("convolution_method", "fft")),
            integrator=str(d.get("integrator", "rk4")),
            snapshot_stride=int(d.get("snapshot_stride", 100)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad solver config: {exc}") from exc


def diagnostics_from_dict(d: dict) -> DiagnosticsConfig:
    try:
        lya = LyapunovConfig(
            delta=float(d.get("delta", 0.5)),
            interior_margin=int(d.get("interior_margin", 0)),
            hypothesis_rtol=float(d.get("hypothesis_rtol", 1e-6)),
        )
        cs = d.get("compact_set", (-2.0, 2.0))
        return DiagnosticsConfig(
            lyapunov=lya,
            compact_set=(float(cs[0]), float(cs[1])),
            tol=float(d.get("tol", 1e-2)),
            horizon=None if d.get("horizon") is None else float(d["horizon"]),
            pattern_level=(None if d.get("pattern_level") is None
                           else float(d["pattern_level"])),
        )
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"bad diagnostics config: {exc}") from exc


def sweep_from_dict(d: dict) -> SweepSpec:
    values = d.get("values")
    return SweepSpec(
        param=str(_require(d, "param", "sweep")),
        mode=str(d.get("mode", "scan")),
        values=tuple(float(v) for v in values) if values is not None else None,
        lo=None if d.get("lo") is None else float(d["lo"]),
        hi=None if d.get("hi") is None else float(d["hi"]),
        tol=float(d.get("tol", 0.05)),
    )


def config_from_dict(d: dict) -> ExperimentConfig:
    params, kernel = params_from_dict(d)
    grid = grid_from_dict(_require(d, "grid", "config"))
    initial = initial_from_dict(d.get("initial", {"type": "front"}))
    solver = solver_from_dict(_require(d, "solver", "config"))
    diagnostics = None
    if d.get("diagnostics") is not None:
        diagnostics = diagnostics_from_dict(d["diagnostics"])
    sweep = None
    if d.get("sweep") is not None:
        sweep = sweep_from_dict(d["sweep"])
    return ExperimentConfig(
        params=params,
        kernel=kernel,
        grid=grid,
        initial=initial,
        solver=solver,
        diagnostics=diagnostics,
        sweep=sweep,
        kinetic_speed=float(d.get("kinetic_speed", 1.0)),
    )


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)
