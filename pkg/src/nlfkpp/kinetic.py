"""Two-speed kinetic transport model and its parabolic (diffusion) limit.

The scaled transport equation

    eps p_t + v p_x = (1/eps) L[p] + eps I[p, p],    v in {-s, +s},

is integrated in its eps-divided form

    p_t = -(v/eps) p_x + (1/eps^2) L[p] + I[p, p].

With the isotropic two-speed equilibrium M = 1/2 the turning operator is
L[p]^(+-) = (p^(-+) - p^(+-))/2 and the interaction operator reads

    I^(+-) = (p^(+-))^alpha / 2^(1-alpha)
             - kappa * (p^(+-))^alpha * (J conv (p^(+-))^beta) / 2^(1-alpha-beta).

The macroscopic density u = p^+ + p^- converges, as eps -> 0, to the
solution of u_t = D u_xx + u^alpha (1 - kappa J conv u^beta) with D = s^2
(speed^2 / dim in general).  Splitting: exact lattice-shift transport at
CFL = 1, exact exponential relaxation, explicit interaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import Field, Grid1D, Kernel, ModelParams, powered
from .solver import ConvolutionPlan, SolverConfig
from . import solver as _solver


@dataclass(frozen=True)
class KineticState:
    grid: Grid1D
    p_plus: np.ndarray
    p_minus: np.ndarray
    eps: float
    speed: float
    time: float = 0.0

    def __post_init__(self):
        if not self.grid.is_periodic:
            raise ValueError("kinetic runs are defined on periodic grids")
        if not (self.eps > 0.0 and self.speed > 0.0):
            raise ValueError("eps and speed must be positive")
        for name in ("p_plus", "p_minus"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_nodes,):
                raise ValueError(f"{name} length does not match the grid")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entry in {name}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if float(np.min(self.p_plus + self.p_minus)) < -1e-10:
            raise ValueError("macroscopic density must be nonnegative")

    @property
    def density(self) -> np.ndarray:
        return self.p_plus + self.p_minus

    def density_field(self) -> Field:
        return Field(self.grid, self.density, self.time)


@dataclass(frozen=True)
class KineticConfig:
    t_end: float
    cfl: float = 1.0          # dt = cfl * eps * spacing / speed
    snapshot_stride: int = 50
    convolution_method: str = "fft"

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


def isotropic_state(grid: Grid1D, density: np.ndarray, eps: float,
                    speed: float) -> KineticState:
    """Split a macroscopic density evenly over the two speeds."""
    density = np.asarray(density, dtype=float)
    return KineticState(grid, density / 2.0, density / 2.0, eps, speed)


def turning_operator(state: KineticState) -> tuple[np.ndarray, np.ndarray]:
    """Relaxation toward the isotropic split; the two outputs cancel exactly."""
    l_plus = 0.5 * (state.p_minus - state.p_plus)
    return l_plus, -l_plus


def diffusion_coefficient(speed: float, dim: int) -> float:
    """Macroscopic diffusion coefficient speed^2 / dim of the limit equation."""
    if not speed > 0.0:
        raise ValueError("speed must be positive")
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    return speed ** 2 / dim


def interaction_operator(state: KineticState, params: ModelParams,
                         kernel: Kernel, plan: ConvolutionPlan | None = None
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Growth/competition source per velocity (two-speed moments of M = 1/2)."""
    if plan is None:
        plan = ConvolutionPlan(kernel, state.grid, "fft")
    a, b, kap = params.alpha, params.beta, params.kappa
    m_alpha = 2.0 ** (1.0 - a)          # integral of M^alpha over both speeds
    m_alpha_beta = 2.0 ** (1.0 - a - b)
    out = []
    for p in (state.p_plus, state.p_minus):
        pa = powered(p, a)
        conv = plan.apply(powered(p, b))
        out.append(pa / m_alpha - kap * pa * conv / m_alpha_beta)
    return out[0], out[1]


def _transport(p_plus, p_minus, nu):
    """First-order upwind transport; an exact lattice shift at nu = 1."""
    new_plus = p_plus - nu * (p_plus - np.roll(p_plus, 1))
    new_minus = p_minus - nu * (p_minus - np.roll(p_minus, -1))
    return new_plus, new_minus


def kinetic_step(state: KineticState, params: ModelParams, kernel: Kernel,
                 config: KineticConfig, dt: float | None = None,
                 plan: ConvolutionPlan | None = None) -> KineticState:
    """One split step: upwind transport, explicit interaction, exact relaxation."""
    h = state.grid.spacing
    dt_cfl = state.eps * h / state.speed
    if dt is None:
        dt = config.cfl * dt_cfl
    if dt > dt_cfl * (1.0 + 1e-12):
        raise ValueError(
            f"dt = {dt:g} violates the transport CFL bound {dt_cfl:g}"
        )
    nu = state.speed * dt / (state.eps * h)
    pp, pm = _transport(np.asarray(state.p_plus), np.asarray(state.p_minus), nu)

    tmp = replace(state, p_plus=pp, p_minus=pm, time=state.time)
    ip, im = interaction_operator(tmp, params, kernel, plan)
    pp = pp + dt * ip
    pm = pm + dt * im

    # exact relaxation: the odd part decays by exp(-dt/eps^2), the sum is kept
    decay = math.exp(-dt / state.eps ** 2)
    mean = 0.5 * (pp + pm)
    odd = 0.5 * (pp - pm) * decay
    return KineticState(state.grid, mean + odd, mean - odd, state.eps,
                        state.speed, state.time + dt)


@dataclass(frozen=True)
class KineticTrajectory:
    snapshots: tuple[KineticState, ...]
    conservation_defect: float  # max |L+ + L-| seen at any step (exact 0)
    min_density: float

    @property
    def final(self) -> KineticState:
        return self.snapshots[-1]


def kinetic_run(state: KineticState, params: ModelParams, kernel: Kernel,
                config: KineticConfig) -> KineticTrajectory:
    plan = ConvolutionPlan(kernel, state.grid, config.convolution_method)
    h = state.grid.spacing
    dt = config.cfl * state.eps * h / state.speed
    n_steps = int(math.ceil(config.t_end / dt - 1e-12))
    snapshots = [state]
    defect = 0.0
    min_density = float(np.min(state.density))
    cur = state
    for i in range(n_steps):
        step_dt = min(dt, config.t_end - (cur.time - state.time))
        cur = kinetic_step(cur, params, kernel, config, step_dt, plan)
        lp, lm = turning_operator(cur)
        defect = max(defect, float(np.max(np.abs(lp + lm))))
        min_density = min(min_density, float(np.min(cur.density)))
        if (i + 1) % config.snapshot_stride == 0 or i == n_steps - 1:
            snapshots.append(cur)
    return KineticTrajectory(tuple(snapshots), defect, min_density)


@dataclass(frozen=True)
class LimitRow:
    eps: float
    linf_error: float
    order: float | None  # vs the previous row; None on the first


def parabolic_reference(grid: Grid1D, density0: np.ndarray, params: ModelParams,
                        kernel: Kernel, speed: float, t_end: float) -> Field:
    """Macroscopic solution with diffusion speed^2 used as the limit target."""
    ref_params = replace(params, mu=1.0,
                         diffusion=diffusion_coefficient(speed, 1))
    dt = 0.4 * grid.spacing ** 2 / (2.0 * ref_params.diffusion)
    cfg = SolverConfig(t_end=t_end, dt_initial=dt, integrator="rk4",
                       snapshot_stride=10 ** 9)
    out = _solver.run(Field(grid, density0), ref_params, kernel, cfg)
    return out.final


def kinetic_limit_study(grid: Grid1D, density0: np.ndarray, params: ModelParams,
                        kernel: Kernel, speed: float, t_end: float,
                        eps_values: tuple[float, ...],
                        cfl: float = 1.0) -> list[LimitRow]:
    """L-inf distance between kinetic density and the parabolic reference,
    per scaling parameter, with the empirical order between consecutive rows."""
    ref = parabolic_reference(grid, density0, params, kernel, speed, t_end)
    rows: list[LimitRow] = []
    for eps in eps_values:
        cfg = KineticConfig(t_end=t_end, cfl=cfl, snapshot_stride=10 ** 9)
        state = isotropic_state(grid, density0, eps, speed)
        traj = kinetic_run(state, params, kernel, cfg)
        err = float(np.max(np.abs(traj.final.density - ref.values)))
        order = None
        if rows:
            prev = rows[-1]
            order = math.log(prev.linf_error / err) / math.log(prev.eps / eps)
        rows.append(LimitRow(eps=eps, linf_error=err, order=order))
    return rows
