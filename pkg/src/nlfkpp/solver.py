"""Method-of-lines integration of u_t = D u_xx + mu u^a (1 - kappa J*u^b).

Space: second-order central differences on a uniform grid, with either
periodic wrap or constant Dirichlet extension (endpoint nodes pinned).
Nonlocal term: cell-integrated kernel weights; FFT and direct-summation
convolution paths are kept as independent routes so one can oracle the other.
Time: classic RK4 (fully explicit) or first-order IMEX with implicit
diffusion, under an adaptive step-halving rule for fast transients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len
from scipy.linalg import solve_banded

from .model import (
    DirichletExtension,
    Field,
    Grid1D,
    Kernel,
    ModelParams,
    NegativeValueError,
    Periodic,
    powered,
)

INTEGRATORS = ("rk4", "imex")
CONVOLUTION_METHODS = ("fft", "direct")

# A step is rejected and dt halved when it grows sup u beyond this factor.
GROWTH_FACTOR = 2.0
# sup-growth is measured against max(previous sup, this floor) so runs
# starting from (near) zero data are not throttled.
GROWTH_FLOOR = 1e-12
# dt doubles back (capped at dt_initial) after this many quiet steps.
QUIET_STEPS_TO_DOUBLE = 50


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    dt_initial: float = 1e-4
    dt_min: float = 1e-12
    cfl_safety: float = 0.9
    blowup_threshold: float = 1e12
    convolution_method: str = "fft"
    integrator: str = "rk4"
    snapshot_stride: int = 100

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if not 0.0 < self.dt_min <= self.dt_initial:
            raise ValueError("need 0 < dt_min <= dt_initial")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if not self.blowup_threshold > 0.0:
            raise ValueError("blowup_threshold must be positive")
        if self.convolution_method not in CONVOLUTION_METHODS:
            raise ValueError(f"unknown convolution method {self.convolution_method!r}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


@dataclass(frozen=True)
class CompletedBounded:
    pass


@dataclass(frozen=True)
class BlowUpDetected:
    time: float
    location: float


@dataclass(frozen=True)
class DtUnderflow:
    time: float


RunStatus = CompletedBounded | BlowUpDetected | DtUnderflow


@dataclass(frozen=True)
class RunOutcome:
    status: RunStatus
    snapshots: tuple[Field, ...]
    history_t: np.ndarray
    history_sup: np.ndarray
    history_inf: np.ndarray
    history_dt: np.ndarray
    clamped_count: int = 0

    @property
    def max_history(self) -> np.ndarray:
        return np.column_stack([self.history_t, self.history_sup])

    @property
    def min_history(self) -> np.ndarray:
        return np.column_stack([self.history_t, self.history_inf])

    @property
    def final(self) -> Field:
        return self.snapshots[-1]


class ConvolutionPlan:
    """Precomputed discrete convolution J * w on one grid.

    Periodic grids use weights renormalized to sum exactly to 1, so constants
    are exact fixed points of the discrete operator.  Dirichlet-extension
    grids keep the raw cell masses and add the analytic exterior tail masses,
    which also reproduces constants to round-off.
    """

    def __init__(self, kernel: Kernel, grid: Grid1D, method: str = "fft"):
        if method not in CONVOLUTION_METHODS:
            raise ValueError(f"unknown convolution method {method!r}")
        self.method = method
        self.grid = grid
        n = grid.n_nodes
        h = grid.spacing
        offsets, weights = kernel.cell_weights(h)
        if grid.is_periodic:
            weights = weights / weights.sum()
            if method == "fft":
                wrapped = np.zeros(n)
                np.add.at(wrapped, offsets % n, weights)
                self._kernel_hat = np.fft.rfft(wrapped)
            else:
                self._pairs = [
                    (int(j), w) for j, w in zip(offsets, weights) if w != 0.0
                ]
        else:
            m = offsets[-1]
            self._m = int(m)
            if method == "fft":
                self._nfft = next_fast_len(n + 2 * self._m)
                padded = np.zeros(self._nfft)
                padded[: 2 * self._m + 1] = weights
                self._kernel_hat = np.fft.rfft(padded)
            else:
                self._pairs = [
                    (int(j), w) for j, w in zip(offsets, weights) if w != 0.0
                ]
            # Exterior tail mass per node: everything beyond the window of
            # discrete cells is attributed to the constant extensions.
            idx = np.arange(n)
            self._mass_left = 1.0 - kernel.cdf((idx + 0.5) * h)
            self._mass_right = kernel.cdf(-(n - 1 - idx + 0.5) * h)

    def apply(self, w: np.ndarray, left_tail: float = 0.0, right_tail: float = 0.0):
        """Convolve nodal values w; tail args are the powered extension values."""
        n = self.grid.n_nodes
        if self.grid.is_periodic:
            if self.method == "fft":
                return np.fft.irfft(np.fft.rfft(w) * self._kernel_hat, n)
            out = np.zeros(n)
            for j, wt in self._pairs:
                out += wt * np.roll(w, j)
            return out
        if self.method == "fft":
            padded = np.zeros(self._nfft)
            padded[:n] = w
            conv = np.fft.irfft(np.fft.rfft(padded) * self._kernel_hat, self._nfft)
            out = conv[self._m : self._m + n].copy()
        else:
            out = np.zeros(n)
            for j, wt in self._pairs:
                lo, hi = max(0, j), min(n, n + j)
                if lo < hi:
                    out[lo:hi] += wt * w[lo - j : hi - j]
        out += left_tail * self._mass_left
        out += right_tail * self._mass_right
        return out


def convolve(kernel: Kernel, fld: Field, exponent: float, method: str = "fft") -> Field:
    """J * (u**exponent) on the field's grid, honoring its boundary policy."""
    plan = ConvolutionPlan(kernel, fld.grid, method)
    w = powered(fld.values, exponent)
    if fld.grid.is_periodic:
        out = plan.apply(w)
    else:
        b = fld.grid.boundary
        out = plan.apply(
            w,
            powered(np.array([b.left_value]), exponent)[0],
            powered(np.array([b.right_value]), exponent)[0],
        )
    return Field(fld.grid, out, fld.time)


class Workspace:
    """Precomputed apparatus for repeated RHS evaluation and stepping."""

    def __init__(self, grid: Grid1D, params: ModelParams, kernel: Kernel,
                 config: SolverConfig):
        self.grid = grid
        self.params = params
        self.config = config
        self.plan = ConvolutionPlan(kernel, grid, config.convolution_method)
        self.h2 = grid.spacing ** 2
        if grid.is_periodic:
            self.left_pow = self.right_pow = 0.0
            n = grid.n_nodes
            k = np.arange(n // 2 + 1)
            self._lap_symbol = (2.0 * np.cos(2.0 * math.pi * k / n) - 2.0) / self.h2
        else:
            b = grid.boundary
            self.left_pow = float(powered(np.array([b.left_value]), params.beta)[0])
            self.right_pow = float(powered(np.array([b.right_value]), params.beta)[0])
        self._imex_cache: dict[float, object] = {}

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        out = np.empty_like(u)
        if self.grid.is_periodic:
            out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
            out[0] = u[1] - 2.0 * u[0] + u[-1]
            out[-1] = u[0] - 2.0 * u[-1] + u[-2]
        else:
            # endpoint nodes belong to the pinned exterior closure
            out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
            out[0] = 0.0
            out[-1] = 0.0
        out /= self.h2
        return out

    def reaction(self, u: np.ndarray) -> np.ndarray:
        p = self.params
        conv = self.plan.apply(powered(u, p.beta), self.left_pow, self.right_pow)
        out = p.mu * powered(u, p.alpha) * (1.0 - p.kappa * conv)
        if not self.grid.is_periodic:
            out[0] = 0.0
            out[-1] = 0.0
        return out

    def rhs(self, u: np.ndarray) -> np.ndarray:
        out = self.reaction(u)
        if self.params.diffusion != 0.0:
            out += self.params.diffusion * self.laplacian(u)
        return out

    def rk4_step(self, u: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.rhs(u)
        k2 = self.rhs(u + 0.5 * dt * k1)
        k3 = self.rhs(u + 0.5 * dt * k2)
        k4 = self.rhs(u + dt * k3)
        return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _imex_operator(self, dt: float):
        op = self._imex_cache.get(dt)
        if op is None:
            d = self.params.diffusion
            if self.grid.is_periodic:
                op = 1.0 - dt * d * self._lap_symbol
            else:
                n_int = self.grid.n_nodes - 2
                r = dt * d / self.h2
                ab = np.zeros((3, n_int))
                ab[0, 1:] = -r
                ab[1, :] = 1.0 + 2.0 * r
                ab[2, :-1] = -r
                op = (ab, r)
            self._imex_cache = {dt: op}
        return op

    def imex_step(self, u: np.ndarray, dt: float) -> np.ndarray:
        """Backward-Euler diffusion, explicit reaction."""
        rhs_vec = u + dt * self.reaction(u)
        if self.params.diffusion == 0.0:
            return rhs_vec
        if self.grid.is_periodic:
            denom = self._imex_operator(dt)
            return np.fft.irfft(np.fft.rfft(rhs_vec) / denom, self.grid.n_nodes)
        ab, r = self._imex_operator(dt)
        out = u.copy()
        b = rhs_vec[1:-1].copy()
        b[0] += r * u[0]
        b[-1] += r * u[-1]
        out[1:-1] = solve_banded((1, 1), ab, b)
        return out

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        if self.config.integrator == "rk4":
            return self.rk4_step(u, dt)
        return self.imex_step(u, dt)


def stable_dt(grid: Grid1D, params: ModelParams, config: SolverConfig) -> float:
    """Largest admissible dt: dt_initial, capped by the explicit diffusion
    bound cfl_safety * h^2 / (2 D) when the integrator treats diffusion
    explicitly."""
    dt = config.dt_initial
    if config.integrator == "rk4" and params.diffusion > 0.0:
        dt = min(dt, config.cfl_safety * grid.spacing ** 2 / (2.0 * params.diffusion))
    return dt


def rhs(fld: Field, params: ModelParams, kernel: Kernel,
        method: str = "fft") -> Field:
    """Semi-discrete right-hand side D*Lap(u) + mu u^a (1 - kappa J*u^b)."""
    cfg = SolverConfig(t_end=1.0, convolution_method=method)
    ws = Workspace(fld.grid, params, kernel, cfg)
    return Field(fld.grid, ws.rhs(np.asarray(fld.values)), fld.time)


def step(fld: Field, params: ModelParams, kernel: Kernel, config: SolverConfig,
         dt: float | None = None) -> Field:
    """Advance one time step.  Caller owns the explicit stability bound; see
    stable_dt for the default choice."""
    ws = Workspace(fld.grid, params, kernel, config)
    if dt is None:
        dt = stable_dt(fld.grid, params, config)
    out = ws.step(np.asarray(fld.values), dt)
    return Field(fld.grid, out, fld.time + dt)


def run(initial: Field, params: ModelParams, kernel: Kernel,
        config: SolverConfig) -> RunOutcome:
    """Integrate to t_end or until blow-up.

    Blow-up is declared when sup|u| reaches blowup_threshold or a step
    produces non-finite values.  A step that grows sup u by more than
    GROWTH_FACTOR is rejected and retried with dt/2 (fast transients); dt
    doubles back, capped at dt_initial, after QUIET_STEPS_TO_DOUBLE accepted
    steps.  If halving would push dt below dt_min the run stops with
    DtUnderflow.  Values in (-1e-10, 0) are clamped to 0 and counted.
    """
    ws = Workspace(initial.grid, params, kernel, config)
    grid = initial.grid
    x = grid.nodes()
    u = np.array(initial.values, dtype=float)
    t = float(initial.time)
    dt_cap = stable_dt(grid, params, config)
    dt = dt_cap
    t_final = initial.time + config.t_end

    snapshots = [initial]
    hist_t = [t]
    hist_sup = [float(np.max(np.abs(u)))]
    hist_inf = [float(np.min(u))]
    hist_dt = [dt]
    clamped = 0
    quiet = 0
    accepted = 0
    status: RunStatus | None = None

    def push_snapshot():
        if snapshots[-1].time != t:
            snapshots.append(Field(grid, u.copy(), t))

    while t < t_final - 1e-14:
        dt_eff = min(dt, t_final - t)
        try:
            u_new = ws.step(u, dt_eff)
        except NegativeValueError:
            # instability symptom under fractional exponents: retry smaller
            if dt * 0.5 < config.dt_min:
                status = DtUnderflow(t)
                break
            dt *= 0.5
            quiet = 0
            continue
        if not np.all(np.isfinite(u_new)):
            bad = int(np.flatnonzero(~np.isfinite(u_new))[0])
            status = BlowUpDetected(t + dt_eff, float(x[bad]))
            break
        sup_new = float(np.max(np.abs(u_new)))
        sup_ref = max(float(np.max(np.abs(u))), GROWTH_FLOOR)
        if sup_new > GROWTH_FACTOR * sup_ref:
            if dt * 0.5 >= config.dt_min:
                dt *= 0.5
                quiet = 0
                continue
            if sup_new >= config.blowup_threshold:
                loc = float(x[int(np.argmax(np.abs(u_new)))])
                status = BlowUpDetected(t + dt_eff, loc)
            else:
                status = DtUnderflow(t)
            break
        small_neg = (u_new < 0.0) & (u_new > -1e-10)
        if np.any(small_neg):
            clamped += int(np.count_nonzero(small_neg))
            u_new[small_neg] = 0.0
        t += dt_eff
        u = u_new
        accepted += 1
        hist_t.append(t)
        hist_sup.append(sup_new)
        hist_inf.append(float(np.min(u)))
        hist_dt.append(dt_eff)
        if sup_new >= config.blowup_threshold:
            loc = float(x[int(np.argmax(np.abs(u)))])
            status = BlowUpDetected(t, loc)
            push_snapshot()
            break
        if accepted % config.snapshot_stride == 0:
            push_snapshot()
        quiet += 1
        if quiet >= QUIET_STEPS_TO_DOUBLE and dt < dt_cap:
            dt = min(2.0 * dt, dt_cap)
            quiet = 0

    if status is None:
        status = CompletedBounded()
    push_snapshot()

    return RunOutcome(
        status=status,
        snapshots=tuple(snapshots),
        history_t=np.asarray(hist_t),
        history_sup=np.asarray(hist_sup),
        history_inf=np.asarray(hist_inf),
        history_dt=np.asarray(hist_dt),
        clamped_count=clamped,
    )
