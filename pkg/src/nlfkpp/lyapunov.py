"""Entropy monitoring: windowed Lyapunov functional, dissipation, and
long-time diagnostics (approach to the positive equilibrium, patterns).

For solutions pinched between 0 and the equilibrium kappa**(-1/beta), the
windowed entropy

    F(x, t) = integral over [x-delta, x+delta] of h(u^beta(y, t)) dy

is nonnegative and satisfies d/dt F <= Lap(F) - D with the dissipation

    D(x, t) = (1/2) * eta * mu * kappa * (2 delta)
              * integral over [x-delta, x+delta] of (1/kappa - u^beta)^2 dy

(eta is the kernel's floor value).  The monitor checks this inequality on
numerical trajectories up to a discretization allowance tol = C1*dt + C2*h^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DirichletExtension, Field, Grid1D, Kernel, ModelParams, powered
from .solver import RunOutcome

# Young's inequality ab <= eps a^2 + b^2/(4 eps) at eps = 1/2.
YOUNG_CONST = 0.5

# Discretization allowance tol(dt, h) = C1*dt + C2*h^2 for the monitored
# inequality; calibrated on the pinned steady state and on near-equilibrium
# diffusive transients (scripts/calibrate_monitor_tol.py), then rounded up.
RESIDUAL_C1 = 2.0
RESIDUAL_C2 = 20.0


class WindowPositivityError(ValueError):
    """A nonpositive value entered an entropy window."""

    def __init__(self, node, detail=""):
        self.node = node
        super().__init__(
            f"nonpositive value inside the entropy window of node {node}{detail}"
        )


class HypothesisViolationError(ValueError):
    """Monitored solution leaves the (0, kappa^(-1/beta)] strip."""

    def __init__(self, time: float, location: float, value: float):
        self.time = time
        self.location = location
        self.value = value
        super().__init__(
            f"u = {value:.6g} at x = {location:.6g}, t = {time:.6g} exceeds the "
            "equilibrium; the entropy inequality is only guaranteed below it"
        )


@dataclass(frozen=True)
class LyapunovConfig:
    delta: float
    interior_margin: int = 0
    # numerical slack on the hypothesis u <= kappa^(-1/beta); discrete
    # trajectories may overshoot by discretization error
    hypothesis_rtol: float = 1e-6

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError("delta must be positive")
        if self.interior_margin < 0:
            raise ValueError("interior_margin must be >= 0")


def entropy_density(s, params: ModelParams):
    """Convex density h(s) with minimum h(1/kappa) = 0, s > 0.

    alpha = 1:  s/beta - ln(s)/(kappa beta) - (1 + ln kappa)/(kappa beta)
    alpha > 1:  s^((1+beta-alpha)/beta)/(1+beta-alpha)
                - s^((1-alpha)/beta)/(kappa (1-alpha))
                + kappa^((alpha-1-beta)/beta) (1/(1-alpha) - 1/(1+beta-alpha))

    alpha = 1 + beta makes the second branch singular; the analytic
    (logarithmic) limit is not part of the contract, so it is rejected.
    """
    a, b, kap = params.alpha, params.beta, params.kappa
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0.0):
        raise ValueError("entropy density requires s > 0")
    if a == 1.0:
        out = s_arr / b - np.log(s_arr) / (kap * b) - (1.0 + math.log(kap)) / (kap * b)
    else:
        if abs(1.0 + b - a) < 1e-12:
            raise ValueError(
                "entropy density undefined at alpha = 1 + beta "
                "(removable singularity, limit not provided)"
            )
        p1 = (1.0 + b - a) / b
        p2 = (1.0 - a) / b
        const = kap ** ((a - 1.0 - b) / b) * (1.0 / (1.0 - a) - 1.0 / (1.0 + b - a))
        out = s_arr ** p1 / (1.0 + b - a) - s_arr ** p2 / (kap * (1.0 - a)) + const
    return out if out.ndim else float(out)


def snap_window(delta: float, spacing: float) -> tuple[int, float]:
    """Snap the window half-width to the node lattice: (halfwidth in nodes,
    snapped delta).  Keeps quadrature and Laplacian stencils commensurate."""
    w = int(round(delta / spacing))
    if w < 1:
        raise ValueError(
            f"delta={delta:g} below half a cell (spacing {spacing:g}); window empty"
        )
    return w, w * spacing


def _sliding_trapz(ext: np.ndarray, w: int, spacing: float) -> np.ndarray:
    """Trapezoid quadrature over every window of 2w+1 consecutive samples."""
    win = np.full(2 * w + 1, spacing)
    win[0] = win[-1] = 0.5 * spacing
    return np.convolve(ext, win, mode="valid")


def _extended(values: np.ndarray, grid: Grid1D, w: int) -> np.ndarray:
    """Values padded by w samples per side following the boundary policy."""
    if grid.is_periodic:
        return np.concatenate([values[-w:], values, values[:w]])
    b = grid.boundary
    return np.concatenate([
        np.full(w, b.left_value), values, np.full(w, b.right_value)
    ])


def _checked_extended(values: np.ndarray, grid: Grid1D, w: int) -> np.ndarray:
    ext = _extended(values, grid, w)
    bad = np.flatnonzero(ext <= 0.0)
    if bad.size:
        node = int(bad[0]) - w  # < 0 / >= n mark the constant extensions
        detail = ""
        if node < 0:
            detail = " (left extension value)"
        elif node >= grid.n_nodes:
            detail = " (right extension value)"
        raise WindowPositivityError(node, detail)
    return ext


def _entropy_integrand(values: np.ndarray, grid: Grid1D, w: int,
                       params: ModelParams) -> np.ndarray:
    ext = _checked_extended(values, grid, w)
    return entropy_density(powered(ext, params.beta), params)


def windowed_entropy(fld: Field, params: ModelParams,
                     config: LyapunovConfig) -> Field:
    """The Lyapunov functional F as a nodal field."""
    w, _ = snap_window(config.delta, fld.grid.spacing)
    g = _entropy_integrand(np.asarray(fld.values), fld.grid, w, params)
    return Field(fld.grid, _sliding_trapz(g, w, fld.grid.spacing), fld.time)


def windowed_dissipation(fld: Field, params: ModelParams, config: LyapunovConfig,
                         kernel: Kernel) -> Field:
    """The dissipation D as a nodal field (1D window volume 2*delta)."""
    w, delta = snap_window(config.delta, fld.grid.spacing)
    ext = _checked_extended(np.asarray(fld.values), fld.grid, w)
    sq = (1.0 / params.kappa - powered(ext, params.beta)) ** 2
    scale = 0.5 * kernel.scaled_floor_value * params.mu * params.kappa * (2.0 * delta)
    return Field(fld.grid, scale * _sliding_trapz(sq, w, fld.grid.spacing), fld.time)


def admissible_delta_max(params: ModelParams, kernel: Kernel) -> float:
    """Ceiling on delta under which the entropy inequality is derived.

    min{floor_radius/2, sqrt(alpha kappa^((alpha-1)/beta)/(4 mu C beta^2))}
    for alpha <= beta, and min{floor_radius/2,
    sqrt(kappa^((alpha-1)/beta)/(4 C beta mu))} for alpha > beta, C = 1/2.
    """
    a, b, kap, mu = params.alpha, params.beta, params.kappa, params.mu
    half_radius = kernel.scaled_floor_radius / 2.0
    if mu == 0.0:
        return half_radius
    kpow = kap ** ((a - 1.0) / b)
    if a <= b:
        stiff = math.sqrt(a * kpow / (4.0 * mu * YOUNG_CONST * b * b))
    else:
        stiff = math.sqrt(kpow / (4.0 * YOUNG_CONST * b * mu))
    return min(half_radius, stiff)


@dataclass(frozen=True)
class PairResidual:
    t_start: float
    t_end: float
    max_residual: float
    tol: float


@dataclass(frozen=True)
class MonitorReport:
    passed: bool
    pairs: tuple[PairResidual, ...]
    max_residual: float
    delta_used: float
    window_halfwidth: int
    admissible_delta_max: float
    delta_admissible: bool
    note: str
    c1: float = RESIDUAL_C1
    c2: float = RESIDUAL_C2


def _lap_samples(arr: np.ndarray, spacing: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(arr, -1) - 2.0 * arr + np.roll(arr, 1)) / spacing ** 2
    out = np.full_like(arr, np.nan)
    out[1:-1] = (arr[2:] - 2.0 * arr[1:-1] + arr[:-2]) / spacing ** 2
    return out


def monitor_entropy_inequality(outcome: RunOutcome, params: ModelParams,
                               kernel: Kernel, config: LyapunovConfig,
                               c1: float = RESIDUAL_C1,
                               c2: float = RESIDUAL_C2) -> MonitorReport:
    """Check d/dt F <= Lap(F) - D across consecutive snapshot pairs.

    Refuses (HypothesisViolationError) when any snapshot leaves the strip
    0 < u <= kappa^(-1/beta) (1 + hypothesis_rtol): outside it the
    inequality carries no guarantee.  The residual

        R = (F1 - F0)/dt - (Lap F0 + Lap F1)/2 + (D0 + D1)/2

    must stay below tol = c1*dt + c2*h^2 at every interior node.
    """
    snaps = outcome.snapshots
    if len(snaps) < 2:
        raise ValueError("need at least two snapshots to monitor")
    grid = snaps[0].grid
    h = grid.spacing
    w, delta_used = snap_window(config.delta, h)
    ceiling = admissible_delta_max(params, kernel)
    u_star = params.steady_state()
    cap = u_star * (1.0 + config.hypothesis_rtol)
    x = grid.nodes()

    for s in snaps:
        vals = np.asarray(s.values)
        hi = int(np.argmax(vals))
        if vals[hi] > cap:
            raise HypothesisViolationError(s.time, float(x[hi]), float(vals[hi]))

    margin = config.interior_margin
    if not grid.is_periodic and margin < w + 1:
        raise ValueError(
            f"Dirichlet-extension monitoring needs interior_margin >= {w + 1} "
            f"(window halfwidth {w} plus one Laplacian node)"
        )

    def profiles(s: Field):
        vals = np.asarray(s.values)
        if grid.is_periodic:
            g = _entropy_integrand(vals, grid, w, params)
            f_arr = _sliding_trapz(g, w, h)
            sq = (1.0 / params.kappa - powered(
                np.concatenate([vals[-w:], vals, vals[:w]]), params.beta)) ** 2
            d_arr = _sliding_trapz(sq, w, h)
        else:
            bad = np.flatnonzero(vals <= 0.0)
            if bad.size:
                raise WindowPositivityError(int(bad[0]))
            # no extension padding: profiles only where the window is interior
            g = entropy_density(powered(vals, params.beta), params)
            f_arr = _sliding_trapz(g, w, h)
            sq = (1.0 / params.kappa - powered(vals, params.beta)) ** 2
            d_arr = _sliding_trapz(sq, w, h)
        scale = 0.5 * kernel.scaled_floor_value * params.mu * params.kappa \
            * (2.0 * delta_used)
        return f_arr, scale * d_arr

    pairs = []
    worst = -math.inf
    ok = True
    prev = profiles(snaps[0])
    for s0, s1 in zip(snaps[:-1], snaps[1:]):
        cur = profiles(s1)
        f0, d0 = prev
        f1, d1 = cur
        dt = s1.time - s0.time
        lap0 = _lap_samples(f0, h, grid.is_periodic)
        lap1 = _lap_samples(f1, h, grid.is_periodic)
        resid = (f1 - f0) / dt - 0.5 * (lap0 + lap1) + 0.5 * (d0 + d1)
        if grid.is_periodic:
            sel = resid[margin: len(resid) - margin] if margin else resid
        else:
            # f arrays start at node w; residual nodes [margin, n-1-margin]
            sel = resid[margin - w: len(resid) - (margin - w)]
        max_r = float(np.nanmax(sel))
        tol = c1 * dt + c2 * h * h
        pairs.append(PairResidual(s0.time, s1.time, max_r, tol))
        worst = max(worst, max_r)
        ok = ok and (max_r <= tol)
        prev = cur

    admissible = delta_used <= ceiling
    note = "" if admissible else (
        "delta exceeds the admissible ceiling; the continuum inequality "
        "is not guaranteed for this window"
    )
    return MonitorReport(
        passed=ok,
        pairs=tuple(pairs),
        max_residual=worst,
        delta_used=delta_used,
        window_halfwidth=w,
        admissible_delta_max=ceiling,
        delta_admissible=admissible,
        note=note,
        c1=c1,
        c2=c2,
    )


@dataclass(frozen=True)
class HairTriggerReport:
    compact_set: tuple[float, float]
    times: np.ndarray
    sup_distance: np.ndarray
    converged: bool
    convergence_time: float | None
    hypothesis_a: bool
    hypothesis_b_sup: float
    hypothesis_b_admissible: bool
    tol: float
    horizon: float


def diagnose_hair_trigger(outcome: RunOutcome, params: ModelParams,
                          compact_set: tuple[float, float], tol: float,
                          horizon: float,
                          config: LyapunovConfig | None = None) -> HairTriggerReport:
    """Track sup |u - kappa^(-1/beta)| on a compact set across snapshots.

    converged requires the sup-distance to drop below tol no later than
    `horizon` and to stay below it through the final snapshot.  The initial
    datum is also checked against the two admissibility hypotheses:
    (A) 0 <= u0 <= kappa^(-1/beta); (B) windowed integrals of ln(u0)
    (alpha = 1) or u0^(1-alpha) (alpha > 1) are bounded.
    """
    a, b_ = compact_set
    grid = outcome.snapshots[0].grid
    lo, hi = grid.x_left, grid.x_left + grid.length
    if not (lo < a < b_ < hi):
        raise ValueError("compact set must lie strictly inside the grid")
    x = grid.nodes()
    mask = (x >= a) & (x <= b_)
    u_star = params.steady_state()

    times = np.array([s.time for s in outcome.snapshots])
    sup_d = np.array([
        float(np.max(np.abs(np.asarray(s.values)[mask] - u_star)))
        for s in outcome.snapshots
    ])

    below = sup_d < tol
    converged = False
    conv_time = None
    if below.any():
        first = int(np.argmax(below))
        if times[first] <= horizon and bool(np.all(below[first:])):
            converged = True
            conv_time = float(times[first])

    u0 = np.asarray(outcome.snapshots[0].values)
    hyp_a = bool(np.all(u0 >= 0.0) and np.all(u0 <= u_star * (1.0 + 1e-12)))

    if config is None:
        config = LyapunovConfig(delta=min(1.0, grid.length / 4.0))
    w, _ = snap_window(config.delta, grid.spacing)
    with np.errstate(divide="ignore", invalid="ignore"):
        if params.alpha == 1.0:
            g0 = np.log(_extended(u0, grid, w))
        else:
            g0 = _extended(u0, grid, w) ** (1.0 - params.alpha)
        b_sup = float(np.max(np.abs(_sliding_trapz(g0, w, grid.spacing))))
    hyp_b = math.isfinite(b_sup)

    return HairTriggerReport(
        compact_set=(a, b_),
        times=times,
        sup_distance=sup_d,
        converged=converged,
        convergence_time=conv_time,
        hypothesis_a=hyp_a,
        hypothesis_b_sup=b_sup,
        hypothesis_b_admissible=hyp_b,
        tol=tol,
        horizon=horizon,
    )


@dataclass(frozen=True)
class PatternMetrics:
    crossing_count: int
    max_amplitude: float
    dominant_wavelength: float


def pattern_metrics(fld: Field, level: float) -> PatternMetrics:
    """Sign changes of u - level, sup |u - level|, and the wavelength of the
    dominant Fourier mode of u - mean (0 when there is none)."""
    dev = np.asarray(fld.values) - level
    signs = np.sign(dev)
    signs = signs[signs != 0.0]
    crossings = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if fld.grid.is_periodic and signs.size > 1 and signs[0] != signs[-1]:
        crossings += 1
    max_amp = float(np.max(np.abs(dev))) if dev.size else 0.0

    demeaned = np.asarray(fld.values) - float(np.mean(fld.values))
    spec = np.abs(np.fft.rfft(demeaned))
    if spec.size < 2 or float(np.max(spec[1:])) <= 1e-12 * max(1.0, abs(level)):
        wavelength = 0.0
    else:
        k = 1 + int(np.argmax(spec[1:]))
        wavelength = fld.grid.length / k
    return PatternMetrics(crossings, max_amp, wavelength)
