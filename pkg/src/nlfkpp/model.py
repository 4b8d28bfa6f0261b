"""Shared domain types: model parameters, interaction kernels, grids and fields.

The model under study is

    u_t = diffusion * u_xx + mu * u**alpha * (1 - kappa * J conv u**beta)

with a normalized, nonnegative interaction kernel J.  Everything here is
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit, ndtr


class NonFiniteFieldError(ValueError):
    """A field was constructed with NaN/inf values (blow-up signal)."""


class NegativeValueError(ValueError):
    """A fractional power was requested on a significantly negative value."""

    def __init__(self, node: int, value: float, exponent: float):
        self.node = node
        self.value = value
        self.exponent = exponent
        super().__init__(
            f"negative value {value:.6g} at node {node} with non-integer "
            f"exponent {exponent:g}"
        )


# Values in (-NEG_CLAMP_TOL, 0) are treated as round-off and clamped to 0
# before fractional powering; anything below it is a genuine violation.
NEG_CLAMP_TOL = 1e-10

KERNEL_SHAPES = ("uniform", "logistic", "gaussian", "tabulated")

# Truncation radius (in units of sigma) where each base kernel falls below
# 1e-16; discrete weights outside carry no representable mass.
_BASE_RADIUS = {"uniform": 1.0, "logistic": 38.0, "gaussian": 8.6}

# (floor_radius, floor_value) for the base (sigma=1) shapes: the kernel
# exceeds floor_value on |x| <= floor_radius.  Analytically valid choices.
_BASE_FLOOR = {
    "uniform": (0.5, 0.49),
    "logistic": (1.0, 1.0 / (2.0 + math.e + 1.0 / math.e) - 1e-6),
    "gaussian": (1.0, math.exp(-0.5) / math.sqrt(2.0 * math.pi) - 1e-6),
}


@dataclass(frozen=True)
class ModelParams:
    """Reaction parameters (alpha, beta, mu, kappa) and diffusion coefficient.

    mu == 0 is accepted so pure-diffusion reference runs can share the type.
    """

    alpha: float
    beta: float
    mu: float
    kappa: float
    diffusion: float = 1.0

    def __post_init__(self):
        if not self.alpha >= 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.mu >= 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.diffusion >= 0.0:
            raise ValueError(f"diffusion must be >= 0, got {self.diffusion}")
        try:
            finite = math.isfinite(self.kappa ** (-1.0 / self.beta))
        except OverflowError:
            finite = False
        if not finite:
            raise ValueError(
                f"steady state kappa**(-1/beta) overflows for kappa={self.kappa}, "
                f"beta={self.beta}"
            )

    def steady_state(self) -> float:
        return self.kappa ** (-1.0 / self.beta)


def steady_state(params: ModelParams) -> float:
    """Positive constant equilibrium kappa**(-1/beta)."""
    return params.steady_state()


def _uniform_pdf(z):
    return np.where(np.abs(z) <= 1.0, 0.5, 0.0)


def _uniform_cdf(z):
    return np.clip((np.asarray(z, dtype=float) + 1.0) / 2.0, 0.0, 1.0)


def _logistic_pdf(z):
    # 1/(2 + e^z + e^-z) = t/(1+t)^2 with t = e^-|z|; stable for large |z|
    t = np.exp(-np.abs(z))
    return t / (1.0 + t) ** 2


def _gauss_pdf(z):
    return np.exp(-0.5 * np.asarray(z, dtype=float) ** 2) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Kernel:
    """Normalized interaction kernel with width parameter sigma.

    evaluate(x) = base(x/sigma)/sigma.  floor_radius/floor_value are stored
    for the base shape and rescale with sigma (radius * sigma, value / sigma).
    Tabulated kernels interpolate linearly between samples and must come with
    their own floor constants.
    """

    shape: str
    sigma: float = 1.0
    samples: tuple[tuple[float, float], ...] | None = None
    floor_radius: float | None = None
    floor_value: float | None = None

    def __post_init__(self):
        if self.shape not in KERNEL_SHAPES:
            raise ValueError(f"unknown kernel shape {self.shape!r}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.shape == "tabulated":
            if self.samples is None or len(self.samples) < 2:
                raise ValueError("tabulated kernel needs at least 2 samples")
            xs = np.array([p[0] for p in self.samples], dtype=float)
            ys = np.array([p[1] for p in self.samples], dtype=float)
            if np.any(np.diff(xs) <= 0):
                raise ValueError("tabulated sample abscissae must be increasing")
            if np.any(ys < 0):
                raise ValueError("tabulated kernel values must be nonnegative")
            mass = np.trapezoid(ys, xs)
            if abs(mass - 1.0) > 1e-10:
                raise ValueError(
                    f"tabulated kernel mass {mass!r} is not 1 within 1e-10"
                )
            if self.floor_radius is None or self.floor_value is None:
                raise ValueError(
                    "tabulated kernels require explicit floor_radius/floor_value"
                )
            object.__setattr__(self, "samples", tuple(map(tuple, self.samples)))
        else:
            if self.samples is not None:
                raise ValueError("samples are only valid for tabulated kernels")
            radius, value = _BASE_FLOOR[self.shape]
            if self.floor_radius is None:
                object.__setattr__(self, "floor_radius", radius)
            if self.floor_value is None:
                object.__setattr__(self, "floor_value", value)

    # --- base-shape helpers (sigma = 1 coordinates) ---

    def _tab_arrays(self):
        xs = np.array([p[0] for p in self.samples], dtype=float)
        ys = np.array([p[1] for p in self.samples], dtype=float)
        # exact cumulative integral of the piecewise-linear density
        seg = 0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        return xs, ys, cum

    def _base_pdf(self, z):
        if self.shape == "uniform":
            return _uniform_pdf(z)
        if self.shape == "logistic":
            return _logistic_pdf(z)
        if self.shape == "gaussian":
            return _gauss_pdf(z)
        xs, ys, _ = self._tab_arrays()
        return np.interp(z, xs, ys, left=0.0, right=0.0)

    def _base_cdf(self, z):
        z = np.asarray(z, dtype=float)
        if self.shape == "uniform":
            return _uniform_cdf(z)
        if self.shape == "logistic":
            return expit(z)
        if self.shape == "gaussian":
            return ndtr(z)
        xs, ys, cum = self._tab_arrays()
        idx = np.clip(np.searchsorted(xs, z, side="right") - 1, 0, len(xs) - 2)
        x0, x1 = xs[idx], xs[idx + 1]
        y0, y1 = ys[idx], ys[idx + 1]
        t = np.clip((z - x0) / (x1 - x0), 0.0, 1.0)
        inner = cum[idx] + (x1 - x0) * (y0 * t + 0.5 * (y1 - y0) * t * t)
        return np.where(z <= xs[0], 0.0, np.where(z >= xs[-1], cum[-1], inner))

    # --- physical (sigma-scaled) interface ---

    @property
    def support_radius(self) -> float:
        """Radius beyond which the kernel mass is below representable tolerance."""
        if self.shape == "tabulated":
            base = max(abs(self.samples[0][0]), abs(self.samples[-1][0]))
        else:
            base = _BASE_RADIUS[self.shape]
        return base * self.sigma

    @property
    def scaled_floor_radius(self) -> float:
        return self.floor_radius * self.sigma

    @property
    def scaled_floor_value(self) -> float:
        return self.floor_value / self.sigma

    def evaluate(self, x):
        """Pointwise kernel value (1/sigma) * base(x/sigma)."""
        x = np.asarray(x, dtype=float)
        out = self._base_pdf(x / self.sigma) / self.sigma
        return out if out.ndim else float(out)

    def cdf(self, x):
        """Mass of the kernel on (-inf, x]."""
        x = np.asarray(x, dtype=float)
        out = self._base_cdf(x / self.sigma)
        return out if out.ndim else float(out)

    def cell_weights(self, spacing: float) -> tuple[np.ndarray, np.ndarray]:
        """Cell-integrated quadrature weights on an offset lattice.

        Returns (offsets, weights) with weights[j] the exact kernel mass over
        [(j-1/2)*spacing, (j+1/2)*spacing].  The raw sum equals 1 minus the
        truncated tail mass (< 1e-16 for every built-in shape).
        """
        if not spacing > 0.0:
            raise ValueError("spacing must be positive")
        m = int(np.ceil(self.support_radius / spacing + 0.5))
        offsets = np.arange(-m, m + 1)
        edges = (np.arange(-m, m + 2) - 0.5) * spacing
        cdf = self.cdf(edges)
        return offsets, np.diff(cdf)


def kernel_evaluate(kernel: Kernel, x):
    """Evaluate the sigma-scaled kernel at x (scalar or array)."""
    return kernel.evaluate(x)


@dataclass(frozen=True)
class Periodic:
    """Wrap-around boundary: u(x + L) = u(x)."""


@dataclass(frozen=True)
class DirichletExtension:
    """Constant extension outside the window: u = left_value on the left tail,
    u = right_value on the right tail; endpoint nodes are pinned to these."""

    left_value: float
    right_value: float


Boundary = Periodic | DirichletExtension


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid on [x_left, x_right] with n_cells cells.

    Periodic grids carry n_cells nodes (x_right identified with x_left);
    Dirichlet-extension grids carry n_cells + 1 nodes including both ends.
    """

    x_left: float
    x_right: float
    n_cells: int
    boundary: Boundary = Periodic()

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ValueError("need x_left < x_right")
        if self.n_cells < 2:
            raise ValueError("need at least 2 cells")

    @property
    def spacing(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.boundary, Periodic)

    @property
    def n_nodes(self) -> int:
        return self.n_cells if self.is_periodic else self.n_cells + 1

    def nodes(self) -> np.ndarray:
        return self.x_left + self.spacing * np.arange(self.n_nodes)


@dataclass(frozen=True)
class Field:
    """Nodal values of u on a grid at one time.  Values must be finite."""

    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"values shape {vals.shape} does not match node count "
                f"{self.grid.n_nodes}"
            )
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise NonFiniteFieldError(f"non-finite value at node {bad}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def sup_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def powered(values: np.ndarray, exponent: float) -> np.ndarray:
    """values**exponent with round-off clamping for fractional exponents.

    Entries in (-NEG_CLAMP_TOL, 0) are clamped to 0 before fractional
    powering; anything more negative raises NegativeValueError naming the
    node.  Integer exponents pass through unchecked.
    """
    if exponent == 1.0:
        return values
    if float(exponent).is_integer():
        return values ** exponent
    neg = values < -NEG_CLAMP_TOL
    if np.any(neg):
        node = int(np.flatnonzero(neg)[0])
        raise NegativeValueError(node, float(values[node]), exponent)
    return np.maximum(values, 0.0) ** exponent


def rescale_to_mu(kernel: Kernel, params: ModelParams) -> tuple[Kernel, ModelParams]:
    """Trade kernel width sigma for an interaction rate mu = sigma**2.

    Input must be the width-parametrized form (mu = 1, diffusion = 1); the
    returned pair has a width-1 kernel and mu = sigma**2.
    """
    if params.diffusion == 0.0:
        raise ValueError("rescaling requires diffusion > 0")
    if params.diffusion != 1.0 or params.mu != 1.0:
        raise ValueError("rescale_to_mu expects mu = 1 and diffusion = 1")
    new_kernel = replace(kernel, sigma=1.0)
    new_params = replace(params, mu=kernel.sigma ** 2)
    return new_kernel, new_params


def rescale_to_sigma(kernel: Kernel, params: ModelParams) -> tuple[Kernel, ModelParams]:
    """Inverse of rescale_to_mu: trade mu for a kernel of width sqrt(mu)."""
    if params.diffusion == 0.0:
        raise ValueError("rescaling requires diffusion > 0")
    if params.diffusion != 1.0 or kernel.sigma != 1.0:
        raise ValueError("rescale_to_sigma expects a width-1 kernel and diffusion = 1")
    new_kernel = replace(kernel, sigma=math.sqrt(params.mu))
    new_params = replace(params, mu=1.0)
    return new_kernel, new_params


def front_initial_condition(grid: Grid1D) -> Field:
    """Front profile connecting u = 1 (left) to u = 0 (right).

    Piecewise: 1 for x <= x_l; exp(-(x-x_l)^2) on (x_l, 0];
    exp(-x_l^2) * (1 - x/x_r) on (0, x_r]; 0 beyond x_r.
    Requires x_left < 0 < x_right.
    """
    if not (grid.x_left < 0.0 < grid.x_right):
        raise ValueError("front profile needs x_left < 0 < x_right")
    x = grid.nodes()
    xl, xr = grid.x_left, grid.x_right
    vals = np.where(
        x <= xl,
        1.0,
        np.where(
            x <= 0.0,
            np.exp(-((x - xl) ** 2)),
            np.where(x <= xr, math.exp(-(xl ** 2)) * (1.0 - x / xr), 0.0),
        ),
    )
    return Field(grid, vals, 0.0)
