"""Explicit a-priori sup-norm bound constants and the chained-ODE iteration bound.

The global bound M applies for Allee exponents alpha in [1, alpha_star) with

    alpha_star = 1 + beta            (dim 1, 2)
    alpha_star = 1 + 2*beta/dim      (dim > 2)

and, for small interaction rates mu, takes the explicit form

    M = K * max{1, (A/kappa)**((s-2)/(s(beta+1-alpha)-2beta)), sup u0}

with s the critical Sobolev index (infinite in dims 1 and 2, where every
s-dependent expression is replaced by its analytic limit rather than a large
plug-in value, to avoid cancellation in the exponent ratio).

The iteration bound is the closed form for chains of linear ODEs

    y_k' + c_k y_k <= c_k A_k max{1, sup y_{k-1}^2},   A_k = a_bar 2^(d k) >= 1,
    y_k(0) <= K^(2^k),

namely  y_k(t) <= (2 a_bar)^(2^(k-m+1)-1)
                  * 2^(d (2 (2^(k-m)-1) + m 2^(k-m+1) - k))
                  * max{sup y_{m-1}^(2^(k-m+1)), K^(2^k), 1}.

All doubly-exponential arithmetic is done in log2 space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class IterationOverflowError(OverflowError):
    """Bound not representable even as a double; carries its log2."""

    def __init__(self, log2_bound: float):
        self.log2_bound = log2_bound
        super().__init__(f"iteration bound overflows double; log2(bound) = {log2_bound:.6g}")


def critical_alpha(dim: int, beta: float) -> float:
    """Largest Allee exponent (exclusive) covered by the global bound."""
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    if not beta > 0.0:
        raise ValueError("beta must be positive")
    if dim <= 2:
        return 1.0 + beta
    return 1.0 + 2.0 * beta / dim


def sobolev_index(dim: int) -> float:
    """Critical Sobolev index: +inf in dims 1, 2; 2*dim/(dim-2) above."""
    if dim <= 2:
        return math.inf
    return 2.0 * dim / (dim - 2.0)


@dataclass(frozen=True)
class BoundInputs:
    dim: int
    alpha: float
    beta: float
    kappa: float
    floor_radius: float   # kernel exceeds floor_value on |x| <= floor_radius
    floor_value: float
    margin: float         # the K > 1 slack factor in M
    u0_sup: float
    sobolev_const: float = 1.0  # pluggable embedding constant; see notes

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not (self.beta > 0.0 and self.kappa > 0.0):
            raise ValueError("beta and kappa must be positive")
        if not (self.floor_radius > 0.0 and self.floor_value > 0.0):
            raise ValueError("floor_radius and floor_value must be positive")
        if not self.sobolev_const > 0.0:
            raise ValueError("sobolev_const must be positive")
        if not self.margin > 1.0:
            raise ValueError("margin K must exceed 1")
        if not self.u0_sup >= 0.0:
            raise ValueError("u0_sup must be nonnegative")
        if not 1.0 <= self.alpha < critical_alpha(self.dim, self.beta):
            raise ValueError(
                f"alpha={self.alpha} outside the bound's regime "
                f"[1, {critical_alpha(self.dim, self.beta)!r})"
            )


MU_STAR_NOTE = (
    "mu_star is an existence statement: the explicit form M holds for "
    "interaction rates mu in (0, mu_star) where mu_star depends on the "
    "iteration anchor level m and on embedding constants that are inputs "
    "here, not derived.  It is reported only when m is supplied."
)


@dataclass(frozen=True)
class BoundReport:
    alpha_star: float
    s_star: float            # +inf in dims 1, 2
    prefactor: float         # the A constant inside the max
    exponent: float          # (s-2)/(s(beta+1-alpha)-2beta), limit 1/(beta+1-alpha)
    sup_bound: float         # M
    mu_star: float | None
    mu_star_note: str
    inputs: BoundInputs


def _prefactor_and_exponent(inp: BoundInputs, s: float) -> tuple[float, float]:
    core = 4.0 * math.sqrt(2.0) * max(1.0, inp.floor_radius * inp.sobolev_const)
    if math.isinf(s):
        power = 1.0
        exponent = 1.0 / (inp.beta + 1.0 - inp.alpha)
    else:
        power = s / (s - 1.0)
        denom = s * (inp.beta + 1.0 - inp.alpha) - 2.0 * inp.beta
        if denom <= 0.0:
            raise ValueError("exponent denominator nonpositive; alpha too large for this s")
        exponent = (s - 2.0) / denom
    prefactor = 4.0 * core ** power / (inp.floor_radius ** inp.dim * inp.floor_value)
    return prefactor, exponent


def sup_bound_at_index(inp: BoundInputs, s: float) -> float:
    """M evaluated with an explicit Sobolev index s (consistency checks)."""
    prefactor, exponent = _prefactor_and_exponent(inp, s)
    return inp.margin * max(
        1.0, (prefactor / inp.kappa) ** exponent, inp.u0_sup
    )


def mu_star(inp: BoundInputs, anchor_level: int, poincare_const: float = 1.0) -> float:
    """Smallness threshold on mu for the explicit bound, given the anchor level m.

    Built from the embedding-constant chain C1 = 2 S (1 + 2 P) with
    S the Sobolev constant of the window of radius floor_radius/2 and
    P = poincare_const * (floor_radius/2); both constants are pluggable
    inputs with default 1, so the value is a relative-comparison tool.
    """
    if anchor_level < 1:
        raise ValueError("anchor level m must be >= 1")
    s = sobolev_index(inp.dim)
    delta = inp.floor_radius / 2.0
    w = 2.0 * delta
    if math.isinf(s):
        s_emb = math.sqrt(2.0) * max(
            w ** (-inp.dim / 2.0),
            w ** (1.0 - inp.dim / 2.0) * inp.sobolev_const,
        )
        h = 2.0 * (inp.alpha - 1.0)
    else:
        s_emb = math.sqrt(2.0) * max(
            w ** (inp.dim * (1.0 / s - 0.5)),
            w ** (1.0 - inp.dim / 2.0 + inp.dim / s) * inp.sobolev_const,
        )
        h = 2.0 * (s - 1.0) * (inp.alpha - 1.0) / (s - 2.0)
    c1 = 2.0 * s_emb * (1.0 + 2.0 * poincare_const * delta)
    return 1.0 / (2.0 * c1 ** 2 * (2.0 ** (anchor_level - 1) + h) ** 2)


def sup_bound(inp: BoundInputs, anchor_level: int | None = None,
              poincare_const: float = 1.0) -> BoundReport:
    """Explicit sup-norm bound report; dims 1 and 2 use the analytic limits."""
    s = sobolev_index(inp.dim)
    prefactor, exponent = _prefactor_and_exponent(inp, s)
    m_val = inp.margin * max(1.0, (prefactor / inp.kappa) ** exponent, inp.u0_sup)
    mu_val = None
    if anchor_level is not None:
        mu_val = mu_star(inp, anchor_level, poincare_const)
    return BoundReport(
        alpha_star=critical_alpha(inp.dim, inp.beta),
        s_star=s,
        prefactor=prefactor,
        exponent=exponent,
        sup_bound=m_val,
        mu_star=mu_val,
        mu_star_note=MU_STAR_NOTE,
        inputs=inp,
    )


@dataclass(frozen=True)
class IterationProblem:
    """Data of one ODE chain: rates c[k] (absolute level index), the A_k
    envelope a_bar * 2^(growth_rate * k), the initial-data root K with
    y_k(0) <= K^(2^k), the anchor level m, and sup of the anchor function."""

    rates: tuple[float, ...]
    a_bar: float
    growth_rate: float      # the D in A_k = a_bar 2^(D k)
    init_root: float        # the K in y_k(0) <= K^(2^k)
    anchor_level: int       # m
    anchor_sup: float       # sup_t y_{m-1}(t)

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(c) for c in self.rates))
        if any(c <= 0.0 for c in self.rates):
            raise ValueError("all rates c_k must be positive")
        if not (self.a_bar > 0.0 and self.growth_rate > 0.0):
            raise ValueError("a_bar and growth_rate must be positive")
        if not self.init_root > 0.0:
            raise ValueError("init_root K must be positive")
        if self.anchor_level < 1:
            raise ValueError("anchor level m must be >= 1")
        if not self.anchor_sup >= 0.0:
            raise ValueError("anchor_sup must be nonnegative")

    def envelope(self, k: int) -> float:
        return self.a_bar * 2.0 ** (self.growth_rate * k)

    def check_envelope(self) -> None:
        """Domination requires A_k >= 1 for k >= m (A_k increases in k)."""
        if self.envelope(self.anchor_level) < 1.0:
            raise ValueError("need A_k = a_bar 2^(D k) >= 1 for k >= m")

    def rate(self, k: int) -> float:
        if k >= len(self.rates):
            raise ValueError(f"no rate supplied for level {k}")
        return self.rates[k]


def iteration_bound_log2(problem: IterationProblem, k: int) -> float:
    """log2 of the closed-form bound for sup_t y_k(t)."""
    m = problem.anchor_level
    if k < m:
        raise ValueError("bound defined for k >= anchor level m")
    span = k - m
    lead = (2.0 ** (span + 1) - 1.0) * math.log2(2.0 * problem.a_bar)
    # exponent of the 2^D(...) factor: 2(2^(k-m)-1) + m 2^(k-m+1) - k,
    # the closed form of sum_{i=0}^{k-m} (k-i) 2^i
    geom = problem.growth_rate * (
        2.0 * (2.0 ** span - 1.0) + m * 2.0 ** (span + 1) - k
    )
    terms = [0.0, 2.0 ** k * math.log2(problem.init_root)]
    if problem.anchor_sup > 0.0:
        terms.append(2.0 ** (span + 1) * math.log2(problem.anchor_sup))
    return lead + geom + max(terms)


def iteration_bound(problem: IterationProblem, k: int) -> float:
    """Closed-form upper bound for sup_t y_k(t); raises with the log2 value
    when not representable as a double."""
    l2 = iteration_bound_log2(problem, k)
    if l2 >= 1024.0:
        raise IterationOverflowError(l2)
    return 2.0 ** l2


def integrate_chain(problem: IterationProblem, k_max: int, t_max: float,
                    min_steps: int = 400) -> list[dict]:
    """RK4 oracle: integrate the chained ODEs with equality RHS.

    Each level solves y' = c_k (B_k - y), B_k = A_k max{1, sup y_{k-1}^2},
    from y(0) = K^(2^k), feeding sup over the computed trajectory forward.
    Returns one record per level with the trajectory and its sup.
    """
    if k_max < problem.anchor_level:
        raise ValueError("k_max below anchor level")
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    problem.check_envelope()
    out = []
    sup_prev = problem.anchor_sup
    for k in range(problem.anchor_level, k_max + 1):
        c = problem.rate(k)
        target = problem.envelope(k) * max(1.0, sup_prev ** 2)
        n_steps = max(min_steps, int(math.ceil(20.0 * c * t_max)))
        dt = t_max / n_steps
        y = np.empty(n_steps + 1)
        y[0] = problem.init_root ** (2.0 ** k)
        yi = y[0]
        for i in range(n_steps):
            k1 = c * (target - yi)
            k2 = c * (target - (yi + 0.5 * dt * k1))
            k3 = c * (target - (yi + 0.5 * dt * k2))
            k4 = c * (target - (yi + dt * k3))
            yi = yi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            y[i + 1] = yi
        sup_prev = float(np.max(y))
        out.append({
            "level": k,
            "times": np.linspace(0.0, t_max, n_steps + 1),
            "values": y,
            "sup": sup_prev,
        })
    return out


@dataclass(frozen=True)
class ChainCheck:
    passed: bool
    worst_ratio: float
    worst_level: int
    worst_time: float
    level_ratios: tuple[float, ...]
    violations: tuple[tuple[int, float, float], ...]  # (level, time, ratio)


def check_iteration_bound(problem: IterationProblem, k_max: int, t_max: float,
                          rtol: float = 1e-9) -> ChainCheck:
    """Integrate the chain and compare every level against the closed form."""
    levels = integrate_chain(problem, k_max, t_max)
    ratios = []
    violations = []
    worst = (-math.inf, problem.anchor_level, 0.0)
    for rec in levels:
        bound_l2 = iteration_bound_log2(problem, rec["level"])
        sup = rec["sup"]
        ratio = 0.0 if sup == 0.0 else 2.0 ** (math.log2(sup) - bound_l2)
        ratios.append(ratio)
        t_at = float(rec["times"][int(np.argmax(rec["values"]))])
        if ratio > worst[0]:
            worst = (ratio, rec["level"], t_at)
        if ratio > 1.0 + rtol:
            violations.append((rec["level"], t_at, ratio))
    return ChainCheck(
        passed=not violations,
        worst_ratio=worst[0],
        worst_level=worst[1],
        worst_time=worst[2],
        level_ratios=tuple(ratios),
        violations=tuple(violations),
    )
