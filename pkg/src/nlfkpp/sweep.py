"""Parameter sweeps: status tables over a value grid and bisection for the
smallest value that triggers blow-up.  Runs are independent and fan out over
a thread pool capped by the NLFKPP_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .config import ConfigError, ExperimentConfig
from .solver import BlowUpDetected, CompletedBounded, DtUnderflow, run

SWEEPABLE = ("alpha", "beta", "mu", "kappa", "diffusion", "kernel.sigma")


def max_workers() -> int:
    env = os.environ.get("NLFKPP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def set_param(cfg: ExperimentConfig, path: str, value: float) -> ExperimentConfig:
    if path in ("alpha", "beta", "mu", "kappa", "diffusion"):
        return replace(cfg, params=replace(cfg.params, **{path: value}))
    if path == "kernel.sigma":
        return replace(cfg, kernel=replace(cfg.kernel, sigma=value))
    raise ConfigError(f"unsupported sweep parameter {path!r}; "
                      f"one of {', '.join(SWEEPABLE)}")


def classify(outcome) -> str:
    if isinstance(outcome.status, CompletedBounded):
        return "bounded"
    if isinstance(outcome.status, BlowUpDetected):
        return "blow_up"
    if isinstance(outcome.status, DtUnderflow):
        # numerical breakdown; grouped with blow-up for threshold purposes
        return "dt_underflow"
    raise TypeError(f"unknown status {outcome.status!r}")


def _run_value(cfg: ExperimentConfig, path: str, value: float) -> str:
    sub = set_param(cfg, path, value)
    outcome = run(sub.build_initial(), sub.params, sub.kernel, sub.solver)
    return classify(outcome)


@dataclass(frozen=True)
class ScanResult:
    param: str
    table: tuple[tuple[float, str], ...]


def scan(cfg: ExperimentConfig, param: str, values) -> ScanResult:
    values = list(values)
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        statuses = list(pool.map(lambda v: _run_value(cfg, param, v), values))
    return ScanResult(param=param, table=tuple(zip(values, statuses)))


@dataclass(frozen=True)
class BisectionResult:
    param: str
    found: bool
    threshold: float | None   # smallest value observed to blow up
    last_bounded: float | None
    note: str
    runs: tuple[tuple[float, str], ...]


def bisect(cfg: ExperimentConfig, param: str, lo: float, hi: float,
           tol: float = 0.05) -> BisectionResult:
    """Locate the smallest value in [lo, hi] triggering blow-up before t_end.

    Requires a bounded run at lo and blow-up at hi; otherwise reports
    "threshold outside range" with the endpoint statuses.
    """
    if not lo < hi:
        raise ConfigError("bisection needs lo < hi")
    if not tol > 0.0:
        raise ConfigError("bisection tolerance must be positive")
    runs = []
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        st_lo, st_hi = pool.map(lambda v: _run_value(cfg, param, v), (lo, hi))
    runs += [(lo, st_lo), (hi, st_hi)]
    blows = {"blow_up", "dt_underflow"}
    if st_lo in blows or st_hi == "bounded":
        return BisectionResult(
            param=param, found=False, threshold=None, last_bounded=None,
            note=(f"threshold outside range: status at {param}={lo:g} is "
                  f"{st_lo}, at {param}={hi:g} is {st_hi}"),
            runs=tuple(runs),
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        st = _run_value(cfg, param, mid)
        runs.append((mid, st))
        if st in blows:
            hi = mid
        else:
            lo = mid
    return BisectionResult(
        param=param, found=True, threshold=hi, last_bounded=lo,
        note="", runs=tuple(runs),
    )
