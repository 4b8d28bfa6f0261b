"""Deterministic artifact writers: NDJSON snapshots, summary/profile CSVs.

All floating-point output uses 17 significant digits so files round-trip
and identical configs produce bit-identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import Field, Grid1D
from .solver import RunOutcome


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_snapshots_ndjson(path, snapshots) -> None:
    lines = []
    for s in snapshots:
        vals = ",".join(fmt(v) for v in s.values)
        lines.append('{"t":%s,"values":[%s]}' % (fmt(s.time), vals))
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshots_ndjson(path, grid: Grid1D) -> list[Field]:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(Field(grid, np.asarray(rec["values"], dtype=float),
                         float(rec["t"])))
    return out


def write_summary_csv(path, outcome: RunOutcome) -> None:
    rows = ["t,sup_u,inf_u,dt"]
    for t, sup, inf, dt in zip(outcome.history_t, outcome.history_sup,
                               outcome.history_inf, outcome.history_dt):
        rows.append(f"{fmt(t)},{fmt(sup)},{fmt(inf)},{fmt(dt)}")
    Path(path).write_text("\n".join(rows) + "\n")


def write_profiles_csv(path, grid: Grid1D, profiles: dict[float, np.ndarray]) -> None:
    """Plot-ready columns: x plus one u column per display time."""
    times = sorted(profiles)
    header = "x," + ",".join(f"u_t={fmt(t)}" for t in times)
    x = grid.nodes()
    rows = [header]
    for i in range(len(x)):
        rows.append(fmt(x[i]) + "," + ",".join(fmt(profiles[t][i]) for t in times))
    Path(path).write_text("\n".join(rows) + "\n")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def status_payload(outcome: RunOutcome) -> dict:
    from .solver import BlowUpDetected, CompletedBounded, DtUnderflow

    st = outcome.status
    if isinstance(st, CompletedBounded):
        return {"status": "completed_bounded"}
    if isinstance(st, BlowUpDetected):
        return {"status": "blow_up", "time": st.time, "location": st.location}
    if isinstance(st, DtUnderflow):
        return {"status": "dt_underflow", "time": st.time}
    raise TypeError(f"unknown status {st!r}")
