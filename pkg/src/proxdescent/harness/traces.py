"""Fixed-schema CSV traces.

One row per outer iteration.  The header is versioned by its exact column
list; all floats are written with repr-precision so a re-run reproduces the
file byte for byte (wall_time_ms is the one column excluded from that
guarantee).  For prox_descent rows f_value is the value at the new iterate
(the point carrying the certificate); baseline rows record the value at the
current center.  Columns that an algorithm does not produce stay empty.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

TRACE_HEADER = (
    "experiment_id,algorithm,outer_index,cumulative_evaluations,f_value,"
    "gtilde_norm_sq,epsilon,inner_count,stationarity_proxy,wall_time_ms"
)


@dataclass
class TraceRow:
    experiment_id: str
    algorithm: str
    outer_index: int
    cumulative_evaluations: int
    f_value: float
    gtilde_norm_sq: Optional[float]
    epsilon: Optional[float]
    inner_count: int
    stationarity_proxy: float
    wall_time_ms: float


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{float(value):.17g}"


def write_trace(path, rows: List[TraceRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER.split(","))
        for r in rows:
            writer.writerow(
                [
                    r.experiment_id,
                    r.algorithm,
                    r.outer_index,
                    r.cumulative_evaluations,
                    _fmt(r.f_value),
                    _fmt(r.gtilde_norm_sq),
                    _fmt(r.epsilon),
                    r.inner_count,
                    _fmt(r.stationarity_proxy),
                    f"{r.wall_time_ms:.3f}",
                ]
            )
    return path


def read_trace(path) -> List[TraceRow]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"trace file {path} does not exist")
    rows: List[TraceRow] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER.split(","):
            raise ValueError(f"{path} does not carry the expected trace header")
        for rec in reader:
            rows.append(
                TraceRow(
                    experiment_id=rec[0],
                    algorithm=rec[1],
                    outer_index=int(rec[2]),
                    cumulative_evaluations=int(rec[3]),
                    f_value=float(rec[4]),
                    gtilde_norm_sq=float(rec[5]) if rec[5] else None,
                    epsilon=float(rec[6]) if rec[6] else None,
                    inner_count=int(rec[7]),
                    stationarity_proxy=float(rec[8]),
                    wall_time_ms=float(rec[9]),
                )
            )
    if not rows:
        raise ValueError(f"trace file {path} contains no data rows")
    return rows
