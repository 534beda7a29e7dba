"""Gap filling and IQR outlier flagging for a single record stream.

Outliers are flagged and kept: in a flood series the extremes are the
events of interest. Cleaning is idempotent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta

import numpy as np

from ..errors import ConfigError, EmptyInput
from .ingest import TimeSeriesRecord


@dataclass(frozen=True)
class CleanRules:
    """``max_gap`` consecutive missing steps are forward-filled; longer runs
    are dropped. ``step`` is the nominal sampling interval (inferred as the
    median spacing when ``None``) used to detect absent timestamps."""

    max_gap: int = 3
    iqr_factor: float = 1.5
    step: timedelta | None = None
    fill_absent: bool = True

    def __post_init__(self):
        if self.max_gap < 0:
            raise ConfigError("max_gap must be >= 0")
        if self.iqr_factor <= 0:
            raise ConfigError("iqr_factor must be positive")


@dataclass(frozen=True)
class CleanEvent:
    action: str  # fill | drop | outlier
    timestamp: datetime
    value: float
    detail: str = ""


@dataclass
class CleanResult:
    records: list[TimeSeriesRecord]
    outliers: np.ndarray
    log: list[CleanEvent] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=np.float64)

    @property
    def timestamps(self) -> list[datetime]:
        return [r.timestamp for r in self.records]

    def count(self, action: str) -> int:
        return sum(1 for e in self.log if e.action == action)


def iqr_bounds(values, factor: float = 1.5) -> tuple[float, float] | None:
    """Boxplot fences with linearly interpolated quartiles; ``None`` if IQR is 0."""
    v = np.asarray(values, dtype=np.float64)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return None
    q1, q3 = np.percentile(v, [25.0, 75.0], method="linear")
    iqr = q3 - q1
    if iqr == 0.0:
        return None
    return float(q1 - factor * iqr), float(q3 + factor * iqr)


def iqr_outliers(values, factor: float = 1.5) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    bounds = iqr_bounds(v, factor)
    if bounds is None:
        return np.zeros(v.shape, dtype=bool)
    lo, hi = bounds
    return (v < lo) | (v > hi)


def _infer_step(timestamps) -> timedelta | None:
    if len(timestamps) < 2:
        return None
    diffs = sorted(b - a for a, b in zip(timestamps, timestamps[1:]))
    return diffs[len(diffs) // 2]


def _regularize(records, step, max_gap, log):
    """Insert missing-valued records for absent timestamps of short gaps."""
    out = [records[0]]
    for prev, cur in zip(records, records[1:]):
        gap = cur.timestamp - prev.timestamp
        n_absent = int(round(gap / step)) - 1
        if 0 < n_absent <= max_gap and prev.timestamp + (n_absent + 1) * step == cur.timestamp:
            for k in range(1, n_absent + 1):
                out.append(replace(prev, timestamp=prev.timestamp + k * step, value=math.nan))
        out.append(cur)
    return out


def clean_series(records, rules: CleanRules | None = None) -> CleanResult:
    """Forward-fill short missing runs, drop long ones, flag IQR outliers.

    Leading missing values have nothing to carry forward and are dropped.
    """
    rules = rules or CleanRules()
    records = list(records)
    if not records:
        raise EmptyInput("cannot clean an empty stream")
    keys = {(r.station_id, r.variable) for r in records}
    if len(keys) > 1:
        raise ValueError(f"clean_series expects one stream, got {sorted(keys)}")
    records.sort(key=lambda r: r.timestamp)
    log: list[CleanEvent] = []
    if rules.fill_absent:
        step = rules.step or _infer_step([r.timestamp for r in records])
        if step is not None and step > timedelta(0):
            records = _regularize(records, step, rules.max_gap, log)

    kept: list[TimeSeriesRecord] = []
    i, n = 0, len(records)
    while i < n:
        if not records[i].missing:
            kept.append(records[i])
            i += 1
            continue
        j = i
        while j < n and records[j].missing:
            j += 1
        run = records[i:j]
        if kept and len(run) <= rules.max_gap:
            fill = kept[-1].value
            for r in run:
                kept.append(replace(r, value=fill))
                log.append(CleanEvent("fill", r.timestamp, fill, f"gap of {len(run)}"))
        else:
            why = "leading gap" if not kept else f"gap of {len(run)} > {rules.max_gap}"
            for r in run:
                log.append(CleanEvent("drop", r.timestamp, math.nan, why))
        i = j

    values = np.array([r.value for r in kept], dtype=np.float64)
    flags = iqr_outliers(values, rules.iqr_factor)
    for k in np.flatnonzero(flags):
        log.append(CleanEvent("outlier", kept[k].timestamp, float(values[k]), "outside 1.5 IQR fences"))
    return CleanResult(kept, flags, log)
