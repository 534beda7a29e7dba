"""Aligned tables, flood labels, scaling, chronological splits and lag windows."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigError, DimMismatch, EmptyInput, InsufficientHistory, IoError
from .clean import CleanRules, clean_series

log = logging.getLogger(__name__)

FLOOD_THRESHOLD_CM = 90.0
SCALER_MODES = ("minmax_0_pi", "zscore", "minmax_0_1")
LEVEL = "water_level_cm"
PRECIP = "precipitation_mm"
FORM = "precipitation_form_code"


def label_floods(levels, threshold_cm: float = FLOOD_THRESHOLD_CM) -> np.ndarray:
    """1 where ``level > threshold_cm`` (strict), else 0."""
    lv = np.asarray(levels, dtype=np.float64)
    return (lv > threshold_cm).astype(np.int64)


@dataclass
class HydroTable:
    """Time-aligned columns for one station; timestamps are ``datetime64[s]``."""

    timestamps: np.ndarray
    columns: dict[str, np.ndarray]
    station_id: str = "station"
    outliers: dict[str, np.ndarray] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        n = self.timestamps.shape[0]
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=np.float64)
            if col.shape != (n,):
                raise DimMismatch(f"column {name!r} has shape {col.shape}, expected ({n},)")
            self.columns[name] = col

    def __len__(self) -> int:
        return int(self.timestamps.shape[0])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def months(self) -> np.ndarray:
        return self.timestamps.astype("datetime64[M]").astype(np.int64) % 12 + 1

    def years(self) -> np.ndarray:
        return self.timestamps.astype("datetime64[Y]").astype(np.int64) + 1970

    def slice(self, start: int, stop: int) -> "HydroTable":
        return HydroTable(
            self.timestamps[start:stop],
            {k: v[start:stop].copy() for k, v in self.columns.items()},
            self.station_id,
            {k: v[start:stop].copy() for k, v in self.outliers.items()},
            list(self.notes),
        )

    def to_records(self):
        from .ingest import TimeSeriesRecord

        out = []
        stamps = self.timestamps.astype("datetime64[s]").tolist()
        for name, col in self.columns.items():
            out.extend(
                TimeSeriesRecord(t, self.station_id, name, float(v)) for t, v in zip(stamps, col)
            )
        return out

    def write_csv(self, path) -> None:
        names = list(self.columns)
        try:
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["timestamp", *names])
                for i, t in enumerate(self.timestamps.astype("datetime64[s]").tolist()):
                    w.writerow([t.isoformat(), *(repr(float(self.columns[c][i])) for c in names)])
        except OSError as exc:
            raise IoError(str(exc)) from exc


def build_table(records, rules: CleanRules | None = None, station: str | None = None,
                variables=None) -> tuple[HydroTable, dict]:
    """Clean each stream and inner-join them on timestamp.

    Returns the table and a ``{variable: CleanResult}`` map with the logs.
    """
    records = list(records)
    if not records:
        raise EmptyInput("no records")
    stations = sorted({r.station_id for r in records})
    if station is None:
        if len(stations) > 1:
            log.warning("several stations present %s; using %s", stations, stations[0])
        station = stations[0]
    streams: dict[str, list] = {}
    for r in records:
        if r.station_id == station and (variables is None or r.variable in variables):
            streams.setdefault(r.variable, []).append(r)
    if not streams:
        raise EmptyInput(f"no records for station {station!r}")
    results = {var: clean_series(recs, rules) for var, recs in streams.items()}
    order = [v for v in (LEVEL, PRECIP, FORM) if v in results]
    common = None
    for var in order:
        ts = {r.timestamp for r in results[var].records}
        common = ts if common is None else common & ts
    stamps = sorted(common)
    columns, outliers = {}, {}
    for var in order:
        res = results[var]
        pos = {r.timestamp: k for k, r in enumerate(res.records)}
        idx = np.array([pos[t] for t in stamps], dtype=np.int64)
        columns[var] = res.values[idx] if idx.size else np.empty(0)
        outliers[var] = res.outliers[idx] if idx.size else np.empty(0, dtype=bool)
    notes = [
        f"{var}: filled={results[var].count('fill')} dropped={results[var].count('drop')} "
        f"outliers={results[var].count('outlier')}"
        for var in order
    ]
    table = HydroTable(np.array(stamps, dtype="datetime64[s]"), columns, station, outliers, notes)
    return table, results


@dataclass
class HydroDataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    timestamps: np.ndarray
    task: str = "classification"  # or "regression"
    target_name: str = "flood_flag"
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.y = np.asarray(self.y)
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        n = self.X.shape[0]
        if self.y.shape[0] != n or self.timestamps.shape[0] != n:
            raise DimMismatch("X, y and timestamps must have equal length")
        if len(self.feature_names) != self.X.shape[1]:
            raise DimMismatch("feature_names does not match X columns")

    def __len__(self) -> int:
        return int(self.X.shape[0])

    def take(self, idx) -> "HydroDataset":
        return replace(self, X=self.X[idx], y=self.y[idx], timestamps=self.timestamps[idx],
                       notes=list(self.notes))

    def with_features(self, X) -> "HydroDataset":
        return replace(self, X=np.asarray(X, dtype=np.float64), notes=list(self.notes))


@dataclass
class Scaler:
    """Per-column affine map ``(x - shift) / width * span``.

    Zero-width columns map to 0 and invert to their constant. ``clip``
    restricts transformed values to the fitted range so unseen extremes
    cannot leave ``[0, pi]`` ahead of a feature map.
    """

    mode: str
    shift: np.ndarray
    width: np.ndarray
    clip: bool = False

    @property
    def span(self) -> float:
        return {"minmax_0_pi": math.pi, "minmax_0_1": 1.0, "zscore": 1.0}[self.mode]

    @classmethod
    def fit(cls, X, mode: str = "minmax_0_pi", clip: bool | None = None) -> "Scaler":
        if mode not in SCALER_MODES:
            raise ConfigError(f"unknown scaler mode {mode!r}; choose from {SCALER_MODES}")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] == 0:
            raise EmptyInput("cannot fit a scaler on zero rows")
        if not np.isfinite(X).all():
            raise ValueError("scaler input must be finite")
        if mode == "zscore":
            shift, width = X.mean(axis=0), X.std(axis=0)
        else:
            shift = X.min(axis=0)
            width = X.max(axis=0) - shift
        flat = np.flatnonzero(width == 0.0)
        if flat.size:
            log.warning("columns %s have zero spread; they scale to 0", flat.tolist())
        if clip is None:
            clip = mode == "minmax_0_pi"
        return cls(mode, shift, width, clip)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        one_d = X.ndim == 1
        X = X.reshape(-1, 1) if one_d else X
        if X.shape[1] != self.shift.shape[0]:
            raise DimMismatch(f"scaler fitted on {self.shift.shape[0]} columns, got {X.shape[1]}")
        safe = np.where(self.width == 0.0, 1.0, self.width)
        with np.errstate(over="ignore"):  # extreme test rows may map to +/-inf
            out = (X - self.shift) / safe * self.span
        out[:, self.width == 0.0] = 0.0
        if self.clip:
            np.clip(out, 0.0, self.span, out=out)
        return out.reshape(-1) if one_d else out

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        one_d = Z.ndim == 1
        Z = Z.reshape(-1, 1) if one_d else Z
        out = Z / self.span * self.width + self.shift
        return out.reshape(-1) if one_d else out


def normalize(train: HydroDataset, test: HydroDataset | None = None, mode: str = "minmax_0_pi"):
    """Fit on ``train`` only and apply to both; returns ``(train, test, scaler)``."""
    scaler = Scaler.fit(train.X, mode)
    tr = train.with_features(scaler.transform(train.X))
    tr.notes.append(f"scaled {mode} on {len(train)} training rows")
    te = None
    if test is not None:
        te = test.with_features(scaler.transform(test.X))
        te.notes.append(f"scaled {mode} with training statistics")
    return tr, te, scaler


def chrono_split(dataset: HydroDataset, train_fraction: float = 0.8):
    """First ``ceil(fraction * N)`` rows train, the rest test, never shuffled."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    ts = dataset.timestamps
    if ts.shape[0] > 1 and not (ts[1:] > ts[:-1]).all():
        raise ConfigError("timestamps must be strictly increasing before splitting")
    n = len(dataset)
    n_train = min(n, math.ceil(train_fraction * n - 1e-9))
    return dataset.take(slice(0, n_train)), dataset.take(slice(n_train, n))


def build_supervised(series, lags: int = 7, horizon: int = 1, target: str = "level",
                     timestamps=None, exog: dict | None = None,
                     threshold_cm: float = FLOOD_THRESHOLD_CM, name: str = "level") -> HydroDataset:
    """Lag windows: row ``t`` holds ``[y_{t-p}, ..., y_{t-1}]`` and targets
    ``y_{t+horizon-1}`` (or its flood flag). Exogenous columns enter at ``t-1``.
    """
    y = np.asarray(series, dtype=np.float64).reshape(-1)
    if lags < 1 or horizon < 1:
        raise ConfigError("lags and horizon must be >= 1")
    if target not in ("level", "flood_flag"):
        raise ConfigError(f"unknown target {target!r}")
    n = y.shape[0]
    n_rows = n - lags - horizon + 1
    if n_rows < 1:
        raise InsufficientHistory(f"{n} values cannot form a window of {lags} lags, horizon {horizon}")
    if timestamps is None:
        timestamps = np.arange(n).astype("datetime64[D]")
    timestamps = np.asarray(timestamps, dtype="datetime64[s]")
    rows = np.arange(lags, lags + n_rows)
    X = np.stack([y[rows - lags + k] for k in range(lags)], axis=1)
    names = [f"{name}_lag{lags - k}" for k in range(lags)]
    for col_name, col in (exog or {}).items():
        col = np.asarray(col, dtype=np.float64).reshape(-1)
        if col.shape[0] != n:
            raise DimMismatch(f"exogenous column {col_name!r} has length {col.shape[0]}, expected {n}")
        X = np.column_stack([X, col[rows - 1]])
        names.append(f"{col_name}_lag1")
    out_t = rows + horizon - 1
    tgt = y[out_t]
    if target == "flood_flag":
        tgt = label_floods(tgt, threshold_cm)
        task, tname = "classification", "flood_flag"
    else:
        task, tname = "regression", name
    return HydroDataset(X, tgt, names, timestamps[out_t], task, tname,
                        [f"lags={lags} horizon={horizon} target={target}"])


def table_to_supervised(table: HydroTable, lags: int = 7, target: str = "flood_flag",
                        horizon: int = 1, threshold_cm: float = FLOOD_THRESHOLD_CM,
                        exog=(PRECIP,)) -> HydroDataset:
    """Windows over the level column with exogenous columns at ``t-1``."""
    ex = {c: table[c] for c in exog if c in table.columns}
    ds = build_supervised(table[LEVEL], lags, horizon, target, table.timestamps, ex,
                          threshold_cm, name=LEVEL)
    ds.notes = list(table.notes) + ds.notes
    return ds


def flood_mask(table: HydroTable, threshold_cm: float = FLOOD_THRESHOLD_CM) -> np.ndarray:
    return label_floods(table[LEVEL], threshold_cm).astype(bool)


__all__ = [
    "FLOOD_THRESHOLD_CM",
    "HydroDataset",
    "HydroTable",
    "Scaler",
    "build_supervised",
    "build_table",
    "chrono_split",
    "flood_mask",
    "label_floods",
    "normalize",
    "table_to_supervised",
]
