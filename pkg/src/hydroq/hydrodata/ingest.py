"""CSV ingestion into per-station, per-variable record streams.

The canonical layout is ``timestamp, station_id, variable, value``; other
exports are read through a :class:`CsvSchema` column mapping. German
portal exports use ``;`` separators, decimal commas and ``DD.MM.YYYY
HH:MM`` timestamps, each enabled explicitly.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, fields
from datetime import datetime

from ..errors import FormatError, IoError

log = logging.getLogger(__name__)

VARIABLES = ("water_level_cm", "precipitation_mm", "precipitation_form_code")
CANONICAL_COLUMNS = ("timestamp", "station_id", "variable", "value")
MISSING_TOKENS = {"", "nan", "na", "n/a", "null", "-", "--", "---"}
_DAYFIRST_FORMATS = ("%d.%m.%Y %H:%M", "%d.%m.%Y %H:%M:%S", "%d.%m.%Y")
MAX_REJECT_SHARE = 0.5


@dataclass(frozen=True)
class TimeSeriesRecord:
    timestamp: datetime
    station_id: str
    variable: str
    value: float  # NaN marks a missing value

    @property
    def missing(self) -> bool:
        return math.isnan(self.value)


@dataclass(frozen=True)
class CsvSchema:
    """Column mapping. ``station``/``variable`` may be ``None`` for
    single-stream files, in which case the defaults apply."""

    timestamp: str = "timestamp"
    value: str = "value"
    station: str | None = "station_id"
    variable: str | None = "variable"
    default_station: str = "station"
    default_variable: str = "water_level_cm"
    delimiter: str = ","
    decimal_comma: bool = False
    dayfirst: bool = False

    @classmethod
    def from_dict(cls, d: dict | None) -> "CsvSchema":
        if not d:
            return cls()
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise FormatError(f"unknown schema keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Reject:
    line: int
    raw: str
    reason: str


@dataclass
class IngestResult:
    records: list[TimeSeriesRecord]
    rejects: list[Reject] = field(default_factory=list)
    n_missing: int = 0
    source: str = ""

    def streams(self) -> dict[tuple[str, str], list[TimeSeriesRecord]]:
        out: dict[tuple[str, str], list[TimeSeriesRecord]] = {}
        for r in self.records:
            out.setdefault((r.station_id, r.variable), []).append(r)
        return out


def parse_timestamp(text: str, dayfirst: bool = False) -> datetime:
    text = text.strip()
    if dayfirst:
        for fmt in _DAYFIRST_FORMATS:
            try:
                return datetime.strptime(text, fmt)
            except ValueError:
                continue
        raise ValueError(f"not a DD.MM.YYYY timestamp: {text!r}")
    if text.endswith("Z"):
        text = text[:-1]
    ts = datetime.fromisoformat(text)
    return ts.replace(tzinfo=None)


def parse_value(text: str, decimal_comma: bool = False) -> float:
    t = text.strip()
    if t.lower() in MISSING_TOKENS:
        return math.nan
    if decimal_comma:
        t = t.replace(".", "").replace(",", ".")
    v = float(t)
    return v


def ingest_csv(path, schema: CsvSchema | None = None) -> IngestResult:
    """Parse ``path``; bad rows go to ``rejects`` with a reason code.

    Reason codes: ``bad_timestamp``, ``bad_value``, ``unknown_variable``,
    ``short_row``, ``duplicate_timestamp``. A second row with the same
    (station, variable, timestamp) is rejected; streams come back sorted by
    timestamp.
    """
    schema = schema or CsvSchema()
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        col = {name: i for i, name in enumerate(header)}
        needed = [schema.timestamp, schema.value]
        needed += [c for c in (schema.station, schema.variable) if c is not None]
        missing_cols = [c for c in needed if c not in col]
        if missing_cols:
            raise FormatError(f"{path}: missing columns {missing_cols}; header is {header}")
        parsed = []
        rejects = []
        n_rows = 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            n_rows += 1
            raw = schema.delimiter.join(row)
            if len(row) < len(header):
                rejects.append(Reject(lineno, raw, "short_row"))
                continue
            try:
                ts = parse_timestamp(row[col[schema.timestamp]], schema.dayfirst)
            except ValueError:
                rejects.append(Reject(lineno, raw, "bad_timestamp"))
                continue
            try:
                value = parse_value(row[col[schema.value]], schema.decimal_comma)
            except ValueError:
                rejects.append(Reject(lineno, raw, "bad_value"))
                continue
            station = row[col[schema.station]].strip() if schema.station else schema.default_station
            variable = row[col[schema.variable]].strip() if schema.variable else schema.default_variable
            if variable not in VARIABLES:
                rejects.append(Reject(lineno, raw, "unknown_variable"))
                continue
            parsed.append((lineno, raw, TimeSeriesRecord(ts, station, variable, value)))

    seen = set()
    records = []
    n_missing = 0
    for lineno, raw, rec in parsed:
        key = (rec.station_id, rec.variable, rec.timestamp)
        if key in seen:
            rejects.append(Reject(lineno, raw, "duplicate_timestamp"))
            continue
        seen.add(key)
        if rec.missing:
            n_missing += 1
            log.info("%s:%d missing value for %s at %s", path, lineno, rec.variable, rec.timestamp)
        records.append(rec)
    records.sort(key=lambda r: (r.station_id, r.variable, r.timestamp))
    rejects.sort(key=lambda r: r.line)

    if n_rows and len(rejects) > MAX_REJECT_SHARE * n_rows:
        sample = "\n".join(f"  line {r.line} [{r.reason}]: {r.raw}" for r in rejects[:3])
        raise FormatError(
            f"{path}: {len(rejects)} of {n_rows} rows rejected; check the schema mapping\n{sample}"
        )
    return IngestResult(records, rejects, n_missing, str(path))


def write_rejects(rejects, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["line", "reason", "raw"])
            for r in rejects:
                w.writerow([r.line, r.reason, r.raw])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def _fmt_value(v):
    return "NaN" if math.isnan(v) else repr(float(v))


def write_records_csv(records, path) -> None:
    """Write records in the canonical four-column layout."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CANONICAL_COLUMNS)
            for r in records:
                w.writerow([r.timestamp.isoformat(), r.station_id, r.variable, _fmt_value(r.value)])
    except OSError as exc:
        raise IoError(str(exc)) from exc
