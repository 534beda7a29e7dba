"""Descriptive statistics for a cleaned hydrology table."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .clean import iqr_outliers
from .dataset import FLOOD_THRESHOLD_CM, LEVEL, HydroTable, label_floods

MONTH_NAMES = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
WINTER = (12, 1, 2)
SUMMER = (6, 7, 8)


@dataclass
class VariableStats:
    mean: float
    minimum: float
    maximum: float
    outliers: int
    monthly_means: dict[int, float] = field(default_factory=dict)
    annual_means: dict[int, float] = field(default_factory=dict)


@dataclass
class EdaReport:
    n: int
    n_flood: int
    n_non_flood: int
    pct_flood: float
    pct_non_flood: float
    threshold_cm: float
    variables: dict[str, VariableStats]
    outlier_count: int
    span_days: float

    @property
    def class_balance(self) -> str:
        return (f"{self.n_flood} flood / {self.n_non_flood} non-flood "
                f"({self.pct_flood:.2f}% / {self.pct_non_flood:.2f}%)")

    def seasonal_contrast(self, variable: str = LEVEL) -> float | None:
        """Winter (DJF) monthly mean minus summer (JJA) monthly mean."""
        mm = self.variables[variable].monthly_means
        if not all(m in mm for m in WINTER + SUMMER):
            return None
        return float(np.mean([mm[m] for m in WINTER]) - np.mean([mm[m] for m in SUMMER]))


def class_shares(n_pos: int, n_neg: int) -> tuple[float, float]:
    """Percentages that sum to 100 (both 0 for an empty set)."""
    total = n_pos + n_neg
    if total == 0:
        return 0.0, 0.0
    pos = 100.0 * n_pos / total
    return pos, 100.0 - pos


def _grouped_means(values, keys) -> dict[int, float]:
    out = {}
    for k in np.unique(keys):
        out[int(k)] = float(values[keys == k].mean())
    return out


def eda_report(table: HydroTable, threshold_cm: float = FLOOD_THRESHOLD_CM) -> EdaReport:
    """Counts, shares, moments, outliers and seasonal means.

    Monthly means are omitted unless the table spans at least one year,
    so a short table never reports a partial seasonal cycle.
    """
    n = len(table)
    if LEVEL in table.columns:
        flags = label_floods(table[LEVEL], threshold_cm)
        n_flood = int(flags.sum())
    else:
        n_flood = 0
    n_non = n - n_flood
    pct_f, pct_n = class_shares(n_flood, n_non)
    span = 0.0
    if n > 1:
        span = float((table.timestamps[-1] - table.timestamps[0]) / np.timedelta64(1, "D"))
    seasonal = span >= 364.0
    months, years = table.months(), table.years()
    stats = {}
    for name, col in table.columns.items():
        if n == 0:
            stats[name] = VariableStats(float("nan"), float("nan"), float("nan"), 0)
            continue
        vs = VariableStats(float(col.mean()), float(col.min()), float(col.max()),
                           int(iqr_outliers(col).sum()))
        if seasonal:
            vs.monthly_means = _grouped_means(col, months)
            vs.annual_means = _grouped_means(col, years)
        stats[name] = vs
    n_out = stats[LEVEL].outliers if LEVEL in stats else 0
    return EdaReport(n, n_flood, n_non, pct_f, pct_n, float(threshold_cm), stats, n_out, span)


def render_text(report: EdaReport) -> str:
    lines = [
        "Exploratory data summary",
        f"records:            {report.n}",
        f"span (days):        {report.span_days:.0f}",
        f"flood threshold:    level > {report.threshold_cm:g} cm (strict)",
        f"flood events:       {report.n_flood} ({report.pct_flood:.2f}%)",
        f"non-flood events:   {report.n_non_flood} ({report.pct_non_flood:.2f}%)",
        f"level IQR outliers: {report.outlier_count} (flagged, retained)",
        "",
        f"{'variable':<26}{'mean':>10}{'min':>10}{'max':>10}{'outliers':>10}",
    ]
    for name, vs in report.variables.items():
        lines.append(f"{name:<26}{vs.mean:>10.2f}{vs.minimum:>10.2f}{vs.maximum:>10.2f}{vs.outliers:>10d}")
    for name, vs in report.variables.items():
        if not vs.monthly_means:
            continue
        lines += ["", f"monthly means: {name}"]
        lines += [f"  {MONTH_NAMES[m - 1]}  {v:10.2f}" for m, v in sorted(vs.monthly_means.items())]
        if vs.annual_means:
            am = list(vs.annual_means.values())
            lines.append(f"  annual mean range {min(am):.2f} .. {max(am):.2f}")
    contrast = report.seasonal_contrast() if LEVEL in report.variables else None
    if contrast is not None:
        lines += ["", f"winter minus summer level mean: {contrast:+.2f} cm"]
    return "\n".join(lines) + "\n"


def render_csv(report: EdaReport) -> str:
    """Machine-readable blocks, each introduced by a ``# name`` line."""
    buf = io.StringIO()
    buf.write("# summary\nkey,value\n")
    for k, v in (("n", report.n), ("n_flood", report.n_flood), ("n_non_flood", report.n_non_flood),
                 ("pct_flood", repr(report.pct_flood)), ("pct_non_flood", repr(report.pct_non_flood)),
                 ("threshold_cm", repr(report.threshold_cm)), ("outlier_count", report.outlier_count)):
        buf.write(f"{k},{v}\n")
    buf.write("# variables\nvariable,mean,min,max,outliers\n")
    for name, vs in report.variables.items():
        buf.write(f"{name},{vs.mean!r},{vs.minimum!r},{vs.maximum!r},{vs.outliers}\n")
    buf.write("# monthly_means\nvariable,month,mean\n")
    for name, vs in report.variables.items():
        for m, v in sorted(vs.monthly_means.items()):
            buf.write(f"{name},{m},{v!r}\n")
    buf.write("# annual_means\nvariable,year,mean\n")
    for name, vs in report.variables.items():
        for y, v in sorted(vs.annual_means.items()):
            buf.write(f"{name},{y},{v!r}\n")
    return buf.getvalue()
