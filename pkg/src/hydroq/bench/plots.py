"""Deterministic SVG figures with a sidecar CSV of the plotted numbers."""

from __future__ import annotations

import csv
import io
from xml.sax.saxutils import escape

import numpy as np

from ..errors import EmptyInput, IoError
from ..hydrodata.clean import iqr_bounds

KINDS = ("line", "histogram", "boxplot")
WIDTH, HEIGHT = 640, 400
MARGIN = {"left": 70, "right": 150, "top": 40, "bottom": 50}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.4g}"


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x0, self.x1 = self.x0 - 0.5, self.x0 + 0.5
        if self.y1 <= self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y0 + 0.5
        self.w = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(self, x):
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        return MARGIN["top"] + (1.0 - (y - self.y0) / (self.y1 - self.y0)) * self.h


def boxplot_stats(values) -> dict:
    """Quartiles, whiskers at the most extreme points inside the 1.5 x IQR
    fences, and the points outside them."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0], method="linear")
    fences = iqr_bounds(v)
    if fences is None:
        inside, outliers = v, v[:0]
    else:
        lo, hi = fences
        mask = (v >= lo) & (v <= hi)
        inside, outliers = v[mask], v[~mask]
    return {"q1": float(q1), "median": float(med), "q3": float(q3),
            "whisker_low": float(inside.min()), "whisker_high": float(inside.max()),
            "outliers": outliers.tolist()}


def _axes(fr: _Frame, title, xlabel, ylabel, xticks=True):
    out = [f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    l, t = MARGIN["left"], MARGIN["top"]
    out.append(f'<rect x="{l}" y="{t}" width="{fr.w}" height="{fr.h}" fill="none" stroke="black"/>')
    for k in range(5):
        yv = fr.y0 + (fr.y1 - fr.y0) * k / 4
        y = fr.py(yv)
        out.append(f'<line x1="{l - 4}" y1="{_f(y)}" x2="{l}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{l - 6}" y="{_f(y + 4)}" font-size="11" text-anchor="end">{_tick(yv)}</text>')
        if xticks:
            xv = fr.x0 + (fr.x1 - fr.x0) * k / 4
            x = fr.px(xv)
            yb = t + fr.h
            out.append(f'<line x1="{_f(x)}" y1="{yb}" x2="{_f(x)}" y2="{yb + 4}" stroke="black"/>')
            out.append(f'<text x="{_f(x)}" y="{yb + 17}" font-size="11" text-anchor="middle">{_tick(xv)}</text>')
    out.append(f'<text x="{WIDTH / 2 - MARGIN["right"] / 2}" y="22" font-size="14" '
               f'text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{l + fr.w / 2}" y="{HEIGHT - 10}" font-size="12" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{t + fr.h / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {t + fr.h / 2})">{escape(ylabel)}</text>')
    return out


def _legend(names):
    out = []
    x = WIDTH - MARGIN["right"] + 12
    for i, name in enumerate(names):
        y = MARGIN["top"] + 12 + 18 * i
        c = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="10" fill="{c}"/>')
        out.append(f'<text x="{x + 18}" y="{y}" font-size="11">{escape(str(name))}</text>')
    return out


def _norm_bundle(bundle, kind):
    if not bundle:
        raise EmptyInput("nothing to plot")
    out = {}
    for name, data in bundle.items():
        if kind == "line":
            if isinstance(data, tuple):
                x, y = (np.asarray(a, dtype=np.float64).reshape(-1) for a in data)
            else:
                y = np.asarray(data, dtype=np.float64).reshape(-1)
                x = np.arange(y.shape[0], dtype=np.float64)
            if x.shape != y.shape:
                raise ValueError(f"series {name!r}: x and y lengths differ")
            data = (x, y)
            size = y.size
        else:
            data = np.asarray(data, dtype=np.float64).reshape(-1)
            size = data.size
        if size == 0:
            raise EmptyInput(f"series {name!r} is empty")
        out[str(name)] = data
    return out


def render(bundle, kind, title="", xlabel="", ylabel="", bins: int = 20):
    """Return ``(svg_text, csv_text)``."""
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {KINDS}")
    bundle = _norm_bundle(bundle, kind)
    rows = []
    body = []
    if kind == "line":
        xs = np.concatenate([d[0] for d in bundle.values()])
        ys = np.concatenate([d[1] for d in bundle.values()])
        fr = _Frame((xs.min(), xs.max()), (ys.min(), ys.max()))
        header = ["series", "x", "y"]
        for i, (name, (x, y)) in enumerate(bundle.items()):
            c = PALETTE[i % len(PALETTE)]
            pts = " ".join(f"{_f(fr.px(a))},{_f(fr.py(b))}" for a, b in zip(x, y))
            if x.size == 1:
                body.append(f'<circle cx="{_f(fr.px(x[0]))}" cy="{_f(fr.py(y[0]))}" r="3" fill="{c}"/>')
            else:
                body.append(f'<polyline points="{pts}" fill="none" stroke="{c}" stroke-width="1"/>')
            rows += [[name, repr(float(a)), repr(float(b))] for a, b in zip(x, y)]
    elif kind == "histogram":
        allv = np.concatenate(list(bundle.values()))
        edges = np.histogram_bin_edges(allv, bins=bins)
        counts = {n: np.histogram(v, bins=edges)[0] for n, v in bundle.items()}
        top = max(int(c.max()) for c in counts.values())
        fr = _Frame((edges[0], edges[-1]), (0.0, float(top)))
        header = ["series", "bin_left", "bin_right", "count"]
        k = len(bundle)
        for i, (name, cnt) in enumerate(counts.items()):
            c = PALETTE[i % len(PALETTE)]
            for j in range(cnt.size):
                x0, x1 = fr.px(edges[j]), fr.px(edges[j + 1])
                bw = (x1 - x0) / k
                y = fr.py(float(cnt[j]))
                body.append(f'<rect x="{_f(x0 + i * bw)}" y="{_f(y)}" width="{_f(bw)}" '
                            f'height="{_f(fr.py(0.0) - y)}" fill="{c}" stroke="black" stroke-width="0.5"/>')
                rows.append([name, repr(float(edges[j])), repr(float(edges[j + 1])), str(int(cnt[j]))])
    else:
        stats = {n: boxplot_stats(v) for n, v in bundle.items()}
        lo = min(min([s["whisker_low"]] + s["outliers"]) for s in stats.values())
        hi = max(max([s["whisker_high"]] + s["outliers"]) for s in stats.values())
        fr = _Frame((0.0, float(len(stats))), (lo, hi))
        header = ["series", "stat", "value"]
        for i, (name, s) in enumerate(stats.items()):
            c = PALETTE[i % len(PALETTE)]
            cx = fr.px(i + 0.5)
            half = fr.w / len(stats) * 0.25
            body.append(f'<rect x="{_f(cx - half)}" y="{_f(fr.py(s["q3"]))}" width="{_f(2 * half)}" '
                        f'height="{_f(fr.py(s["q1"]) - fr.py(s["q3"]))}" fill="{c}" fill-opacity="0.4" stroke="{c}"/>')
            body.append(f'<line x1="{_f(cx - half)}" y1="{_f(fr.py(s["median"]))}" x2="{_f(cx + half)}" '
                        f'y2="{_f(fr.py(s["median"]))}" stroke="black" stroke-width="2"/>')
            for a, b in (("q1", "whisker_low"), ("q3", "whisker_high")):
                body.append(f'<line x1="{_f(cx)}" y1="{_f(fr.py(s[a]))}" x2="{_f(cx)}" '
                            f'y2="{_f(fr.py(s[b]))}" stroke="{c}"/>')
                body.append(f'<line x1="{_f(cx - half / 2)}" y1="{_f(fr.py(s[b]))}" x2="{_f(cx + half / 2)}" '
                            f'y2="{_f(fr.py(s[b]))}" stroke="{c}"/>')
            for o in s["outliers"]:
                body.append(f'<circle cx="{_f(cx)}" cy="{_f(fr.py(o))}" r="2" fill="none" stroke="{c}"/>')
            for key in ("q1", "median", "q3", "whisker_low", "whisker_high"):
                rows.append([name, key, repr(s[key])])
            rows += [[name, "outlier", repr(float(o))] for o in s["outliers"]]
    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}">']
    parts += _axes(fr, title, xlabel, ylabel, xticks=kind != "boxplot")
    if kind == "boxplot":
        for i, name in enumerate(bundle):
            parts.append(f'<text x="{_f(fr.px(i + 0.5))}" y="{MARGIN["top"] + fr.h + 17}" '
                         f'font-size="11" text-anchor="middle">{escape(name)}</text>')
    parts += body
    parts += _legend(bundle)
    parts.append("</svg>")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return "\n".join(parts) + "\n", buf.getvalue()


def emit_plot(bundle, kind, path, title="", xlabel="", ylabel="", bins: int = 20) -> tuple[str, str]:
    """Write ``path`` (SVG) and ``path`` with a ``.csv`` suffix; returns both paths."""
    svg, data = render(bundle, kind, title, xlabel, ylabel, bins)
    path = str(path)
    csv_path = (path[:-4] if path.endswith(".svg") else path) + ".csv"
    try:
        with open(path, "w", newline="") as fh:
            fh.write(svg)
        with open(csv_path, "w", newline="") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return path, csv_path
