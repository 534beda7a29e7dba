import csv
import io
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hydroq.bench.plots import boxplot_stats, emit_plot, render
from hydroq.errors import EmptyInput, IoError

SVG = "{http://www.w3.org/2000/svg}"


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_single_point_line(tmp_path):
    svg_path, csv_path = emit_plot({"level": [3.0]}, "line", tmp_path / "p.svg", "t", "x", "y")
    root = ET.parse(svg_path).getroot()
    assert len(root.findall(f"{SVG}circle")) == 1
    assert rows(open(csv_path).read()) == [["series", "x", "y"], ["level", "0.0", "3.0"]]


def test_histogram_counts():
    _, data = render({"v": [1, 1, 2]}, "histogram", bins=2)
    r = rows(data)
    assert r[0] == ["series", "bin_left", "bin_right", "count"]
    assert [int(x[3]) for x in r[1:]] == [2, 1]


def test_boxplot_whiskers_follow_iqr_rule():
    v = np.array([1.0, 2, 3, 4, 5, 6, 7, 8, 30, -20])
    s = boxplot_stats(v)
    q1, q3 = np.percentile(v, [25, 75])
    lo, hi = q1 - 1.5 * (q3 - q1), q3 + 1.5 * (q3 - q1)
    inside = v[(v >= lo) & (v <= hi)]
    assert (s["q1"], s["q3"]) == (q1, q3)
    assert s["whisker_low"] == inside.min() and s["whisker_high"] == inside.max()
    assert sorted(s["outliers"]) == sorted(v[(v < lo) | (v > hi)].tolist())
    _, data = render({"v": v}, "boxplot")
    assert sum(1 for x in rows(data) if x[1] == "outlier") == 2


def test_constant_boxplot():
    s = boxplot_stats([2.0] * 5)
    assert s["whisker_low"] == s["whisker_high"] == 2.0 and s["outliers"] == []


def test_byte_deterministic_and_labelled():
    bundle = {"a": ([0, 1, 2], [1.0, 0.5, 2.0]), "b": [2.0, 1.0, 0.0]}
    first = render(bundle, "line", "Title & more", "days", "cm")
    assert first == render(bundle, "line", "Title & more", "days", "cm")
    root = ET.fromstring(first[0])
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert "Title & more" in texts and "days" in texts and "cm" in texts
    assert "a" in texts and "b" in texts


def test_sidecar_regenerates_line_numbers():
    x = np.linspace(0, 1, 7)
    y = np.sin(x)
    _, data = render({"s": (x, y)}, "line")
    back = np.array([[float(a), float(b)] for _, a, b in rows(data)[1:]])
    np.testing.assert_array_equal(back[:, 0], x)
    np.testing.assert_array_equal(back[:, 1], y)


def test_errors(tmp_path):
    with pytest.raises(EmptyInput):
        render({}, "line")
    with pytest.raises(EmptyInput):
        render({"s": []}, "histogram")
    with pytest.raises(ValueError):
        render({"s": [1]}, "pie")
    with pytest.raises(IoError):
        emit_plot({"s": [1.0]}, "line", tmp_path / "missing" / "p.svg")
