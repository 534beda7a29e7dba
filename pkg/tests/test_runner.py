import csv
import io

import pytest

from hydroq.bench.runner import (INCONSISTENCY_NOTE, TIMING_COLUMN, ModelSpec, SuiteConfig,
                                 render_csv, render_kv, render_text, run_benchmark)
from hydroq.errors import ConfigError
from hydroq.hydrodata.synth import SynthCalibration, synth_generate


@pytest.fixture(scope="module")
def table():
    return synth_generate(0, SynthCalibration(years=5))


def _without_timing(rep):
    rows = list(csv.reader(io.StringIO(render_csv(rep))))
    k = rows[0].index(TIMING_COLUMN)
    kv = ["".join(l for l in render_kv(r).splitlines(True) if not l.startswith(TIMING_COLUMN))
          for r in rep.results]
    return [r[:k] + r[k + 1:] for r in rows], kv, render_text(rep)


def test_empty_suite(tmp_path, table):
    rep = run_benchmark(SuiteConfig(models=(), seed=0), table, tmp_path)
    assert rep.ok and rep.results == []
    text = (tmp_path / "report.txt").read_text()
    assert "no models configured" in text and INCONSISTENCY_NOTE in text


def test_baselines_on_synthetic(table):
    rep = run_benchmark(SuiteConfig(models=(ModelSpec("majority"), ModelSpec("all_positive")), seed=0), table)
    maj = rep.result("majority").metrics
    assert abs(100 * maj.accuracy - 94.22) <= 0.5
    assert maj.accuracy == pytest.approx(1 - rep.test_flood_share)
    pos = rep.result("all_positive").metrics
    assert pos.recall == 1.0 and pos.balanced_accuracy == pytest.approx(0.5, abs=0.01)


def test_repeat_runs_identical_without_timing(table):
    cfg = SuiteConfig(models=(ModelSpec("svm"), ModelSpec("qboost", {"sweeps": 200})), seed=4)
    a = _without_timing(run_benchmark(cfg, table))
    b = _without_timing(run_benchmark(cfg, table))
    assert a == b


def test_failing_model_recorded(tmp_path, table):
    cfg = SuiteConfig(models=(ModelSpec("majority"), ModelSpec("no_such_model")), seed=0)
    rep = run_benchmark(cfg, table, tmp_path)
    assert not rep.ok
    assert rep.result("majority").ok and not rep.result("no_such_model").ok
    assert "FAILED" in (tmp_path / "report.txt").read_text()
    assert "status=failed" in (tmp_path / "models" / "no_such_model.kv").read_text()


def test_report_files(tmp_path, table):
    cfg = SuiteConfig.from_dict({"seed": 1, "models": ["tree", {"name": "vqc", "params": {"iters": 3}}],
                                 "learning_curve": {"model": "tree", "k_folds": 2}})
    rep = run_benchmark(cfg, table, tmp_path)
    assert rep.ok
    names = {p.split("/")[-1] for p in rep.files}
    assert {"report.txt", "metrics.csv", "tree.kv", "vqc.kv", "vqc_cost.csv", "learning_curve.csv",
            "learning_curve_plot.svg", "learning_curve_plot.csv"} <= names
    header = (tmp_path / "metrics.csv").read_text().splitlines()[0].split(",")
    assert header[-1] == TIMING_COLUMN
    assert (tmp_path / "models" / "tree.kv").read_text().splitlines()[-1].startswith(TIMING_COLUMN)
    assert TIMING_COLUMN + "=" not in (tmp_path / "report.txt").read_text()
    assert len((tmp_path / "models" / "vqc_cost.csv").read_text().splitlines()) == 4


def test_config_errors():
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"models": []})
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"seed": 0, "colour": "red"})
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"seed": 0, "models": [{"name": "svm", "weird": 1}]})
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"seed": 0, "models": [3]})
