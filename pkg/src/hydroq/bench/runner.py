"""Benchmark suite: train every configured model, evaluate on the
chronological test split, and write text, CSV and per-model reports.

Only ``training_time_s`` varies between identical runs; it is the last
column of ``metrics.csv`` and the last key of each per-model file, and
the text report leaves it out.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, IoError
from ..hydrodata.dataset import FLOOD_THRESHOLD_CM, HydroTable, chrono_split, table_to_supervised
from .curves import learning_curve
from .metrics import MetricsReport, classification_metrics, regression_metrics
from .models import make_model
from .plots import emit_plot

log = logging.getLogger(__name__)

TIMING_COLUMN = "training_time_s"
INCONSISTENCY_NOTE = (
    "Note on the published SVM row: the confusion matrix [[243, 0], [0, 32]] has no errors, so "
    "accuracy, precision, recall and balanced accuracy are all exactly 1.0 (275/275). The "
    "accompanying accuracy of 99.8% cannot come from any 275-row matrix (274/275 = 99.64%). "
    "Metrics in this report are always derived from the confusion counts."
)

DEFAULT_MODELS = (
    "majority", "all_positive", "svm", "knn", "linear", "forest_regressor", "gbrt", "ar",
    "adaboost", "tree", "forest", "qboost", "qboost_plus", "qsvc", "vqc", "vqr", "qar",
)

TITLES = {
    "majority": "Majority-class baseline",
    "all_positive": "All-positive baseline",
    "svm": "SVM (binary classification)",
    "knn": "KNN (binary classification)",
    "linear": "Linear regression (level)",
    "forest_regressor": "Random forest regression (level)",
    "gbrt": "Gradient boosting regression (level)",
    "ar": "AR model (one-step level forecast)",
    "adaboost": "AdaBoost (binary classification)",
    "tree": "Decision tree (binary classification)",
    "forest": "Random forest (binary classification)",
    "qboost": "QBoost (binary classification)",
    "qboost_plus": "QBoostPlus (binary classification)",
    "qsvc": "Quantum-kernel SVC (binary classification)",
    "vqc": "Variational classifier (binary classification)",
    "vqr": "Variational regression (level)",
    "qar": "Quantum AR model (one-step level forecast)",
}


@dataclass(frozen=True)
class ModelSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SuiteConfig:
    models: tuple = tuple(ModelSpec(m) for m in DEFAULT_MODELS)
    seed: int = 0
    lags: int = 7
    horizon: int = 1
    threshold_cm: float = FLOOD_THRESHOLD_CM
    train_fraction: float = 0.8
    learning_curve: dict | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteConfig":
        known = {"models", "seed", "lags", "horizon", "threshold_cm", "train_fraction",
                 "learning_curve"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown benchmark keys: {sorted(unknown)}")
        kw = dict(d)
        if "models" in kw:
            specs = []
            for m in kw["models"]:
                if isinstance(m, str):
                    specs.append(ModelSpec(m))
                elif isinstance(m, dict) and "name" in m:
                    extra = set(m) - {"name", "params"}
                    if extra:
                        raise ConfigError(f"model entry has unknown keys {sorted(extra)}")
                    specs.append(ModelSpec(m["name"], dict(m.get("params", {}))))
                else:
                    raise ConfigError(f"bad model entry {m!r}")
            kw["models"] = tuple(specs)
        if "seed" not in d:
            raise ConfigError("benchmark config needs an explicit seed")
        return cls(**kw)


@dataclass
class ModelResult:
    spec: ModelSpec
    task: str = ""
    table: int = 0
    metrics: MetricsReport | None = None
    error: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class BenchmarkReport:
    config: SuiteConfig
    results: list[ModelResult]
    n_rows: int = 0
    n_train: int = 0
    n_test: int = 0
    test_flood_share: float = float("nan")
    curve: list | None = None
    files: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def result(self, name: str) -> ModelResult:
        for r in self.results:
            if r.spec.name == name:
                return r
        raise KeyError(name)


def _datasets(table: HydroTable, cfg: SuiteConfig):
    out = {}
    for task, target in (("classification", "flood_flag"), ("regression", "level")):
        ds = table_to_supervised(table, cfg.lags, target, cfg.horizon, cfg.threshold_cm)
        out[task] = chrono_split(ds, cfg.train_fraction)
    out["forecast"] = out["regression"]
    return out


def _run_one(spec: ModelSpec, data, seed: int) -> ModelResult:
    res = ModelResult(spec)
    try:
        model = make_model(spec.name, spec.params, seed)
        res.task, res.table = model.task, model.table
        train, test = data[model.task]
        t0 = time.perf_counter()
        model.fit(train.X, train.y, train.feature_names)
        elapsed = time.perf_counter() - t0
        pred = model.predict(test.X)
        if model.task == "classification":
            m = classification_metrics(test.y, pred, spec.name, seed)
        else:
            m = regression_metrics(test.y, pred, spec.name, seed, task=model.task)
        m.training_time_s = elapsed
        res.metrics = m
        res.extras = dict(model.extras)
        res.extras.pop("train_X", None)
        res.extras.pop("train_y", None)
    except Exception as exc:  # one failing model must not sink the suite
        log.exception("model %s failed", spec.name)
        res.error = f"{type(exc).__name__}: {exc}"
    return res


def run_benchmark(config: SuiteConfig, table: HydroTable, out_dir=None) -> BenchmarkReport:
    """Train and score every configured model; write reports when ``out_dir`` is set."""
    rep = BenchmarkReport(config, [])
    if config.models:
        data = _datasets(table, config)
        train, test = data["classification"]
        rep.n_rows, rep.n_train, rep.n_test = len(train) + len(test), len(train), len(test)
        rep.test_flood_share = float(np.mean(test.y)) if len(test) else float("nan")
        rep.results = [_run_one(spec, data, config.seed) for spec in config.models]
        lc = config.learning_curve
        if lc:
            name = lc.get("model", "svm")
            params = lc.get("params", {})
            rep.curve = learning_curve(lambda s: make_model(name, params, s), train,
                                       lc.get("fractions", (0.25, 0.5, 0.75, 1.0)),
                                       lc.get("k_folds", 3), config.seed)
    if out_dir is not None:
        write_reports(rep, out_dir)
    return rep


# rendering

def _pct(v):
    return f"{100.0 * v:.2f}%"


def _block(r: ModelResult) -> list[str]:
    title = TITLES.get(r.spec.name, r.spec.name)
    lines = [f"{title} [{r.spec.name}]"]
    if not r.ok:
        return lines + [f"  FAILED: {r.error}"]
    m = r.metrics
    if r.task == "classification":
        label_mse = (m.fp + m.fn) / m.n
        lines += [
            f"  {'Accuracy':<28}{_pct(m.accuracy)}",
            f"  {'Confusion Matrix':<28}[[{m.tn}, {m.fp}], [{m.fn}, {m.tp}]]",
            f"  {'True Positives (TP)':<28}{m.tp}",
            f"  {'True Negatives (TN)':<28}{m.tn}",
            f"  {'False Positives (FP)':<28}{m.fp}",
            f"  {'False Negatives (FN)':<28}{m.fn}",
            f"  {'Precision':<28}{m.precision:.4f}",
            f"  {'Recall':<28}{m.recall:.4f}",
            f"  {'F1-score':<28}{m.f1:.4f}",
            f"  {'Balanced Accuracy':<28}{m.balanced_accuracy:.4f}",
            f"  {'MSE of 0/1 labels':<28}{label_mse:.4f}",
        ]
    else:
        lines += [
            f"  {'Mean Absolute Error (MAE)':<28}{m.mae:.4f}",
            f"  {'Mean Squared Error (MSE)':<28}{m.mse:.4f}",
            f"  {'R-squared':<28}{m.r2:.4f}",
        ]
    hist = r.extras.get("cost_history")
    if hist is not None and len(hist):
        lines += [f"  {'Iterations':<28}{len(hist)}", f"  {'Cost (last iteration)':<28}{hist[-1]:.4f}"]
    if "validation_accuracy" in r.extras:
        lines.append(f"  {'Validation accuracy':<28}{_pct(r.extras['validation_accuracy'])}")
    if m.flags:
        lines.append(f"  {'Flags':<28}{', '.join(m.flags)}")
    return lines


def render_text(rep: BenchmarkReport) -> str:
    cfg = rep.config
    out = [
        "Benchmark report",
        f"split: {rep.n_rows} rows, {rep.n_train} train / {rep.n_test} test (chronological)",
        f"lags {cfg.lags}, horizon {cfg.horizon}, flood = level > {cfg.threshold_cm:g} cm, seed {cfg.seed}",
    ]
    if rep.n_test:
        out.append(f"test flood share: {_pct(rep.test_flood_share)}")
    out.append(f"training times: column {TIMING_COLUMN} of metrics.csv")
    sections = (
        (0, "Baselines"),
        (1, "Classical models"),
        (2, "Ensemble and quantum models"),
    )
    for table, heading in sections:
        rows = [r for r in rep.results if r.table == table]
        if not rows:
            continue
        out += ["", heading, "-" * len(heading)]
        for r in rows:
            out += _block(r)
    if not rep.results:
        out += ["", "no models configured"]
    if rep.curve:
        out += ["", "Learning curve (chronological folds)",
                f"{'n_train':>8}{'train':>10}{'+/-':>8}{'cv':>10}{'+/-':>8}"]
        out += [f"{p.n_train:>8}{p.train_mean:>10.4f}{p.train_std:>8.4f}{p.cv_mean:>10.4f}{p.cv_std:>8.4f}"
                for p in rep.curve]
    out += ["", INCONSISTENCY_NOTE]
    return "\n".join(out) + "\n"


METRIC_COLUMNS = ("model", "task", "status", "n", "tp", "tn", "fp", "fn", "accuracy", "precision",
                  "recall", "f1", "balanced_accuracy", "mae", "mse", "r2", "flags", TIMING_COLUMN)


def render_csv(rep: BenchmarkReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for r in rep.results:
        if not r.ok:
            w.writerow([r.spec.name, r.task, "failed"] + [""] * (len(METRIC_COLUMNS) - 3))
            continue
        items = dict(r.metrics.to_items())
        w.writerow([r.spec.name, r.task, "ok"] + [items[c] for c in METRIC_COLUMNS[3:]])
    return buf.getvalue()


def render_kv(r: ModelResult) -> str:
    lines = [f"model={r.spec.name}", f"status={'ok' if r.ok else 'failed'}"]
    lines += [f"param.{k}={v!r}" for k, v in sorted(r.spec.params.items())]
    if not r.ok:
        lines.append(f"error={r.error}")
        return "\n".join(lines) + "\n"
    for k, v in sorted(r.extras.items()):
        if isinstance(v, (bool, int, float, str)):
            lines.append(f"extra.{k}={v!r}" if isinstance(v, float) else f"extra.{k}={v}")
    hist = r.extras.get("cost_history")
    if hist is not None:
        lines.append(f"extra.iterations={len(hist)}")
    items = r.metrics.to_items()
    lines += [f"{k}={v}" for k, v in items if k != TIMING_COLUMN]
    lines.append(f"{TIMING_COLUMN}={r.metrics.training_time_s!r}")
    return "\n".join(lines) + "\n"


def _write(path, text, files):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    files.append(str(path))


def write_reports(rep: BenchmarkReport, out_dir) -> list[str]:
    out_dir = str(out_dir)
    model_dir = os.path.join(out_dir, "models")
    try:
        os.makedirs(model_dir, exist_ok=True)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    files: list[str] = []
    _write(os.path.join(out_dir, "report.txt"), render_text(rep), files)
    _write(os.path.join(out_dir, "metrics.csv"), render_csv(rep), files)
    for r in rep.results:
        _write(os.path.join(model_dir, f"{r.spec.name}.kv"), render_kv(r), files)
        hist = r.extras.get("cost_history")
        if hist is not None:
            text = "iter,cost\n" + "".join(f"{k},{float(c)!r}\n" for k, c in enumerate(hist))
            _write(os.path.join(model_dir, f"{r.spec.name}_cost.csv"), text, files)
    if rep.curve:
        text = "fraction,n_train,train_mean,train_std,cv_mean,cv_std,n_folds\n" + "".join(
            f"{p.fraction!r},{p.n_train},{p.train_mean!r},{p.train_std!r},{p.cv_mean!r},{p.cv_std!r},{p.n_folds}\n"
            for p in rep.curve)
        _write(os.path.join(out_dir, "learning_curve.csv"), text, files)
        n = [p.n_train for p in rep.curve]
        svg, data = emit_plot({"train": (n, [p.train_mean for p in rep.curve]),
                               "cross-validation": (n, [p.cv_mean for p in rep.curve])},
                              "line", os.path.join(out_dir, "learning_curve_plot.svg"),
                              "Learning curve", "training rows", "score")
        files += [svg, data]
    rep.files = files
    return files
