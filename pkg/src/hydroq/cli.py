"""``hydroq`` command line: ingest, eda, synth, train, evaluate, benchmark, forecast.

Exit codes: 0 success, 1 runtime failure (or a benchmark model failed),
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__, modelio
from .bench.metrics import classification_metrics, regression_metrics
from .bench.models import adapter_from_state, make_model
from .bench.plots import emit_plot
from .bench.runner import DEFAULT_MODELS, ModelResult, ModelSpec, SuiteConfig, render_kv, run_benchmark
from .classical.linear import ar_forecast, fit_ar
from .errors import ConfigError, HydroQError
from .hydrodata.clean import CleanRules
from .hydrodata.dataset import LEVEL, PRECIP, build_table, chrono_split, table_to_supervised
from .hydrodata.eda import eda_report, render_csv, render_text
from .hydrodata.ingest import CsvSchema, ingest_csv, write_records_csv, write_rejects
from .hydrodata.synth import SynthCalibration, synth_generate
from .vqml import TrainConfig, fit_qar, qar_forecast

log = logging.getLogger("hydroq")

SCHEMA_VERSION = 1
CONFIG_KEYS = {"schema_version", "seed", "data", "threshold_cm", "lags", "horizon",
               "train_fraction", "models", "learning_curve", "out", "clean"}
DEFAULT_SYNTH_YEARS = 5

CONVENTIONS = """\
conventions:
  flood flag      1 iff water level > threshold (strict; exactly 90 cm is not a flood)
  split           first ceil(fraction * N) rows train, the rest test, never shuffled
  scaling         fitted on training rows only, then applied to test rows
  cleaning        gaps of <= 3 missing steps forward-filled, longer gaps dropped;
                  1.5 x IQR outliers flagged and kept
  tie-breaks      stumps and tree splits: lowest feature, then lowest threshold;
                  KNN even votes, SVM zero decisions, ensemble zero votes and
                  majority ties all go to the flood class (1)
  data            without --data (or config data.path) a calibrated synthetic
                  station is generated from the seed
  output          everything is written under --out (default $HYDROQ_OUT or ./hydroq_out)
"""


# configuration

def load_config(path: str | None) -> dict:
    """Read and validate a JSON run config; paths are checked before any work."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"config schema_version must be {SCHEMA_VERSION}")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "seed" not in cfg:
        raise ConfigError("config must set an explicit seed")
    data = cfg.get("data") or {}
    p = data.get("path")
    if p is not None:
        base = os.path.dirname(os.path.abspath(path))
        p = p if os.path.isabs(p) else os.path.join(base, p)
        if not os.path.exists(p):
            raise ConfigError(f"data path does not exist: {p}")
        data = {**data, "path": p}
        cfg = {**cfg, "data": data}
    return cfg


def _setting(args, cfg, name, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return cfg.get(name, default)


def _out_dir(args, cfg) -> str:
    out = args.out or cfg.get("out") or os.environ.get("HYDROQ_OUT") or "hydroq_out"
    os.makedirs(out, exist_ok=True)
    return out


def _seed(args, cfg) -> int:
    return int(_setting(args, cfg, "seed", 0))


def _calibration(cfg, threshold) -> SynthCalibration:
    syn = dict((cfg.get("data") or {}).get("synthetic") or {})
    syn.pop("seed", None)
    syn.setdefault("years", DEFAULT_SYNTH_YEARS)
    try:
        calib = SynthCalibration(**syn)
    except TypeError as exc:
        raise ConfigError(f"bad synthetic calibration: {exc}") from exc
    return replace(calib, threshold_cm=threshold)


def _load_table(args, cfg, threshold):
    data = cfg.get("data") or {}
    path = getattr(args, "data", None) or data.get("path")
    rules = CleanRules(**cfg.get("clean", {}))
    if path is None:
        syn_seed = (data.get("synthetic") or {}).get("seed", _seed(args, cfg))
        table = synth_generate(int(syn_seed), _calibration(cfg, threshold))
        return table, None
    schema = CsvSchema.from_dict(data.get("schema"))
    res = ingest_csv(path, schema)
    table, _ = build_table(res.records, rules, station=data.get("station"))
    return table, res


# subcommands

def cmd_ingest(args, cfg):
    out = _out_dir(args, cfg)
    path = args.data or (cfg.get("data") or {}).get("path")
    if path is None:
        raise ConfigError("ingest needs --data or data.path in the config")
    schema = CsvSchema.from_dict((cfg.get("data") or {}).get("schema"))
    res = ingest_csv(path, schema)
    table, cleaned = build_table(res.records, CleanRules(**cfg.get("clean", {})),
                                 station=(cfg.get("data") or {}).get("station"))
    table.write_csv(os.path.join(out, "cleaned.csv"))
    write_rejects(res.rejects, os.path.join(out, "rejects.csv"))
    with open(os.path.join(out, "cleaning_log.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable", "action", "timestamp", "value", "detail"])
        for var, cr in cleaned.items():
            for e in cr.log:
                w.writerow([var, e.action, e.timestamp.isoformat(), repr(e.value), e.detail])
    print(f"records: {len(res.records)} (missing {res.n_missing}), rejects: {len(res.rejects)}, "
          f"rows after cleaning and alignment: {len(table)}")
    for note in table.notes:
        print(f"  {note}")
    return 0


def cmd_synth(args, cfg):
    out = _out_dir(args, cfg)
    threshold = float(_setting(args, cfg, "threshold_cm", 90.0))
    calib = _calibration(cfg, threshold)
    if args.years is not None:
        calib = replace(calib, years=args.years)
    seed = _seed(args, cfg)
    table = synth_generate(seed, calib)
    path = os.path.join(out, "synthetic.csv")
    write_records_csv(table.to_records(), path)
    with open(os.path.join(out, "synthetic_calibration.json"), "w") as fh:
        json.dump({"seed": seed, **calib.to_dict()}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(table)} days x {len(table.columns)} variables to {path}")
    return 0


def cmd_eda(args, cfg):
    out = _out_dir(args, cfg)
    threshold = float(_setting(args, cfg, "threshold_cm", 90.0))
    table, _ = _load_table(args, cfg, threshold)
    rep = eda_report(table, threshold)
    text = render_text(rep)
    with open(os.path.join(out, "eda.txt"), "w") as fh:
        fh.write(text)
    with open(os.path.join(out, "eda.csv"), "w") as fh:
        fh.write(render_csv(rep))
    if len(table):
        days = (table.timestamps - table.timestamps[0]) / np.timedelta64(1, "D")
        emit_plot({"water level": (days, table[LEVEL])}, "line",
                  os.path.join(out, "level_timeseries.svg"), "Water level", "day", "cm")
        emit_plot({"water level": table[LEVEL]}, "histogram",
                  os.path.join(out, "level_histogram.svg"), "Water level distribution", "cm", "count")
        emit_plot({"water level": table[LEVEL]}, "boxplot",
                  os.path.join(out, "level_boxplot.svg"), "Water level", "", "cm")
        if PRECIP in table.columns:
            emit_plot({"precipitation": table[PRECIP]}, "histogram",
                      os.path.join(out, "precip_histogram.svg"), "Precipitation distribution",
                      "mm/day", "count")
    sys.stdout.write(text)
    return 0


def _split_for(task, table, args, cfg, threshold):
    lags = int(_setting(args, cfg, "lags", 7))
    horizon = int(_setting(args, cfg, "horizon", 1))
    fraction = float(_setting(args, cfg, "train_fraction", 0.8))
    target = "flood_flag" if task == "classification" else "level"
    ds = table_to_supervised(table, lags, target, horizon, threshold)
    return chrono_split(ds, fraction)


def _model_params(cfg, name):
    for m in cfg.get("models", []):
        if isinstance(m, dict) and m.get("name") == name:
            return dict(m.get("params", {}))
    return {}


def _metrics_for(model, test, seed):
    pred = model.predict(test.X)
    if model.task == "classification":
        return classification_metrics(test.y, pred, model.name, seed)
    return regression_metrics(test.y, pred, model.name, seed, task=model.task)


def cmd_train(args, cfg):
    out = _out_dir(args, cfg)
    if not args.model:
        raise ConfigError("train needs --model")
    threshold = float(_setting(args, cfg, "threshold_cm", 90.0))
    seed = _seed(args, cfg)
    table, _ = _load_table(args, cfg, threshold)
    model = make_model(args.model, _model_params(cfg, args.model), seed)
    train, test = _split_for(model.task, table, args, cfg, threshold)
    model.fit(train.X, train.y, train.feature_names)
    path = os.path.join(out, f"model_{args.model}.json")
    modelio.save_json({"adapter": model.state(), "threshold_cm": threshold,
                       "lags": int(_setting(args, cfg, "lags", 7))}, path)
    m = _metrics_for(model, test, seed)
    print(f"saved {path}")
    print(f"test rows {m.n}: " + ", ".join(f"{k}={v}" for k, v in m.to_items(timing=False)
                                            if k in ("accuracy", "balanced_accuracy", "f1", "mse", "r2")))
    return 0


def cmd_evaluate(args, cfg):
    out = _out_dir(args, cfg)
    if not args.model:
        raise ConfigError("evaluate needs --model (a name trained into --out, or a model file)")
    path = args.model if args.model.endswith(".json") else os.path.join(out, f"model_{args.model}.json")
    saved = modelio.load_json(path)
    model = adapter_from_state(saved["adapter"])
    threshold = float(_setting(args, cfg, "threshold_cm", saved.get("threshold_cm", 90.0)))
    if args.lags is None and "lags" not in cfg:
        args.lags = saved.get("lags")
    table, _ = _load_table(args, cfg, threshold)
    _, test = _split_for(model.task, table, args, cfg, threshold)
    m = _metrics_for(model, test, model.seed)
    text = render_kv(ModelResult(ModelSpec(model.name, model.params), model.task, model.table, m))
    with open(os.path.join(out, f"evaluate_{model.name}.kv"), "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0


def cmd_benchmark(args, cfg):
    out = _out_dir(args, cfg)
    threshold = float(_setting(args, cfg, "threshold_cm", 90.0))
    suite = {k: cfg[k] for k in ("models", "learning_curve", "horizon") if k in cfg}
    suite.update(seed=_seed(args, cfg), lags=int(_setting(args, cfg, "lags", 7)),
                 threshold_cm=threshold,
                 train_fraction=float(_setting(args, cfg, "train_fraction", 0.8)))
    if args.model:
        suite["models"] = [m.strip() for m in args.model.split(",") if m.strip()]
    suite.setdefault("models", list(DEFAULT_MODELS))
    config = SuiteConfig.from_dict(suite)
    table, _ = _load_table(args, cfg, threshold)
    rep = run_benchmark(config, table, out)
    with open(os.path.join(out, "report.txt")) as fh:
        sys.stdout.write(fh.read())
    failed = [r.spec.name for r in rep.results if not r.ok]
    if failed:
        print(f"failed models: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _read_series(args, cfg, threshold):
    if args.data and args.data.endswith(".txt"):
        return np.loadtxt(args.data, dtype=np.float64, ndmin=1)
    table, _ = _load_table(args, cfg, threshold)
    return table[LEVEL]


def cmd_forecast(args, cfg):
    out = _out_dir(args, cfg)
    name = args.model or "ar"
    if name not in ("ar", "qar"):
        raise ConfigError("forecast --model must be 'ar' or 'qar'")
    threshold = float(_setting(args, cfg, "threshold_cm", 90.0))
    lags = int(_setting(args, cfg, "lags", 7))
    horizon = int(args.horizon if args.horizon is not None else 7)
    series = _read_series(args, cfg, threshold)
    if name == "ar":
        model = fit_ar(series, lags)
        pred = ar_forecast(model, series, horizon)
        desc = "coefficients " + " ".join(repr(float(c)) for c in model.coefficients)
        desc += f" intercept {model.intercept!r}"
    else:
        params = _model_params(cfg, "qar")
        tc = TrainConfig(params.get("learning_rate", 0.1), params.get("iters", 100), _seed(args, cfg))
        model, hist = fit_qar(series, lags, params.get("depth", 2), tc)
        pred = qar_forecast(model, series, lags, horizon)
        desc = f"iterations {len(hist)} final cost {hist[-1]!r}"
    path = os.path.join(out, f"forecast_{name}.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "forecast", "flood_flag"])
        for h, v in enumerate(pred, start=1):
            w.writerow([h, repr(float(v)), int(v > threshold)])
    print(f"{name} lags={lags} {desc}")
    for h, v in enumerate(pred, start=1):
        print(f"t+{h}\t{v:.6f}")
    return 0


COMMANDS = {
    "ingest": (cmd_ingest, "parse a CSV export, clean it, write cleaned.csv and rejects.csv"),
    "eda": (cmd_eda, "descriptive statistics, class balance and figures"),
    "synth": (cmd_synth, "generate a calibrated synthetic station"),
    "train": (cmd_train, "fit one model on the training split and save it"),
    "evaluate": (cmd_evaluate, "load a saved model and score it on the test split"),
    "benchmark": (cmd_benchmark, "train and score the full model suite"),
    "forecast": (cmd_forecast, "multi-step level forecast with AR or QAR"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config (schema_version 1)")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")
    common.add_argument("--out", help="output directory (default $HYDROQ_OUT or ./hydroq_out)")
    common.add_argument("--data", help="input CSV (canonical timestamp,station_id,variable,value)")
    common.add_argument("--model", help="model name; benchmark takes a comma-separated list")
    common.add_argument("--lags", type=int, help="lag order p (default 7)")
    common.add_argument("--horizon", type=int, help="steps ahead (default 1; forecast default 7)")
    common.add_argument("--threshold-cm", dest="threshold_cm", type=float,
                        help="flood threshold in cm, strict > (default 90)")
    common.add_argument("--train-fraction", dest="train_fraction", type=float,
                        help="chronological training share in (0, 1) (default 0.8)")
    common.add_argument("--years", type=int, help="synth: number of years to generate")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser = argparse.ArgumentParser(
        prog="hydroq",
        description="Flood classification and forecasting benchmark over classical and "
                    "simulated quantum models.",
        epilog=CONVENTIONS + "\nmodels: " + ", ".join(DEFAULT_MODELS),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"hydroq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                       epilog=CONVENTIONS, formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command][0](args, cfg)
    except (HydroQError, OSError, ValueError) as exc:
        print(f"hydroq {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
