"""Metrics, learning curves, figures and the benchmark suite runner."""

from .curves import CurvePoint, learning_curve
from .metrics import MetricsReport, classification_metrics, metrics_from_confusion, regression_metrics
from .models import REGISTRY, Adapter, make_model
from .plots import boxplot_stats, emit_plot
from .runner import BenchmarkReport, ModelSpec, SuiteConfig, run_benchmark

__all__ = [
    "REGISTRY",
    "Adapter",
    "BenchmarkReport",
    "CurvePoint",
    "MetricsReport",
    "ModelSpec",
    "SuiteConfig",
    "boxplot_stats",
    "classification_metrics",
    "emit_plot",
    "learning_curve",
    "make_model",
    "metrics_from_confusion",
    "regression_metrics",
    "run_benchmark",
]
