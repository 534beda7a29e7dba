"""Hydrology data pipeline: ingest, clean, label, scale, split, window, describe."""

from .clean import CleanEvent, CleanResult, CleanRules, clean_series, iqr_bounds, iqr_outliers
from .dataset import (
    FLOOD_THRESHOLD_CM,
    HydroDataset,
    HydroTable,
    Scaler,
    build_supervised,
    build_table,
    chrono_split,
    label_floods,
    normalize,
    table_to_supervised,
)
from .eda import EdaReport, class_shares, eda_report, render_csv, render_text
from .ingest import CsvSchema, IngestResult, Reject, TimeSeriesRecord, ingest_csv
from .synth import SynthCalibration, synth_generate

__all__ = [
    "FLOOD_THRESHOLD_CM",
    "CleanEvent",
    "CleanResult",
    "CleanRules",
    "CsvSchema",
    "EdaReport",
    "HydroDataset",
    "HydroTable",
    "IngestResult",
    "Reject",
    "Scaler",
    "SynthCalibration",
    "TimeSeriesRecord",
    "build_supervised",
    "build_table",
    "chrono_split",
    "class_shares",
    "clean_series",
    "eda_report",
    "ingest_csv",
    "iqr_bounds",
    "iqr_outliers",
    "label_floods",
    "normalize",
    "render_csv",
    "render_text",
    "synth_generate",
    "table_to_supervised",
]
