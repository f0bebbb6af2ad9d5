"""Experiment plumbing: configuration, metrics files, baselines, sweeps and the CLI."""

from irsddpg.harness.baselines import BaselineSummary, random_mrt_rates, run_baseline_random_mrt
from irsddpg.harness.config import ExperimentConfig, load_config, parse_config
from irsddpg.harness.metrics import MetricsWriter, emit_metrics, normalize_curve, normalized_path, read_metrics
from irsddpg.harness.sweeps import (
    quantization_rates,
    read_reference_csv,
    regime_label,
    run_nr_sweep,
    run_quantization_sweep,
    run_snr_sweep,
    write_table,
)

__all__ = [
    "BaselineSummary",
    "ExperimentConfig",
    "MetricsWriter",
    "emit_metrics",
    "load_config",
    "normalize_curve",
    "normalized_path",
    "parse_config",
    "quantization_rates",
    "random_mrt_rates",
    "read_metrics",
    "read_reference_csv",
    "regime_label",
    "run_baseline_random_mrt",
    "run_nr_sweep",
    "run_quantization_sweep",
    "run_snr_sweep",
    "write_table",
]
