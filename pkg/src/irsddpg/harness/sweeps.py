"""Parameter sweeps over SNR, BS antenna count and IRS phase resolution."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from irsddpg.agents.dcb import run_cb_training
from irsddpg.agents.drl import run_rl_training
from irsddpg.agents.encoding import decode_cb_action, encode_cb_state
from irsddpg.core.channels import sample_channel_list
from irsddpg.core.feasibility import quantize_phases
from irsddpg.core.rates import sum_rate_value
from irsddpg.core.system import ChannelSet, SystemConfig
from irsddpg.harness.baselines import run_baseline_random_mrt
from irsddpg.harness.config import ExperimentConfig
from irsddpg.neural import Network

# N_r / (K N_s) below this is treated as "much smaller than one"
CRITICAL_RATIO = 0.5


def regime_label(n_r: int, K: int, N_s: int) -> str:
    ratio = n_r / (K * N_s)
    if ratio < CRITICAL_RATIO:
        return "critical"
    if ratio < 1.0:
        return "intermediate"
    return "favorable"


def evaluate_algo(exp: ExperimentConfig, cfg: SystemConfig, algo: str, seed: int,
                  eval_channels: list[ChannelSet] | None = None) -> tuple[float, float]:
    """Train (or, for ``random_mrt``, just run) ``algo`` on ``cfg`` and score it on the held-out set."""
    acfg = exp.agent()
    if eval_channels is None:
        eval_channels = sample_channel_list(cfg, acfg.eval_size, acfg.eval_seed)
    if algo == "random_mrt":
        summary = run_baseline_random_mrt(cfg, len(eval_channels), np.random.default_rng(seed), eval_channels)
        return summary.mean, summary.std
    if algo == "dcb":
        result = run_cb_training(cfg, acfg, seed, eval_channels=eval_channels)
    elif algo == "drl":
        result = run_rl_training(cfg, acfg, seed, eval_channels=eval_channels)
    else:
        raise ValueError(f"unknown algo {algo!r}")
    return result.best_eval.mean, result.best_eval.std


def read_reference_csv(path) -> dict[float, float]:
    """An externally produced ``snr_db,sum_rate`` curve, keyed by SNR."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"snr_db", "sum_rate"} <= set(reader.fieldnames or ()):
            raise ValueError(f"{path}: expected columns snr_db,sum_rate")
        return {float(row["snr_db"]): float(row["sum_rate"]) for row in reader}


def run_snr_sweep(exp: ExperimentConfig, algo: str, snr_db: Sequence[float] | None = None, seed: int | None = None,
                  reference: dict[float, float] | None = None) -> list[dict]:
    """One row per requested SNR point, in request order."""
    seed = exp.seed if seed is None else seed
    rows = []
    for snr in (exp.snr_list if snr_db is None else snr_db):
        cfg = exp.system(snr_db=float(snr))
        mean, std = evaluate_algo(exp, cfg, algo, seed)
        row = {"snr_db": float(snr), "omega": cfg.omega, "algo": algo, "mean": mean, "std": std}
        if reference is not None:
            row["reference"] = reference.get(float(snr))
        rows.append(row)
    return rows


def run_nr_sweep(exp: ExperimentConfig, algo: str, n_r: Sequence[int] | None = None, seed: int | None = None,
                 snr_db: float = 10.0) -> list[dict]:
    seed = exp.seed if seed is None else seed
    rows = []
    for nr in (exp.nr_list if n_r is None else n_r):
        cfg = exp.system(N_r=int(nr), snr_db=snr_db)
        mean, std = evaluate_algo(exp, cfg, algo, seed)
        rows.append({
            "n_r": int(nr), "ratio": nr / (cfg.K * cfg.N_s), "regime": regime_label(nr, cfg.K, cfg.N_s),
            "algo": algo, "mean": mean, "std": std,
        })
    return rows


def quantization_rates(actor: Network, cfg: SystemConfig, eval_channels: list[ChannelSet],
                       levels: Iterable[int]) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Continuous and per-L sum-rates of a bandit policy; the precoders stay as the policy emits them."""
    actions = actor(np.stack([encode_cb_state(ch) for ch in eval_channels]))
    decoded = [decode_cb_action(a, cfg) for a in actions]
    cont = np.array([sum_rate_value(ch, irs, pre, cfg.noise_var) for ch, (pre, irs) in zip(eval_channels, decoded)])
    quant = {}
    for L in levels:
        quant[int(L)] = np.array([
            sum_rate_value(ch, quantize_phases(irs, L), pre, cfg.noise_var)
            for ch, (pre, irs) in zip(eval_channels, decoded)
        ])
    return cont, quant


def run_quantization_sweep(actor: Network, cfg: SystemConfig, levels: Sequence[int],
                           eval_channels: list[ChannelSet]) -> list[dict]:
    """Mean sum-rate per phase resolution and its relative loss against the continuous phases."""
    cont, quant = quantization_rates(actor, cfg, eval_channels, levels)
    base = float(np.mean(cont))
    rows = []
    for L in levels:
        mean = float(np.mean(quant[int(L)]))
        rows.append({"levels": int(L), "mean": mean, "continuous": base, "degradation": (base - mean) / base})
    return rows


def write_table(rows: list[dict], path) -> Path:
    path = Path(path)
    fields = list(rows[0]) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else (format(v, ".17g") if isinstance(v, float) else v)
                             for k, v in row.items()})
    return path
