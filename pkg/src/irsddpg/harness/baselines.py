"""The RandomIRS-MRT reference point: random phases at the IRS, MRT precoders at the users."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from irsddpg.core.channels import sample_channels
from irsddpg.core.feasibility import mrt_precoder, random_irs
from irsddpg.core.rates import sum_rate_value
from irsddpg.core.system import ChannelSet, SystemConfig


@dataclass(frozen=True)
class BaselineSummary:
    mean: float
    std: float
    per_realization: np.ndarray

    @property
    def n(self) -> int:
        return self.per_realization.size


def random_mrt_rates(channels: list[ChannelSet], cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Sum-rate of RandomIRS-MRT on each given realization (one fresh phase draw per realization)."""
    rates = np.empty(len(channels))
    for i, ch in enumerate(channels):
        irs = random_irs(rng, cfg.N)
        rates[i] = sum_rate_value(ch, irs, mrt_precoder(ch, irs, cfg.omega, cfg.N_s), cfg.noise_var)
    return rates


def summarize(rates) -> BaselineSummary:
    rates = np.asarray(rates, dtype=float)
    return BaselineSummary(float(np.mean(rates)), float(np.std(rates)), rates)


def run_baseline_random_mrt(cfg: SystemConfig, n_realizations: int, rng: np.random.Generator,
                            channels: list[ChannelSet] | None = None) -> BaselineSummary:
    """Mean and std of the RandomIRS-MRT sum-rate.

    Channels are drawn from ``rng`` unless a fixed list is supplied, in which
    case ``n_realizations`` must equal its length.
    """
    if channels is None:
        channels = [sample_channels(cfg, rng) for _ in range(n_realizations)]
    elif len(channels) != n_realizations:
        raise ValueError(f"{len(channels)} channels supplied for {n_realizations} realizations")
    return summarize(random_mrt_rates(channels, cfg, rng))
