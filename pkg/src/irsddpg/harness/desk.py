"""Small-scale learning runs that fit on a laptop CPU, compared against RandomIRS-MRT."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from irsddpg.agents.config import AgentConfig
from irsddpg.agents.dcb import TrainingResult, run_cb_training
from irsddpg.agents.drl import run_rl_training
from irsddpg.core.channels import sample_channel_list
from irsddpg.core.system import SystemConfig
from irsddpg.harness.baselines import random_mrt_rates

DESK_SYSTEM = dict(K=2, N_t=2, N_s=1, N_r=4, N=8)
DESK_SNR_DB = 10.0
DCB_STEPS = 5000
DRL_EPISODES = 250
# the DRL curve needs well over ten points for two disjoint 10-point averages
DRL_EVAL_INTERVAL = 5


def desk_system() -> SystemConfig:
    return SystemConfig.from_snr_db(DESK_SNR_DB, **DESK_SYSTEM)


def desk_agent_config(algo: str) -> AgentConfig:
    if algo == "dcb":
        return AgentConfig(steps=DCB_STEPS, batch_size=16, lr_actor=0.001, lr_critic=0.001, explore_var=0.05)
    if algo == "drl":
        return AgentConfig(episodes=DRL_EPISODES, episode_len=20, gamma=0.99, tau=0.005, batch_size=16,
                           lr_actor=0.001, lr_critic=0.001, explore_var=0.05, eval_interval=DRL_EVAL_INTERVAL)
    raise ValueError(f"unknown algo {algo!r}")


@dataclass(repr=False)
class DeskRun:
    algo: str
    seed: int
    result: TrainingResult
    final_mean: float
    baseline_mean: float
    seconds: float

    def __repr__(self) -> str:
        return (f"DeskRun({self.algo}, seed={self.seed}, final={self.final_mean:.4f}, "
                f"baseline={self.baseline_mean:.4f}, seconds={self.seconds:.1f})")

    @property
    def margin(self) -> float:
        return self.final_mean - self.baseline_mean

    @property
    def eval_curve(self) -> np.ndarray:
        return np.array([r.mean for r in self.result.evals])

    @property
    def critic_losses(self) -> np.ndarray:
        """Per time step; ``nan`` while the buffer is still too small to train."""
        return np.array([np.nan if r.critic_loss is None else r.critic_loss for r in self.result.records])


def run_desk(algo: str, seed: int) -> DeskRun:
    cfg = desk_system()
    acfg = desk_agent_config(algo)
    eval_channels = sample_channel_list(cfg, acfg.eval_size, acfg.eval_seed)
    start = time.perf_counter()
    run = run_cb_training if algo == "dcb" else run_rl_training
    result = run(cfg, acfg, seed, eval_channels=eval_channels)
    seconds = time.perf_counter() - start
    baseline = random_mrt_rates(eval_channels, cfg, np.random.default_rng(seed))
    return DeskRun(algo, seed, result, result.final_eval.mean, float(np.mean(baseline)), seconds)


def trailing_mean(values: np.ndarray, end: int, window: int = 100) -> float:
    """Mean of ``values[end - window + 1 : end + 1]``, ignoring ``nan``."""
    return float(np.nanmean(values[max(0, end - window + 1):end + 1]))


def moving_average_trend(curve: np.ndarray, window: int = 10) -> tuple[float, float]:
    """(first, last) ``window``-point averages of an evaluation curve."""
    if curve.size < window:
        raise ValueError(f"curve has {curve.size} points, need at least {window}")
    return float(np.mean(curve[:window])), float(np.mean(curve[-window:]))
