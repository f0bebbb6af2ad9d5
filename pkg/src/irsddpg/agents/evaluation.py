"""Noise-free policy evaluation over a fixed held-out set of channel realizations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from irsddpg.agents.encoding import decode_cb_action, encode_cb_state, encode_rl_state, rl_apply_action, rl_reward
from irsddpg.core.feasibility import random_irs, random_precoders
from irsddpg.core.rates import sum_rate_value
from irsddpg.core.system import ChannelSet, IrsPhaseVector, PrecoderSet, SystemConfig
from irsddpg.neural import Network

# episode starts for DRL evaluation; fixed so that evaluations are comparable
DEFAULT_START_SEED = 7_700_001


@dataclass
class EvalReport:
    mean: float
    std: float
    per_realization: np.ndarray
    index: int | None = None
    initial: np.ndarray | None = None
    reward_sums: np.ndarray | None = None


@dataclass
class Episode:
    """One DRL trajectory: ``rates[t]`` is the sum-rate before step ``t`` (``rates[-1]`` is final)."""

    states: list[np.ndarray] = field(default_factory=list)
    actions: list[np.ndarray] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    rates: list[float] = field(default_factory=list)
    precoders: list[PrecoderSet] = field(default_factory=list)
    irs: list[IrsPhaseVector] = field(default_factory=list)

    @property
    def reward_sum(self) -> float:
        return math.fsum(self.rewards)


def _report(values, index=None, **extra) -> EvalReport:
    values = np.asarray(values, dtype=float)
    return EvalReport(float(np.mean(values)), float(np.std(values)), values, index, **extra)


def episode_starts(cfg: SystemConfig, n: int, seed: int = DEFAULT_START_SEED) -> list[tuple[PrecoderSet, IrsPhaseVector]]:
    rng = np.random.default_rng(seed)
    return [(random_precoders(rng, cfg.K, cfg.N_t, cfg.N_s, cfg.omega), random_irs(rng, cfg.N)) for _ in range(n)]


def run_rl_episodes(actor: Network, channels: list[ChannelSet], starts, cfg: SystemConfig, steps: int,
                    keep_trajectory: bool = False) -> list[Episode]:
    """Deterministic episodes for many realizations at once (the actor runs batched, in infer mode)."""
    pres = [p for p, _ in starts]
    irss = [t for _, t in starts]
    rates = [sum_rate_value(ch, irs, pre, cfg.noise_var) for ch, pre, irs in zip(channels, pres, irss)]
    episodes = [Episode(rates=[r]) for r in rates]
    for ep, pre, irs in zip(episodes, pres, irss):
        ep.precoders.append(pre)
        ep.irs.append(irs)
    for _ in range(steps):
        states = np.stack([encode_rl_state(pre, irs, ch) for pre, irs, ch in zip(pres, irss, channels)])
        actions = actor(states)
        for i, ch in enumerate(channels):
            pres[i], irss[i] = rl_apply_action(pres[i], irss[i], actions[i])
            new_rate = sum_rate_value(ch, irss[i], pres[i], cfg.noise_var)
            ep = episodes[i]
            ep.rewards.append(rl_reward(ep.rates[-1], new_rate))
            ep.rates.append(new_rate)
            if keep_trajectory:
                ep.states.append(states[i])
                ep.actions.append(actions[i])
                ep.precoders.append(pres[i])
                ep.irs.append(irss[i])
    return episodes


def evaluate_policy(actor: Network, algo: str, eval_channels: list[ChannelSet], cfg: SystemConfig,
                    index: int | None = None, episode_len: int = 20,
                    start_seed: int = DEFAULT_START_SEED) -> EvalReport:
    """Average sum-rate of the deterministic policy over ``eval_channels``.

    ``cb``: one forward pass per realization. ``drl``: one ``episode_len``-step
    episode per realization from seeded random feasible matrices; the final
    sum-rate is reported. No noise, no parameter updates, batch norm in infer mode.
    """
    if algo == "cb":
        states = np.stack([encode_cb_state(ch) for ch in eval_channels])
        actions = actor(states)
        rates = []
        for ch, a in zip(eval_channels, actions):
            pre, irs = decode_cb_action(a, cfg)
            rates.append(sum_rate_value(ch, irs, pre, cfg.noise_var))
        return _report(rates, index)
    if algo == "drl":
        starts = episode_starts(cfg, len(eval_channels), start_seed)
        episodes = run_rl_episodes(actor, eval_channels, starts, cfg, episode_len)
        return _report(
            [ep.rates[-1] for ep in episodes], index,
            initial=np.array([ep.rates[0] for ep in episodes]),
            reward_sums=np.array([ep.reward_sum for ep in episodes]),
        )
    raise ValueError(f"algo must be 'cb' or 'drl', got {algo!r}")
