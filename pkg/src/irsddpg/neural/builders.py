"""Actor and critic architectures for the two learners.

All widths are real-valued: every complex entry of a state or action enters
as an interleaved (re, im) pair, so real widths are twice the complex
dimensions. Hidden widths are ``hidden_scale`` times the real input width.
"""

from __future__ import annotations

from irsddpg.core.system import SystemConfig
from irsddpg.neural.spec import Activation, BatchNorm, Concat, Dense, HeadMap, MultiHead, NetworkSpec, sequential


def dcb_widths(cfg: SystemConfig) -> tuple[int, int]:
    """Real (state, action) widths of the contextual-bandit formulation."""
    return 2 * cfg.cb_state_dim, 2 * cfg.action_dim


def drl_widths(cfg: SystemConfig) -> tuple[int, int]:
    """Real (state, action) widths of the MDP formulation."""
    return 2 * cfg.rl_state_dim, 2 * cfg.action_dim


def build_dcb_actor(cfg: SystemConfig, hidden_scale: int = 2) -> NetworkSpec:
    """Two-layer ReLU backbone feeding K power-normalization heads and one unit-modulus head."""
    ds, _ = dcb_widths(cfg)
    hidden = hidden_scale * ds
    precoder_width = 2 * cfg.N_t * cfg.N_s
    heads = [sequential(Dense(hidden, precoder_width), Activation("linear")) for _ in range(cfg.K)]
    maps = [HeadMap("normalize", cfg.omega) for _ in range(cfg.K)]
    heads.append(sequential(Dense(hidden, 2 * cfg.N), Activation("linear")))
    maps.append(HeadMap("unit_modulus"))
    return sequential(
        Dense(ds, hidden), Activation("relu"),
        Dense(hidden, hidden), Activation("relu"),
        MultiHead(tuple(heads), tuple(maps)),
    )


def build_dcb_critic(cfg: SystemConfig, hidden_scale: int = 2) -> NetworkSpec:
    """State and action branches, concatenated, then a ReLU layer and a linear scalar output."""
    ds, da = dcb_widths(cfg)
    hidden = hidden_scale * (ds + da)
    state_branch = sequential(Dense(ds, hidden_scale * ds), Activation("relu"))
    action_branch = sequential(Dense(da, hidden_scale * da), Activation("relu"))
    return sequential(
        Concat((state_branch, action_branch)),
        Dense(hidden, hidden), Activation("relu"),
        Dense(hidden, 1), Activation("linear"),
    )


def build_drl_actor(cfg: SystemConfig, hidden_scale: int = 2) -> NetworkSpec:
    ds, da = drl_widths(cfg)
    hidden = hidden_scale * ds
    return sequential(
        Dense(ds, hidden), BatchNorm(hidden), Activation("relu"),
        Dense(hidden, hidden), BatchNorm(hidden), Activation("relu"),
        Dense(hidden, da), Activation("tanh"),
    )


def build_drl_critic(cfg: SystemConfig, hidden_scale: int = 2) -> NetworkSpec:
    """Input is the concatenated ``[state, action]`` vector."""
    ds, da = drl_widths(cfg)
    hidden = hidden_scale * (ds + da)
    return sequential(
        Dense(ds + da, hidden), BatchNorm(hidden), Activation("relu"),
        Dense(hidden, hidden), BatchNorm(hidden), Activation("relu"),
        Dense(hidden, 1), Activation("linear"),
    )
