"""Dense networks with exact reverse-mode gradients, Adam, and checkpoint I/O."""

from irsddpg.neural.builders import (
    build_dcb_actor,
    build_dcb_critic,
    build_drl_actor,
    build_drl_critic,
    dcb_widths,
    drl_widths,
)
from irsddpg.neural.checkpoint import Checkpoint, load_checkpoint, read_header, save_checkpoint
from irsddpg.neural.network import ForwardCache, Network, ParameterSet, backward, forward, init_params
from irsddpg.neural.optim import AdamState, adam_step, soft_update
from irsddpg.neural.spec import Activation, BatchNorm, Concat, Dense, HeadMap, MultiHead, NetworkSpec, sequential

__all__ = [
    "Activation",
    "AdamState",
    "BatchNorm",
    "Checkpoint",
    "Concat",
    "Dense",
    "ForwardCache",
    "HeadMap",
    "MultiHead",
    "Network",
    "NetworkSpec",
    "ParameterSet",
    "adam_step",
    "backward",
    "build_dcb_actor",
    "build_dcb_critic",
    "build_drl_actor",
    "build_drl_critic",
    "dcb_widths",
    "drl_widths",
    "forward",
    "init_params",
    "load_checkpoint",
    "read_header",
    "save_checkpoint",
    "sequential",
    "soft_update",
]
