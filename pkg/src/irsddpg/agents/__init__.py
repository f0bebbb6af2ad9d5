"""The two learners (contextual-bandit DDPG and DRL DDPG), their encodings and evaluation."""

from irsddpg.agents.config import AgentConfig
from irsddpg.agents.dcb import DcbAgent, TrainingResult, cb_reward, cb_select_action, cb_train_step, run_cb_training
from irsddpg.agents.drl import DrlAgent, rl_select_action, rl_train_step, run_rl_training
from irsddpg.agents.encoding import (
    Layout,
    action_layout,
    cb_state_layout,
    decode_cb_action,
    decode_cb_state,
    decode_rl_state,
    encode_action,
    encode_cb_state,
    encode_rl_state,
    rl_apply_action,
    rl_reward,
    rl_state_layout,
    to_complex,
    to_real,
)
from irsddpg.agents.evaluation import Episode, EvalReport, episode_starts, evaluate_policy, run_rl_episodes

__all__ = [
    "AgentConfig",
    "DcbAgent",
    "DrlAgent",
    "Episode",
    "EvalReport",
    "Layout",
    "TrainingResult",
    "action_layout",
    "cb_reward",
    "cb_select_action",
    "cb_state_layout",
    "cb_train_step",
    "decode_cb_action",
    "decode_cb_state",
    "decode_rl_state",
    "encode_action",
    "encode_cb_state",
    "encode_rl_state",
    "episode_starts",
    "evaluate_policy",
    "rl_apply_action",
    "rl_reward",
    "rl_select_action",
    "rl_state_layout",
    "rl_train_step",
    "run_cb_training",
    "run_rl_episodes",
    "run_rl_training",
    "to_complex",
    "to_real",
]
