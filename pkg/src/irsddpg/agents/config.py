"""Learner hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass

# held-out evaluation channels come from this stream unless overridden
DEFAULT_EVAL_SEED = 20_230_001


@dataclass(frozen=True)
class AgentConfig:
    """Hyperparameters shared by both learners; ``gamma``, ``tau`` and ``episode_len`` are DRL-only.

    ``eval_interval`` counts time steps for the bandit learner and episodes for
    the DRL learner; ``None`` picks 500 steps / 25 episodes respectively.
    """

    explore_var: float = 0.05
    lr_actor: float = 0.001
    lr_critic: float = 0.001
    batch_size: int = 16
    buffer_capacity: int = 100_000
    gamma: float = 0.99
    tau: float = 0.005
    episode_len: int = 20
    steps: int = 100_000
    episodes: int = 5_000
    eval_interval: int | None = None
    eval_size: int = 100
    eval_seed: int = DEFAULT_EVAL_SEED
    hidden_scale: int = 2
    record_wall_time: bool = False
    wall_budget: float | None = None

    def __post_init__(self):
        if self.explore_var < 0:
            raise ValueError("explore_var must be >= 0")
        if self.lr_actor < 0 or self.lr_critic < 0:
            raise ValueError("learning rates must be >= 0")
        for name in ("batch_size", "buffer_capacity", "episode_len", "eval_size", "hidden_scale"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.steps < 0 or self.episodes < 0:
            raise ValueError("steps and episodes must be >= 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if self.eval_interval is not None and self.eval_interval < 1:
            raise ValueError("eval_interval must be >= 1")

    def cb_eval_interval(self) -> int:
        return self.eval_interval or 500

    def rl_eval_interval(self) -> int:
        return self.eval_interval or 25
