"""Deep contextual-bandit DDPG: a critic fitted to the instantaneous sum-rate, an actor ascending it."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from irsddpg.agents.config import AgentConfig
from irsddpg.agents.encoding import decode_cb_action, encode_cb_state
from irsddpg.agents.evaluation import EvalReport, evaluate_policy
from irsddpg.core.channels import sample_channel_list, sample_channels
from irsddpg.core.rates import sum_rate_value
from irsddpg.core.system import ChannelSet, SystemConfig
from irsddpg.errors import ShapeMismatchError
from irsddpg.neural import AdamState, Network, adam_step, build_dcb_actor, build_dcb_critic
from irsddpg.neural.checkpoint import Checkpoint
from irsddpg.records import MetricsRecord
from irsddpg.replay import CbExperience, ReplayBuffer

Hook = Callable[[MetricsRecord], None]


@dataclass
class DcbAgent:
    cfg: SystemConfig
    agent_cfg: AgentConfig
    actor: Network
    critic: Network
    actor_opt: AdamState
    critic_opt: AdamState
    buffer: ReplayBuffer

    @classmethod
    def create(cls, cfg: SystemConfig, agent_cfg: AgentConfig, rng: np.random.Generator) -> "DcbAgent":
        actor = Network(build_dcb_actor(cfg, agent_cfg.hidden_scale), rng=rng)
        critic = Network(build_dcb_critic(cfg, agent_cfg.hidden_scale), rng=rng)
        return cls(
            cfg, agent_cfg, actor, critic,
            AdamState.for_params(actor.params, lr=agent_cfg.lr_actor),
            AdamState.for_params(critic.params, lr=agent_cfg.lr_critic),
            ReplayBuffer(agent_cfg.buffer_capacity),
        )

    def networks(self) -> dict[str, Network]:
        return {"actor": self.actor, "critic": self.critic}

    def optimizers(self) -> dict[str, AdamState]:
        return {"actor": self.actor_opt, "critic": self.critic_opt}

    def load(self, ckpt: Checkpoint) -> None:
        """Restore networks and optimizer moments; the architecture must match exactly."""
        for name, net in self.networks().items():
            if name not in ckpt.networks or ckpt.networks[name].spec != net.spec:
                raise ShapeMismatchError(f"checkpoint network {name!r} does not match this agent's configuration")
        self.actor = ckpt.networks["actor"].copy()
        self.critic = ckpt.networks["critic"].copy()
        if "actor" in ckpt.optimizers:
            self.actor_opt = ckpt.optimizers["actor"].copy()
        if "critic" in ckpt.optimizers:
            self.critic_opt = ckpt.optimizers["critic"].copy()


def cb_select_action(actor: Network, state: np.ndarray, noise_on: bool, rng: np.random.Generator | None = None,
                     explore_var: float = 0.05) -> np.ndarray:
    """Actor output plus, optionally, CN(0, explore_var) noise on every complex action entry."""
    action = actor(np.asarray(state)[None, :])[0]
    if noise_on and explore_var > 0:
        action = action + rng.normal(0.0, np.sqrt(explore_var / 2), size=action.shape)
    return action


def cb_reward(ch: ChannelSet, action: np.ndarray, cfg: SystemConfig) -> float:
    pre, irs = decode_cb_action(action, cfg)
    return sum_rate_value(ch, irs, pre, cfg.noise_var)


def cb_train_step(agent: DcbAgent, rng: np.random.Generator) -> tuple[float, float] | None:
    """One critic and one actor update from a sampled mini-batch.

    Returns ``None`` without touching anything while the buffer holds no more
    than one batch worth of experiences.
    """
    B = agent.agent_cfg.batch_size
    if len(agent.buffer) <= B:
        return None
    batch = agent.buffer.sample(B, rng)
    ds = batch.states.shape[1]

    q, cache = agent.critic.forward(np.hstack([batch.states, batch.actions]), "train")
    diff = q[:, 0] - batch.rewards
    critic_loss = float(np.mean(diff ** 2))
    grads, _ = agent.critic.backward(cache, (2.0 / B) * diff[:, None])
    adam_step(agent.critic.params, grads, agent.critic_opt)

    actions, actor_cache = agent.actor.forward(batch.states, "train")
    q_pi, critic_cache = agent.critic.forward(np.hstack([batch.states, actions]), "train", update_stats=False)
    actor_loss = -float(np.mean(q_pi))
    # critic gradients are discarded: only the actor moves on this loss
    _, d_input = agent.critic.backward(critic_cache, np.full_like(q_pi, -1.0 / B))
    actor_grads, _ = agent.actor.backward(actor_cache, d_input[:, ds:])
    adam_step(agent.actor.params, actor_grads, agent.actor_opt)
    return critic_loss, actor_loss


@dataclass
class TrainingResult:
    agent: object
    best_actor: Network
    best_eval: EvalReport | None
    final_eval: EvalReport | None
    evals: list[EvalReport] = field(default_factory=list)
    records: list[MetricsRecord] = field(default_factory=list)
    steps_run: int = 0


def _streams(seed: int) -> dict[str, np.random.Generator]:
    names = ("init", "env", "noise", "replay", "starts")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def run_cb_training(cfg: SystemConfig, agent_cfg: AgentConfig, seed: int, hooks: Iterable[Hook] = (),
                    run_id: str = "dcb", eval_channels: list[ChannelSet] | None = None) -> TrainingResult:
    """Train a bandit agent for ``agent_cfg.steps`` time steps on fresh channel draws.

    Evaluation on the held-out set runs after step 0, every ``eval_interval``
    steps, and after the last step.
    """
    hooks = list(hooks)
    rngs = _streams(seed)
    agent = DcbAgent.create(cfg, agent_cfg, rngs["init"])
    if eval_channels is None:
        eval_channels = sample_channel_list(cfg, agent_cfg.eval_size, agent_cfg.eval_seed)
    interval = agent_cfg.cb_eval_interval()
    result = TrainingResult(agent, agent.actor.copy(), None, None)
    start = time.perf_counter()
    T = agent_cfg.steps
    for t in range(T):
        ch = sample_channels(cfg, rngs["env"])
        state = encode_cb_state(ch)
        action = cb_select_action(agent.actor, state, True, rngs["noise"], agent_cfg.explore_var)
        reward = cb_reward(ch, action, cfg)
        agent.buffer.push(CbExperience(state, action, reward))
        losses = cb_train_step(agent, rngs["replay"])

        report = None
        out_of_time = agent_cfg.wall_budget is not None and time.perf_counter() - start > agent_cfg.wall_budget
        if t % interval == 0 or t == T - 1 or out_of_time:
            report = evaluate_policy(agent.actor, "cb", eval_channels, cfg, index=t)
            result.evals.append(report)
            if result.best_eval is None or report.mean > result.best_eval.mean:
                result.best_eval = report
                result.best_actor = agent.actor.copy()
            result.final_eval = report
        record = MetricsRecord(
            run_id=run_id, step=t,
            critic_loss=None if losses is None else losses[0],
            actor_loss=None if losses is None else losses[1],
            eval_mean=None if report is None else report.mean,
            eval_std=None if report is None else report.std,
            wall_seconds=time.perf_counter() - start if agent_cfg.record_wall_time else None,
            seed=seed,
        )
        result.records.append(record)
        for hook in hooks:
            hook(record)
        result.steps_run = t + 1
        if out_of_time:
            break
    return result
