"""DDPG on the MDP formulation: actions are increments of the current precoders and IRS phases."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from irsddpg.agents.config import AgentConfig
from irsddpg.agents.dcb import Hook, TrainingResult, _streams
from irsddpg.agents.encoding import encode_rl_state, rl_apply_action, rl_reward
from irsddpg.agents.evaluation import DEFAULT_START_SEED, evaluate_policy
from irsddpg.core.channels import sample_channel_list, sample_channels
from irsddpg.core.feasibility import random_irs, random_precoders
from irsddpg.core.rates import sum_rate_value
from irsddpg.core.system import ChannelSet, SystemConfig
from irsddpg.errors import ShapeMismatchError
from irsddpg.neural import AdamState, Network, adam_step, build_drl_actor, build_drl_critic, soft_update
from irsddpg.neural.checkpoint import Checkpoint
from irsddpg.records import MetricsRecord
from irsddpg.replay import ReplayBuffer, RlExperience


@dataclass
class DrlAgent:
    cfg: SystemConfig
    agent_cfg: AgentConfig
    actor: Network
    critic: Network
    target_actor: Network
    target_critic: Network
    actor_opt: AdamState
    critic_opt: AdamState
    buffer: ReplayBuffer

    @classmethod
    def create(cls, cfg: SystemConfig, agent_cfg: AgentConfig, rng: np.random.Generator) -> "DrlAgent":
        actor = Network(build_drl_actor(cfg, agent_cfg.hidden_scale), rng=rng)
        critic = Network(build_drl_critic(cfg, agent_cfg.hidden_scale), rng=rng)
        return cls(
            cfg, agent_cfg, actor, critic, actor.copy(), critic.copy(),
            AdamState.for_params(actor.params, lr=agent_cfg.lr_actor),
            AdamState.for_params(critic.params, lr=agent_cfg.lr_critic),
            ReplayBuffer(agent_cfg.buffer_capacity),
        )

    def networks(self) -> dict[str, Network]:
        return {"actor": self.actor, "critic": self.critic,
                "target_actor": self.target_actor, "target_critic": self.target_critic}

    def optimizers(self) -> dict[str, AdamState]:
        return {"actor": self.actor_opt, "critic": self.critic_opt}

    def load(self, ckpt: Checkpoint) -> None:
        for name, net in self.networks().items():
            if name not in ckpt.networks or ckpt.networks[name].spec != net.spec:
                raise ShapeMismatchError(f"checkpoint network {name!r} does not match this agent's configuration")
        for name in self.networks():
            setattr(self, name, ckpt.networks[name].copy())
        if "actor" in ckpt.optimizers:
            self.actor_opt = ckpt.optimizers["actor"].copy()
        if "critic" in ckpt.optimizers:
            self.critic_opt = ckpt.optimizers["critic"].copy()


def rl_select_action(actor: Network, state: np.ndarray, noise_on: bool, rng: np.random.Generator | None = None,
                     explore_var: float = 0.05) -> np.ndarray:
    """Actor output plus CN(0, explore_var) noise, clipped back into [-1, 1] per real component."""
    action = actor(np.asarray(state)[None, :])[0]
    if noise_on and explore_var > 0:
        action = np.clip(action + rng.normal(0.0, np.sqrt(explore_var / 2), size=action.shape), -1.0, 1.0)
    return action


def rl_train_step(agent: DrlAgent, rng: np.random.Generator) -> tuple[float, float] | None:
    """Critic regression on bootstrapped targets, actor ascent on the critic, then target tracking."""
    acfg = agent.agent_cfg
    B = acfg.batch_size
    if len(agent.buffer) <= B:
        return None
    batch = agent.buffer.sample(B, rng)
    ds = batch.states.shape[1]

    # Targets use batch statistics, like the online critic they are compared
    # with; the lagging running statistics made the two disagree and the
    # bootstrap diverge. The target networks' statistics are left untouched.
    next_actions, _ = agent.target_actor.forward(batch.next_states, "train", update_stats=False)
    q_next, _ = agent.target_critic.forward(np.hstack([batch.next_states, next_actions]), "train", update_stats=False)
    # plain arrays: no gradient path back into the target networks
    targets = batch.rewards + acfg.gamma * q_next[:, 0]

    q, cache = agent.critic.forward(np.hstack([batch.states, batch.actions]), "train")
    diff = q[:, 0] - targets
    critic_loss = float(np.mean(diff ** 2))
    grads, _ = agent.critic.backward(cache, (2.0 / B) * diff[:, None])
    adam_step(agent.critic.params, grads, agent.critic_opt)

    actions, actor_cache = agent.actor.forward(batch.states, "train")
    q_pi, critic_cache = agent.critic.forward(np.hstack([batch.states, actions]), "train", update_stats=False)
    actor_loss = -float(np.mean(q_pi))
    _, d_input = agent.critic.backward(critic_cache, np.full_like(q_pi, -1.0 / B))
    actor_grads, _ = agent.actor.backward(actor_cache, d_input[:, ds:])
    adam_step(agent.actor.params, actor_grads, agent.actor_opt)

    soft_update(agent.target_actor.params, agent.actor.params, acfg.tau)
    soft_update(agent.target_critic.params, agent.critic.params, acfg.tau)
    return critic_loss, actor_loss


def run_rl_training(cfg: SystemConfig, agent_cfg: AgentConfig, seed: int, hooks: Iterable[Hook] = (),
                    run_id: str = "drl", eval_channels: list[ChannelSet] | None = None,
                    start_seed: int = DEFAULT_START_SEED) -> TrainingResult:
    """Train for ``agent_cfg.episodes`` episodes of ``agent_cfg.episode_len`` steps.

    Each episode draws fresh channels and random feasible matrices. Metrics are
    emitted per time step (global index); evaluation results are attached to
    the last step of episodes 0, every ``eval_interval``-th, and the last one.
    """
    hooks = list(hooks)
    rngs = _streams(seed)
    agent = DrlAgent.create(cfg, agent_cfg, rngs["init"])
    if eval_channels is None:
        eval_channels = sample_channel_list(cfg, agent_cfg.eval_size, agent_cfg.eval_seed)
    interval = agent_cfg.rl_eval_interval()
    T = agent_cfg.episode_len
    E = agent_cfg.episodes
    result = TrainingResult(agent, agent.actor.copy(), None, None)
    start = time.perf_counter()
    step = 0
    for e in range(E):
        ch = sample_channels(cfg, rngs["env"])
        pre = random_precoders(rngs["starts"], cfg.K, cfg.N_t, cfg.N_s, cfg.omega)
        irs = random_irs(rngs["starts"], cfg.N)
        rate = sum_rate_value(ch, irs, pre, cfg.noise_var)
        state = encode_rl_state(pre, irs, ch)
        out_of_time = False
        for t in range(T):
            action = rl_select_action(agent.actor, state, True, rngs["noise"], agent_cfg.explore_var)
            pre, irs = rl_apply_action(pre, irs, action)
            new_rate = sum_rate_value(ch, irs, pre, cfg.noise_var)
            next_state = encode_rl_state(pre, irs, ch)
            agent.buffer.push(RlExperience(state, action, rl_reward(rate, new_rate), next_state))
            state, rate = next_state, new_rate
            losses = rl_train_step(agent, rngs["replay"])

            report = None
            out_of_time = agent_cfg.wall_budget is not None and time.perf_counter() - start > agent_cfg.wall_budget
            if t == T - 1 or out_of_time:
                if e % interval == 0 or e == E - 1 or out_of_time:
                    report = evaluate_policy(agent.actor, "drl", eval_channels, cfg, index=e,
                                             episode_len=T, start_seed=start_seed)
                    result.evals.append(report)
                    if result.best_eval is None or report.mean > result.best_eval.mean:
                        result.best_eval = report
                        result.best_actor = agent.actor.copy()
                    result.final_eval = report
            record = MetricsRecord(
                run_id=run_id, step=step,
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
            step += 1
            result.steps_run = step
            if out_of_time:
                break
        if out_of_time:
            break
    return result
