"""Experiment configuration files: ``key=value`` lines, ``#`` comments, typed defaults.

Any key may also be overridden from the environment as ``IRSDDPG_<KEY>`` with
the key upper-cased (``Nr`` -> ``IRSDDPG_NR``). Environment values win over the file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Mapping

from irsddpg.agents.config import DEFAULT_EVAL_SEED, AgentConfig
from irsddpg.core.system import SystemConfig
from irsddpg.errors import ConfigError

ENV_PREFIX = "IRSDDPG_"
ALGOS = ("dcb", "drl", "random_mrt")
DEFAULT_SNR_GRID = (-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0)
DEFAULT_NR_GRID = (8, 16, 30)
DEFAULT_QUANT_LEVELS = (2, 4, 8, 16)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _optional(conv: Callable) -> Callable:
    def parse(text: str):
        return None if text.lower() in ("none", "null") else conv(text)
    return parse


def _algo(text: str) -> str:
    if text not in ALGOS:
        raise ValueError(f"algo must be one of {', '.join(ALGOS)}")
    return text


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    K: int = 10
    Nt: int = 2
    Ns: int = 2
    Nr: int = 30
    N: int = 50
    snr_db: float = 10.0
    rician_beta_db: float = 3.0
    algo: str = "dcb"
    seed: int = 0
    explore_var: float = 0.05
    lr_actor: float = 0.001
    lr_critic: float = 0.001
    batch: int = 16
    buffer: int = 100_000
    gamma: float = 0.99
    tau: float = 0.005
    T: int = 20
    steps: int = 100_000
    episodes: int = 5_000
    eval_interval: int | None = None
    eval_size: int = 100
    eval_seed: int = DEFAULT_EVAL_SEED
    hidden_scale: int = 2
    wall_budget: float | None = None
    record_wall_time: bool = False
    baseline_realizations: int = 1000
    snr_list: tuple[float, ...] = DEFAULT_SNR_GRID
    nr_list: tuple[int, ...] = DEFAULT_NR_GRID
    quant_levels: tuple[int, ...] = DEFAULT_QUANT_LEVELS
    out: str | None = None

    def system(self, **overrides) -> SystemConfig:
        kw = dict(K=self.K, N_t=self.Nt, N_s=self.Ns, N_r=self.Nr, N=self.N, rician_beta_db=self.rician_beta_db)
        snr = overrides.pop("snr_db", self.snr_db)
        kw.update(overrides)
        return SystemConfig.from_snr_db(snr, **kw)

    def agent(self) -> AgentConfig:
        return AgentConfig(
            explore_var=self.explore_var, lr_actor=self.lr_actor, lr_critic=self.lr_critic,
            batch_size=self.batch, buffer_capacity=self.buffer, gamma=self.gamma, tau=self.tau,
            episode_len=self.T, steps=self.steps, episodes=self.episodes, eval_interval=self.eval_interval,
            eval_size=self.eval_size, eval_seed=self.eval_seed, hidden_scale=self.hidden_scale,
            record_wall_time=self.record_wall_time, wall_budget=self.wall_budget,
        )

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """Every key with its resolved value; ``parse_config(cfg.to_text()) == cfg``."""
        return "".join(f"{f.name}={_fmt(getattr(self, f.name))}\n" for f in dataclasses.fields(self))


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS: dict[str, Callable[[str], object]] = {
    "K": int, "Nt": int, "Ns": int, "Nr": int, "N": int,
    "snr_db": float, "rician_beta_db": float,
    "algo": _algo, "seed": int,
    "explore_var": float, "lr_actor": float, "lr_critic": float,
    "batch": int, "buffer": int, "gamma": float, "tau": float, "T": int,
    "steps": int, "episodes": int, "eval_interval": _optional(int), "eval_size": int, "eval_seed": int,
    "hidden_scale": int, "wall_budget": _optional(float), "record_wall_time": _bool,
    "baseline_realizations": int,
    "snr_list": _float_list, "nr_list": _int_list, "quant_levels": _int_list,
    "out": _optional(str),
}
_DIMENSIONS = ("K", "Nt", "Ns", "Nr", "N")
assert set(_PARSERS) == {f.name for f in dataclasses.fields(ExperimentConfig)}


def _convert(key: str, raw: str, line: int | None):
    if raw == "" and key in _DIMENSIONS:
        raise ConfigError(f"missing required dimension {key}", line)
    try:
        return _PARSERS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})", line) from None


def parse_config(text: str, environ: Mapping[str, str] | None = None) -> ExperimentConfig:
    """Parse a config file body; unset keys take their defaults.

    Raises:
        ConfigError: on malformed lines, unknown keys, values of the wrong
            type, empty dimension values, or an inconsistent system
            (``line`` is ``None`` for problems that are not tied to one line).
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected key=value, got {body!r}", lineno)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        values[key] = _convert(key, raw, lineno)
    if environ:
        for key in _PARSERS:
            name = ENV_PREFIX + key.upper()
            if name in environ:
                try:
                    values[key] = _convert(key, environ[name].strip(), None)
                except ConfigError as exc:
                    raise ConfigError(f"{name}: {exc}") from None
    cfg = ExperimentConfig(**values)
    try:
        cfg.system()
        cfg.agent()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path, environ: Mapping[str, str] | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), environ)
