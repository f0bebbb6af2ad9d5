"""Metrics events passed from the training loops to whoever listens (usually the harness)."""

from __future__ import annotations

from dataclasses import asdict, dataclass

METRIC_FIELDS = ("run_id", "step", "critic_loss", "actor_loss", "eval_mean", "eval_std", "wall_seconds", "seed")


@dataclass(frozen=True)
class MetricsRecord:
    """One row of the metrics stream; ``None`` marks a field that does not apply at this step."""

    run_id: str
    step: int
    critic_loss: float | None = None
    actor_loss: float | None = None
    eval_mean: float | None = None
    eval_std: float | None = None
    wall_seconds: float | None = None
    seed: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)
