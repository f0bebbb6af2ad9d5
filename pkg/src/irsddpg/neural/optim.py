"""Adam updates and soft target tracking."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from irsddpg.errors import ShapeMismatchError
from irsddpg.neural.network import ParameterSet


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: ParameterSet, lr: float = 0.001, **kwargs) -> "AdamState":
        return cls(
            lr=lr,
            m=[np.zeros_like(a) for a in params.trainable],
            v=[np.zeros_like(a) for a in params.trainable],
            **kwargs,
        )

    def copy(self) -> "AdamState":
        return AdamState(self.lr, self.beta1, self.beta2, self.eps, self.step,
                         [a.copy() for a in self.m], [a.copy() for a in self.v])


def adam_step(params: ParameterSet, grads: list[np.ndarray], state: AdamState) -> tuple[ParameterSet, AdamState]:
    """One bias-corrected Adam step, applied in place to the trainable arrays."""
    if len(grads) != len(params.trainable) or len(state.m) != len(params.trainable):
        raise ShapeMismatchError("gradient/moment lists do not match the parameter list")
    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    for p, g, m, v in zip(params.trainable, grads, state.m, state.v):
        if g.shape != p.shape:
            raise ShapeMismatchError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params, state


def soft_update(target: ParameterSet, source: ParameterSet, tau: float) -> ParameterSet:
    """``target <- tau * source + (1 - tau) * target``, running statistics included."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    if target.shapes() != source.shapes():
        raise ShapeMismatchError("target and source parameter shapes differ")
    for t, s in zip(target.arrays(), source.arrays()):
        if tau == 1.0:
            t[...] = s
        else:
            t *= 1.0 - tau
            t += tau * s
    return target
