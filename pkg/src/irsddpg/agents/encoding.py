"""Real-vector encodings of states and actions, and the DRL transition map.

Complex blocks are flattened row-major and interleaved as ``[re0, im0, re1, im1, ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from irsddpg.core.feasibility import normalize_precoders, project_unit_modulus
from irsddpg.core.system import ChannelSet, IrsPhaseVector, PrecoderSet, SystemConfig
from irsddpg.errors import ShapeMismatchError


def to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    return np.stack([z.real, z.imag], axis=-1).reshape(-1)


def to_complex(x: np.ndarray, shape=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    pairs = x.reshape(*x.shape[:-1], -1, 2)
    z = pairs[..., 0] + 1j * pairs[..., 1]
    return z if shape is None else z.reshape(*x.shape[:-1], *shape)


@dataclass(frozen=True)
class Layout:
    """Named complex blocks making up an encoded vector."""

    blocks: tuple[tuple[str, tuple[int, ...]], ...]

    @property
    def width(self) -> int:
        return 2 * sum(int(np.prod(shape)) for _, shape in self.blocks)

    def offsets(self) -> dict[str, slice]:
        out, start = {}, 0
        for name, shape in self.blocks:
            stop = start + 2 * int(np.prod(shape))
            out[name] = slice(start, stop)
            start = stop
        return out

    def join(self, **parts) -> np.ndarray:
        return np.concatenate([to_real(parts[name]) for name, _ in self.blocks])

    def split(self, vec: np.ndarray) -> dict[str, np.ndarray]:
        vec = np.asarray(vec, dtype=float)
        if vec.shape[-1] != self.width:
            raise ShapeMismatchError(f"encoded width {vec.shape[-1]} != layout width {self.width}")
        return {name: to_complex(vec[..., sl], shape) for (name, shape), sl in zip(self.blocks, self.offsets().values())}


def cb_state_layout(cfg: SystemConfig) -> Layout:
    return Layout((("h_ui", (cfg.K, cfg.N, cfg.N_t)), ("h_ib", (cfg.N_r, cfg.N))))


def action_layout(cfg: SystemConfig) -> Layout:
    return Layout((("p", (cfg.K, cfg.N_t, cfg.N_s)), ("theta", (cfg.N,))))


def rl_state_layout(cfg: SystemConfig) -> Layout:
    return Layout((
        ("p", (cfg.K, cfg.N_t, cfg.N_s)),
        ("theta", (cfg.N,)),
        ("h_ib", (cfg.N_r, cfg.N)),
        ("h_ui", (cfg.K, cfg.N, cfg.N_t)),
    ))


def _cfg_of(ch: ChannelSet, N_s: int = 1) -> SystemConfig:
    return SystemConfig(K=ch.K, N_t=ch.N_t, N_s=N_s, N_r=ch.N_r, N=ch.N)


def encode_cb_state(ch: ChannelSet) -> np.ndarray:
    """``[vec(H_UI_1), ..., vec(H_UI_K), vec(H_IB)]`` as interleaved reals."""
    return cb_state_layout(_cfg_of(ch)).join(h_ui=ch.h_ui, h_ib=ch.h_ib)


def decode_cb_state(state: np.ndarray, cfg: SystemConfig) -> ChannelSet:
    parts = cb_state_layout(cfg).split(state)
    return ChannelSet(h_ui=parts["h_ui"], h_ib=parts["h_ib"])


def encode_action(pre: PrecoderSet, irs: IrsPhaseVector) -> np.ndarray:
    K, nt, ns = pre.p.shape
    return Layout((("p", (K, nt, ns)), ("theta", (irs.N,)))).join(p=pre.p, theta=irs.theta)


def decode_cb_action(action: np.ndarray, cfg: SystemConfig) -> tuple[PrecoderSet, IrsPhaseVector]:
    """Map an action vector back onto the feasible sets (full-power precoders, unit-modulus IRS)."""
    parts = action_layout(cfg).split(np.asarray(action, dtype=float).reshape(-1))
    return normalize_precoders(parts["p"], cfg.omega, on_zero="ones"), project_unit_modulus(parts["theta"])


def encode_rl_state(pre: PrecoderSet, irs: IrsPhaseVector, ch: ChannelSet) -> np.ndarray:
    """``[vec(P_1..P_K), theta, vec(H_IB), vec(H_UI_1..H_UI_K)]`` as interleaved reals."""
    cfg = _cfg_of(ch, pre.p.shape[2])
    return rl_state_layout(cfg).join(p=pre.p, theta=irs.theta, h_ib=ch.h_ib, h_ui=ch.h_ui)


def decode_rl_state(state: np.ndarray, cfg: SystemConfig) -> tuple[PrecoderSet, IrsPhaseVector, ChannelSet]:
    parts = rl_state_layout(cfg).split(np.asarray(state, dtype=float).reshape(-1))
    return (
        PrecoderSet(p=parts["p"], omega=cfg.omega),
        IrsPhaseVector(theta=parts["theta"]),
        ChannelSet(h_ui=parts["h_ui"], h_ib=parts["h_ib"]),
    )


def rl_apply_action(pre: PrecoderSet, irs: IrsPhaseVector, action: np.ndarray) -> tuple[PrecoderSet, IrsPhaseVector]:
    """Add the variations carried by ``action`` and restore feasibility."""
    K, nt, ns = pre.p.shape
    layout = Layout((("p", (K, nt, ns)), ("theta", (irs.N,))))
    delta = layout.split(np.asarray(action, dtype=float).reshape(-1))
    new_pre = normalize_precoders(pre.p + delta["p"], pre.omega, on_zero="ones")
    new_irs = project_unit_modulus(irs.theta + delta["theta"])
    return new_pre, new_irs


def rl_reward(prev_sum_rate: float, new_sum_rate: float) -> float:
    return new_sum_rate - prev_sum_rate
