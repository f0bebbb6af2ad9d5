"""Maps onto the feasible sets, the MRT baseline precoder, and IRS phase quantization."""

from __future__ import annotations

import numpy as np

from irsddpg.core.rates import effective_channel
from irsddpg.core.system import ChannelSet, IrsPhaseVector, PrecoderSet
from irsddpg.errors import DegenerateInputError, ShapeMismatchError

_ZERO_MODULUS = 1e-12


def normalize_precoders(raw, omega: float, on_zero: str = "raise") -> PrecoderSet:
    """Scale every user's precoder to full power, ``||P_k||_F^2 = omega``.

    With ``on_zero="ones"`` an all-zero matrix is replaced by a scaled all-ones
    matrix instead of raising; the learners use this so training never stalls.

    Raises:
        DegenerateInputError: if some ``raw[k]`` is identically zero and
            ``on_zero == "raise"``.
    """
    raw = np.array(raw, dtype=complex)
    if raw.ndim != 3:
        raise ShapeMismatchError("raw precoders must be stacked as (K, N_t, N_s)")
    norms = np.sqrt(np.sum(np.abs(raw) ** 2, axis=(1, 2)))
    zero = norms == 0
    if np.any(zero):
        if on_zero == "raise":
            raise DegenerateInputError(f"all-zero precoder for user(s) {np.flatnonzero(zero).tolist()}")
        raw[zero] = 1.0
        norms[zero] = np.sqrt(raw.shape[1] * raw.shape[2])
    return PrecoderSet(p=raw * (np.sqrt(omega) / norms)[:, None, None], omega=omega)


def project_unit_modulus(raw) -> IrsPhaseVector:
    """Divide each entry by its modulus; entries with modulus below 1e-12 map to ``1+0j``."""
    raw = np.asarray(raw, dtype=complex).reshape(-1)
    mod = np.abs(raw)
    tiny = mod < _ZERO_MODULUS
    theta = np.where(tiny, 1.0 + 0j, raw / np.where(tiny, 1.0, mod))
    return IrsPhaseVector(theta=theta)


def quantize_phases(irs: IrsPhaseVector, levels: int) -> IrsPhaseVector:
    """Snap every phase to the nearest point of ``{2*pi*l/L}`` (circular distance).

    Ties go to the smaller index ``l``.
    """
    if int(levels) != levels or levels < 2:
        raise ValueError(f"levels must be an integer >= 2, got {levels!r}")
    levels = int(levels)
    x = irs.phases() * levels / (2 * np.pi)
    lower = np.floor(x)
    frac = x - lower
    idx = np.where(frac > 0.5, lower + 1, lower).astype(int) % levels
    # a tie between L-1 and L (== 0) belongs to 0
    wrap_tie = (frac == 0.5) & (lower == levels - 1)
    idx[wrap_tie] = 0
    return IrsPhaseVector(theta=np.exp(2j * np.pi * idx / levels))


def circular_error(a: IrsPhaseVector, b: IrsPhaseVector) -> np.ndarray:
    """Per-element circular distance between two phase vectors, in ``[0, pi]``."""
    return np.abs(np.angle(a.theta * b.theta.conj()))


def random_irs(rng: np.random.Generator, N: int) -> IrsPhaseVector:
    """Phases i.i.d. uniform on ``[0, 2*pi)``."""
    return IrsPhaseVector(theta=np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=N)))


def random_precoders(rng: np.random.Generator, K: int, N_t: int, N_s: int, omega: float) -> PrecoderSet:
    """Random full-power precoders (normalized complex Gaussian draws)."""
    raw = (rng.standard_normal((K, N_t, N_s)) + 1j * rng.standard_normal((K, N_t, N_s))) / np.sqrt(2)
    return normalize_precoders(raw, omega)


def mrt_precoder(ch: ChannelSet, irs: IrsPhaseVector, omega: float, N_s: int) -> PrecoderSet:
    """Maximum-ratio precoders matched to each user's cascaded channel.

    ``P_k`` holds the top ``N_s`` right singular vectors of ``G_k`` with the power
    split evenly so that ``||P_k||_F^2 = omega``. When ``N_s`` exceeds the rank of
    ``G_k`` the remaining columns come from its null space (the full SVD basis).
    """
    if N_s > ch.N_t:
        raise ValueError(f"N_s={N_s} streams cannot be orthogonal on N_t={ch.N_t} antennas")
    p = np.empty((ch.K, ch.N_t, N_s), dtype=complex)
    for k in range(ch.K):
        g = effective_channel(ch, irs, k)
        _, _, vh = np.linalg.svd(g, full_matrices=True)
        p[k] = vh[:N_s].conj().T * np.sqrt(omega / N_s)
    return PrecoderSet(p=p, omega=omega)
