"""Channel sampling: Rayleigh user->IRS links and a Rician IRS->BS link."""

from __future__ import annotations

import numpy as np

from irsddpg.core.system import ChannelSet, SystemConfig


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric CN(0, 1) samples (each real component has variance 1/2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def steering_vector(n_elements: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA response ``exp(j*pi*m*sin(angle))`` for ``m = 0..n_elements-1``."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    m = np.arange(n_elements)
    return np.exp(1j * np.pi * m * np.sin(angle))


def sample_user_channels(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Rayleigh user->IRS channels, stacked as ``(K, N, N_t)``."""
    return complex_gaussian(rng, (cfg.K, cfg.N, cfg.N_t))


def sample_irs_bs_channel(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Rician IRS->BS channel of shape ``(N_r, N)``.

    The LoS part is the rank-one product of receive and transmit ULA steering
    vectors with angles drawn uniformly in ``[-pi/2, pi/2)``; the scattered part
    is Rayleigh. The dB Rician factor is converted to linear before mixing.
    """
    beta = cfg.rician_beta
    phi_r, phi_t = rng.uniform(-np.pi / 2, np.pi / 2, size=2)
    h_los = np.outer(steering_vector(cfg.N_r, phi_r), steering_vector(cfg.N, phi_t).conj())
    h_nlos = complex_gaussian(rng, (cfg.N_r, cfg.N))
    return np.sqrt(beta / (1 + beta)) * h_los + np.sqrt(1 / (1 + beta)) * h_nlos


def sample_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    h_ui = sample_user_channels(cfg, rng)
    h_ib = sample_irs_bs_channel(cfg, rng)
    return ChannelSet(h_ui=h_ui, h_ib=h_ib)


def sample_channel_list(cfg: SystemConfig, n: int, seed) -> list[ChannelSet]:
    """A reproducible list of ``n`` independent realizations (e.g. a held-out evaluation set)."""
    rng = np.random.default_rng(seed)
    return [sample_channels(cfg, rng) for _ in range(n)]
