"""Scenario configuration and the containers for channels and optimization variables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from irsddpg.errors import NumericalInputError, ShapeMismatchError

# Relative slack allowed on the per-user power constraint.
POWER_SLACK = 1e-9
# Absolute tolerance on |theta_n| = 1.
MODULUS_TOL = 1e-9


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and physical constants of an IRS-assisted uplink MU-MIMO scenario.

    Attributes:
        K: number of users.
        N_t: transmit antennas per user.
        N_s: data streams per user.
        N_r: receive antennas at the base station.
        N: IRS scattering elements.
        omega: per-user power budget (linear).
        noise_var: receiver noise variance (linear).
        rician_beta_db: Rician factor of the IRS->BS link in dB.
    """

    K: int = 10
    N_t: int = 2
    N_s: int = 2
    N_r: int = 30
    N: int = 50
    omega: float = 10.0
    noise_var: float = 1.0
    rician_beta_db: float = 3.0

    def __post_init__(self):
        for name in ("K", "N_t", "N_s", "N_r", "N"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if not self.omega > 0 or not math.isfinite(self.omega):
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        if not self.noise_var > 0 or not math.isfinite(self.noise_var):
            raise ValueError(f"noise_var must be finite and > 0, got {self.noise_var!r}")
        if not math.isfinite(self.rician_beta_db):
            raise ValueError("rician_beta_db must be finite")

    @classmethod
    def from_snr_db(cls, snr_db: float, **kwargs) -> "SystemConfig":
        """Build a config with unit noise variance and ``omega = 10**(snr_db/10)``."""
        return cls(omega=10.0 ** (snr_db / 10.0), noise_var=1.0, **kwargs)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.omega / self.noise_var)

    @property
    def rician_beta(self) -> float:
        """Linear Rician factor."""
        return 10.0 ** (self.rician_beta_db / 10.0)

    # complex dimensions of the learning formulations
    @property
    def cb_state_dim(self) -> int:
        return self.K * self.N_t * self.N + self.N_r * self.N

    @property
    def action_dim(self) -> int:
        return self.K * self.N_t * self.N_s + self.N

    @property
    def rl_state_dim(self) -> int:
        return self.K * self.N_t * self.N_s + self.N + self.N_r * self.N + self.K * self.N_t * self.N


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalInputError(f"{name} contains non-finite entries")


@dataclass
class ChannelSet:
    """One channel realization.

    ``h_ui`` stacks the K user->IRS matrices as a ``(K, N, N_t)`` array and
    ``h_ib`` is the ``(N_r, N)`` IRS->BS matrix.
    """

    h_ui: np.ndarray
    h_ib: np.ndarray

    def __post_init__(self):
        self.h_ui = np.asarray(self.h_ui, dtype=complex)
        self.h_ib = np.asarray(self.h_ib, dtype=complex)
        if self.h_ui.ndim != 3 or self.h_ib.ndim != 2:
            raise ShapeMismatchError("h_ui must be (K, N, N_t) and h_ib must be (N_r, N)")
        if self.h_ui.shape[1] != self.h_ib.shape[1]:
            raise ShapeMismatchError(
                f"IRS size mismatch: h_ui has N={self.h_ui.shape[1]}, h_ib has N={self.h_ib.shape[1]}"
            )

    @property
    def K(self) -> int:
        return self.h_ui.shape[0]

    @property
    def N(self) -> int:
        return self.h_ib.shape[1]

    @property
    def N_r(self) -> int:
        return self.h_ib.shape[0]

    @property
    def N_t(self) -> int:
        return self.h_ui.shape[2]

    def check_finite(self) -> None:
        _check_finite("h_ui", self.h_ui)
        _check_finite("h_ib", self.h_ib)

    def matches(self, cfg: SystemConfig) -> bool:
        return self.h_ui.shape == (cfg.K, cfg.N, cfg.N_t) and self.h_ib.shape == (cfg.N_r, cfg.N)


@dataclass
class PrecoderSet:
    """Per-user precoders stacked as a ``(K, N_t, N_s)`` array with a shared power budget."""

    p: np.ndarray
    omega: float

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=complex)
        if self.p.ndim != 3:
            raise ShapeMismatchError("precoders must be stacked as (K, N_t, N_s)")

    @property
    def K(self) -> int:
        return self.p.shape[0]

    def powers(self) -> np.ndarray:
        """Squared Frobenius norm of every user's precoder."""
        return np.sum(np.abs(self.p) ** 2, axis=(1, 2))

    def is_feasible(self) -> bool:
        return bool(np.all(np.isfinite(self.p)) and np.all(self.powers() <= self.omega * (1 + POWER_SLACK)))

    def block_diagonal(self) -> np.ndarray:
        """The ``(K*N_t, K*N_s)`` block-diagonal precoding matrix."""
        K, nt, ns = self.p.shape
        out = np.zeros((K * nt, K * ns), dtype=complex)
        for k in range(K):
            out[k * nt:(k + 1) * nt, k * ns:(k + 1) * ns] = self.p[k]
        return out


@dataclass
class IrsPhaseVector:
    """Diagonal of the IRS phase-shift matrix."""

    theta: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=complex).reshape(-1)

    @property
    def N(self) -> int:
        return self.theta.shape[0]

    def is_feasible(self) -> bool:
        return bool(np.all(np.isfinite(self.theta)) and np.all(np.abs(np.abs(self.theta) - 1.0) <= MODULUS_TOL))

    def phases(self) -> np.ndarray:
        """Phases in ``[0, 2*pi)``."""
        return np.mod(np.angle(self.theta), 2 * np.pi)

    def matrix(self) -> np.ndarray:
        return np.diag(self.theta)


@dataclass(frozen=True)
class RateReport:
    """Per-user achievable rates in bit/s/Hz and their sum."""

    per_user: np.ndarray
    sum: float = field(init=False)

    def __post_init__(self):
        per_user = np.asarray(self.per_user, dtype=float)
        object.__setattr__(self, "per_user", per_user)
        object.__setattr__(self, "sum", float(np.sum(per_user)))
