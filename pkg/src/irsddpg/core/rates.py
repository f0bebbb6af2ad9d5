"""Cascaded channels, MMSE receive filters and achievable rates."""

from __future__ import annotations

import numpy as np
from scipy import linalg as sla

from irsddpg.core.system import ChannelSet, IrsPhaseVector, PrecoderSet, RateReport
from irsddpg.errors import NumericalInputError, ShapeMismatchError

# singular values of W^H below this fraction of the largest are treated as zero
_RANK_TOL = 1e-10
_NEG_SLACK = 1e-12


def _check_inputs(ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float) -> None:
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var!r}")
    if irs.N != ch.N:
        raise ShapeMismatchError(f"IRS vector has {irs.N} entries, channels expect {ch.N}")
    if pre.K != ch.K or pre.p.shape[1] != ch.N_t:
        raise ShapeMismatchError(f"precoders {pre.p.shape} do not match channels (K={ch.K}, N_t={ch.N_t})")
    for name, arr in (("h_ui", ch.h_ui), ("h_ib", ch.h_ib), ("theta", irs.theta), ("p", pre.p)):
        if not np.all(np.isfinite(arr)):
            raise NumericalInputError(f"{name} contains non-finite entries")


def _check_user(ch: ChannelSet, k: int) -> None:
    if not 0 <= k < ch.K:
        raise IndexError(f"user index {k} out of range for K={ch.K}")


def effective_channel(ch: ChannelSet, irs: IrsPhaseVector, k: int) -> np.ndarray:
    """Cascaded channel ``G_k = H_IB diag(theta) H_UI_k`` of shape ``(N_r, N_t)``."""
    _check_user(ch, k)
    return ch.h_ib @ (irs.theta[:, None] * ch.h_ui[k])


def effective_channels(ch: ChannelSet, irs: IrsPhaseVector) -> np.ndarray:
    """All cascaded channels stacked as ``(K, N_r, N_t)``."""
    return np.einsum("rn,knt->krt", ch.h_ib * irs.theta[None, :], ch.h_ui)


def _received_terms(ch, irs, pre, noise_var):
    """Per-user received signal maps ``G_k P_k`` and the full covariance at the BS."""
    gp = effective_channels(ch, irs) @ pre.p
    cov = np.einsum("krs,kqs->rq", gp, gp.conj()) + noise_var * np.eye(ch.N_r)
    return gp, cov


def _hpd_logdet(a: np.ndarray) -> float:
    chol = np.linalg.cholesky(a)
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))


def mmse_filter(ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float, k: int) -> np.ndarray:
    """MMSE receive filter ``W_k^H`` of shape ``(N_s, N_r)`` for user ``k``.

    ``W_k^H = (G_k P_k)^H (sum_i G_i P_i P_i^H G_i^H + noise_var I)^{-1}``.
    """
    _check_inputs(ch, irs, pre, noise_var)
    _check_user(ch, k)
    gp, cov = _received_terms(ch, irs, pre, noise_var)
    return _mmse_from_terms(gp, cov, k)


def _mmse_from_terms(gp: np.ndarray, cov: np.ndarray, k: int) -> np.ndarray:
    factor = sla.cho_factor(cov, lower=True)
    # cov is Hermitian, so W_k = cov^{-1} G_k P_k
    return sla.cho_solve(factor, gp[k]).conj().T


def filter_mse(w_h: np.ndarray, ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float, k: int) -> float:
    """Mean-squared error ``E||W_k^H y - x_k||^2`` for unit-power i.i.d. symbols."""
    gp, cov = _received_terms(ch, irs, pre, noise_var)
    ns = gp.shape[2]
    mse = np.trace(w_h @ cov @ w_h.conj().T) - 2 * np.real(np.trace(w_h @ gp[k])) + ns
    return float(np.real(mse))


def _rate_from_terms(gp: np.ndarray, cov: np.ndarray, k: int) -> float:
    w_h = _mmse_from_terms(gp, cov, k)
    signal = gp[k] @ gp[k].conj().T
    interference = cov - signal
    s = np.linalg.svd(w_h, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    # with N_r < N_s the thin SVD has fewer than N_s values and W^H is rank deficient
    if s.size == w_h.shape[0] and s[-1] > _RANK_TOL * s[0]:
        # sum_{i != k} W^H G_i P_i P_i^H G_i^H W + noise_var W^H W
        x = w_h @ interference @ w_h.conj().T
        sig = w_h @ signal @ w_h.conj().T
        x = 0.5 * (x + x.conj().T)
        sig = 0.5 * (sig + sig.conj().T)
        try:
            rate = (_hpd_logdet(x + sig) - _hpd_logdet(x)) / np.log(2.0)
        except np.linalg.LinAlgError:
            rate = _reduced_rate(w_h, signal, interference)
    else:
        rate = _reduced_rate(w_h, signal, interference)
    if rate < -_NEG_SLACK:
        raise ArithmeticError(f"negative rate {rate!r} for user {k}")
    return max(rate, 0.0)


def _reduced_rate(w_h, signal, interference) -> float:
    # W_k^H loses rank when G_k P_k does; restrict to the filter's row space so
    # the interference-plus-noise term stays invertible.
    _, sv, vh = np.linalg.svd(w_h)
    r = int(np.sum(sv > _RANK_TOL * sv[0]))
    basis = vh[:r].conj().T
    x = basis.conj().T @ interference @ basis
    sig = basis.conj().T @ signal @ basis
    x = 0.5 * (x + x.conj().T)
    sig = 0.5 * (sig + sig.conj().T)
    return (_hpd_logdet(x + sig) - _hpd_logdet(x)) / np.log(2.0)


def user_rate(ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float, k: int) -> float:
    """Achievable rate of user ``k`` in bit/s/Hz under MMSE reception.

    ``R_k = log2 det(I_{N_s} + X_k^{-1} W_k^H G_k P_k P_k^H G_k^H W_k)`` where
    ``X_k`` is the filtered interference-plus-noise covariance.
    """
    _check_inputs(ch, irs, pre, noise_var)
    _check_user(ch, k)
    gp, cov = _received_terms(ch, irs, pre, noise_var)
    return _rate_from_terms(gp, cov, k)


def sum_rate(ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float) -> RateReport:
    _check_inputs(ch, irs, pre, noise_var)
    gp, cov = _received_terms(ch, irs, pre, noise_var)
    return RateReport(per_user=np.array([_rate_from_terms(gp, cov, k) for k in range(ch.K)]))


def sum_rate_value(ch: ChannelSet, irs: IrsPhaseVector, pre: PrecoderSet, noise_var: float) -> float:
    return sum_rate(ch, irs, pre, noise_var).sum
