import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsddpg.core import (
    ChannelSet,
    IrsPhaseVector,
    PrecoderSet,
    effective_channel,
    effective_channels,
    filter_mse,
    mmse_filter,
    sum_rate,
    sum_rate_value,
    user_rate,
)
from irsddpg.errors import NumericalInputError, ShapeMismatchError
from oracles import explicit_filter_mse, mmse_error_rate, naive_cascade, random_instance, wfree_rate

dims = st.fixed_dictionaries({
    "K": st.integers(1, 3), "N_t": st.integers(1, 2), "N_s": st.integers(1, 2),
    "N_r": st.integers(1, 4), "N": st.integers(1, 6),
})


def scalar_system(omega=10.0, h=1.0, theta=1.0):
    ch = ChannelSet(h_ui=np.full((1, 1, 1), h, dtype=complex), h_ib=np.ones((1, 1), dtype=complex))
    irs = IrsPhaseVector(theta=np.array([theta], dtype=complex))
    pre = PrecoderSet(p=np.full((1, 1, 1), np.sqrt(omega), dtype=complex), omega=omega)
    return ch, irs, pre


def test_scalar_shannon():
    ch, irs, pre = scalar_system()
    assert abs(sum_rate_value(ch, irs, pre, 1.0) - np.log2(11.0)) < 1e-12


def test_scalar_filter():
    ch, irs, pre = scalar_system()
    w_h = mmse_filter(ch, irs, pre, 1.0, 0)
    assert w_h.shape == (1, 1)
    assert abs(w_h[0, 0] - np.sqrt(10) / 11) < 1e-15


def test_scalar_cascade():
    ch = ChannelSet(h_ui=np.full((1, 1, 1), 3.0 + 0j), h_ib=np.full((1, 1), 2.0 + 0j))
    g = effective_channel(ch, IrsPhaseVector(np.array([np.exp(1j * np.pi)])), 0)
    assert abs(g[0, 0] + 6) < 1e-14


def test_cascade_matches_loops(rng):
    cfg, ch, irs, _ = random_instance(rng, K=3, N_t=2, N_r=4, N=6)
    for k in range(3):
        np.testing.assert_allclose(effective_channel(ch, irs, k), naive_cascade(ch.h_ib, irs.theta, ch.h_ui[k]),
                                   atol=1e-13)
    stacked = effective_channels(ch, irs)
    np.testing.assert_allclose(stacked[1], effective_channel(ch, irs, 1), atol=1e-14)


def test_identity_phases_is_plain_product(rng):
    _, ch, _, _ = random_instance(rng)
    ones = IrsPhaseVector(np.ones(ch.N, dtype=complex))
    np.testing.assert_allclose(effective_channel(ch, ones, 0), ch.h_ib @ ch.h_ui[0], atol=1e-14)


def test_user_index_checked(rng):
    _, ch, irs, _ = random_instance(rng)
    with pytest.raises(IndexError):
        effective_channel(ch, irs, 2)


def test_zero_precoders():
    rng = np.random.default_rng(3)
    _, ch, irs, pre = random_instance(rng, K=2)
    zero = PrecoderSet(p=np.zeros_like(pre.p), omega=pre.omega)
    assert sum_rate_value(ch, irs, zero, 1.0) == 0.0
    np.testing.assert_array_equal(mmse_filter(ch, irs, zero, 1.0, 0), 0)
    p = pre.p.copy()
    p[1] = 0
    one_off = PrecoderSet(p=p, omega=pre.omega)
    assert user_rate(ch, irs, one_off, 1.0, 1) == 0.0
    assert user_rate(ch, irs, one_off, 1.0, 0) > 0


def test_frozen_instance():
    # rates of this seeded instance, frozen from the W-free oracle in tests/oracles.py
    _, ch, irs, pre = random_instance(np.random.default_rng(2024), K=3, N_t=2, N_s=2, N_r=4, N=6)
    report = sum_rate(ch, irs, pre, 1.0)
    np.testing.assert_allclose(report.per_user, [5.542928144231273, 5.371115166218951, 5.677076895494258],
                               rtol=1e-11)
    assert abs(report.sum - float(np.sum(report.per_user))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(d=dims, seed=st.integers(0, 2**32 - 1), snr=st.floats(-10, 20))
def test_rate_matches_wfree_oracle(d, seed, snr):
    _, ch, irs, pre = random_instance(np.random.default_rng(seed), omega=10 ** (snr / 10), **d)
    for k in range(d["K"]):
        got = user_rate(ch, irs, pre, 1.0, k)
        want = wfree_rate(ch, irs, pre, 1.0, k)
        assert got >= 0
        assert abs(got - want) <= 1e-9 * max(abs(want), 1e-300) or abs(got - want) < 1e-13


@settings(max_examples=40, deadline=None)
@given(d=dims, seed=st.integers(0, 2**32 - 1))
def test_rate_matches_error_covariance_oracle(d, seed):
    _, ch, irs, pre = random_instance(np.random.default_rng(seed), **d)
    for k in range(d["K"]):
        assert user_rate(ch, irs, pre, 1.0, k) == pytest.approx(mmse_error_rate(ch, irs, pre, 1.0, k),
                                                                rel=1e-9, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(d=dims, seed=st.integers(0, 2**32 - 1))
def test_sum_rate_invariant_to_user_order(d, seed):
    _, ch, irs, pre = random_instance(np.random.default_rng(seed), **d)
    perm = np.random.default_rng(seed).permutation(d["K"])
    ch2 = ChannelSet(h_ui=ch.h_ui[perm], h_ib=ch.h_ib)
    pre2 = PrecoderSet(p=pre.p[perm], omega=pre.omega)
    assert sum_rate_value(ch2, irs, pre2, 1.0) == pytest.approx(sum_rate_value(ch, irs, pre, 1.0), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(d=dims, seed=st.integers(0, 2**32 - 1), phi=st.floats(0, 2 * np.pi))
def test_common_phase_rotation_invariance(d, seed, phi):
    _, ch, irs, pre = random_instance(np.random.default_rng(seed), **d)
    rotated = IrsPhaseVector(irs.theta * np.exp(1j * phi))
    assert sum_rate_value(ch, rotated, pre, 1.0) == pytest.approx(sum_rate_value(ch, irs, pre, 1.0),
                                                                  rel=1e-9, abs=1e-12)


def test_filter_mse_closed_form_matches_expansion(rng):
    _, ch, irs, pre = random_instance(rng, K=3, N_s=2, N_r=4)
    w_h = mmse_filter(ch, irs, pre, 1.0, 1)
    assert filter_mse(w_h, ch, irs, pre, 1.0, 1) == pytest.approx(explicit_filter_mse(w_h, ch, irs, pre, 1.0, 1),
                                                                  rel=1e-12)
    other = w_h + 0.1 * rng.standard_normal(w_h.shape)
    assert filter_mse(other, ch, irs, pre, 1.0, 1) == pytest.approx(
        explicit_filter_mse(other, ch, irs, pre, 1.0, 1), rel=1e-12)


def test_mmse_filter_is_a_minimum():
    rng = np.random.default_rng(77)
    for _ in range(5):
        _, ch, irs, pre = random_instance(rng, K=3, N_t=2, N_s=1, N_r=4, N=6)
        for k in range(3):
            w_h = mmse_filter(ch, irs, pre, 1.0, k)
            best = filter_mse(w_h, ch, irs, pre, 1.0, k)
            for _ in range(20):
                d = rng.standard_normal(w_h.shape) + 1j * rng.standard_normal(w_h.shape)
                d *= 1e-2 / np.linalg.norm(d)
                assert best <= filter_mse(w_h + d, ch, irs, pre, 1.0, k)


def test_rejects_bad_inputs(rng):
    _, ch, irs, pre = random_instance(rng)
    with pytest.raises(ValueError):
        sum_rate(ch, irs, pre, 0.0)
    with pytest.raises(ShapeMismatchError):
        sum_rate(ch, IrsPhaseVector(np.ones(ch.N + 1, dtype=complex)), pre, 1.0)
    p = pre.p.copy()
    p[0, 0, 0] = np.nan
    with pytest.raises(NumericalInputError):
        sum_rate(ch, irs, PrecoderSet(p=p, omega=pre.omega), 1.0)


def test_more_power_more_rate_single_user(rng):
    _, ch, irs, pre = random_instance(rng, K=1, N_s=2)
    low = sum_rate_value(ch, irs, pre, 1.0)
    scaled = PrecoderSet(p=pre.p * 2, omega=pre.omega * 4)
    assert sum_rate_value(ch, irs, scaled, 1.0) > low
