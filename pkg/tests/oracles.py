"""Independent reference implementations used by the tests.

Nothing here imports the package's rate code: every quantity is recomputed
from its textbook definition with plain numpy (explicit inverses, loops).
"""

import numpy as np

from irsddpg.core import ChannelSet, IrsPhaseVector, PrecoderSet, SystemConfig


def random_instance(rng, K=2, N_t=2, N_s=1, N_r=4, N=6, omega=10.0, noise_var=1.0):
    cfg = SystemConfig(K=K, N_t=N_t, N_s=N_s, N_r=N_r, N=N, omega=omega, noise_var=noise_var)
    cg = lambda *s: (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / np.sqrt(2)
    ch = ChannelSet(h_ui=cg(K, N, N_t), h_ib=cg(N_r, N))
    irs = IrsPhaseVector(theta=np.exp(1j * rng.uniform(0, 2 * np.pi, N)))
    raw = cg(K, N_t, N_s)
    p = raw * np.sqrt(omega) / np.linalg.norm(raw, axis=(1, 2))[:, None, None]
    return cfg, ch, irs, PrecoderSet(p=p, omega=omega)


def naive_cascade(h_ib, theta, h_ui_k):
    """G = H_IB diag(theta) H_UI_k by explicit triple sum."""
    n_r, n = h_ib.shape
    n_t = h_ui_k.shape[1]
    g = np.zeros((n_r, n_t), dtype=complex)
    for r in range(n_r):
        for t in range(n_t):
            for m in range(n):
                g[r, t] += h_ib[r, m] * theta[m] * h_ui_k[m, t]
    return g


def _gp(ch, irs, pre):
    return [naive_cascade(ch.h_ib, irs.theta, ch.h_ui[k]) @ pre.p[k] for k in range(ch.K)]


def wfree_rate(ch, irs, pre, noise_var, k):
    """log2 det(I + P^H G^H R^{-1} G P) with R the interference-plus-noise covariance."""
    gp = _gp(ch, irs, pre)
    n_r = ch.N_r
    r = noise_var * np.eye(n_r, dtype=complex)
    for i, a in enumerate(gp):
        if i != k:
            r = r + a @ a.conj().T
    m = np.eye(gp[k].shape[1]) + gp[k].conj().T @ np.linalg.inv(r) @ gp[k]
    return float(np.log2(np.linalg.det(m).real))


def mmse_error_rate(ch, irs, pre, noise_var, k):
    """-log2 det(E_k) where E_k = I - P^H G^H C^{-1} G P is the MMSE error covariance."""
    gp = _gp(ch, irs, pre)
    c = noise_var * np.eye(ch.N_r, dtype=complex)
    for a in gp:
        c = c + a @ a.conj().T
    e = np.eye(gp[k].shape[1]) - gp[k].conj().T @ np.linalg.inv(c) @ gp[k]
    return float(-np.log2(np.linalg.det(e).real))


def explicit_filter_mse(w_h, ch, irs, pre, noise_var, k):
    """E||W^H y - s_k||^2 with unit-power independent symbols, expanded term by term."""
    gp = _gp(ch, irs, pre)
    n_s = gp[k].shape[1]
    err = w_h @ gp[k] - np.eye(n_s)
    total = np.sum(np.abs(err) ** 2)
    for i, a in enumerate(gp):
        if i != k:
            total += np.sum(np.abs(w_h @ a) ** 2)
    total += noise_var * np.sum(np.abs(w_h) ** 2)
    return float(total)


def max_relative_error(analytic, numeric, atol=1e-9):
    """Max of |a - n| / max(|a|, |n|) over all entries.

    Entries closer than ``atol`` count as agreeing: central differences of an
    O(10) loss with h = 1e-5 carry roughly 1e-10 of rounding noise, so an
    exactly-zero gradient (e.g. a bias feeding batch norm) cannot do better.
    """
    a = np.concatenate([np.ravel(x) for x in analytic])
    n = np.concatenate([np.ravel(x) for x in numeric])
    diff = np.abs(a - n)
    scale = np.maximum(np.abs(a), np.abs(n))
    rel = np.where(diff < atol, 0.0, diff / np.where(scale > 0, scale, 1.0))
    return float(np.max(rel))


def _relu_masks(cache):
    out = []

    def walk(item):
        if isinstance(item, np.ndarray) and item.dtype == bool:
            out.append(item)
        elif isinstance(item, (list, tuple)):
            for x in item:
                walk(x)

    walk(cache.layers)
    return out


def finite_difference_check(net, batch, mode, rng, h=1e-5, max_skipped=0.01):
    """Central differences of L = sum(c * net(x)) against the analytic backward pass.

    Returns the max relative error over every trainable parameter and every
    input entry. Running statistics are never updated while probing. A probe
    whose +/-h evaluations flip some ReLU is skipped, since the loss is not
    differentiable across the kink; at most ``max_skipped`` of the probes may be
    skipped or the check fails outright.
    """
    from irsddpg.neural import backward, forward

    c = rng.standard_normal((batch.shape[0], net.out_width))
    _, cache = forward(net.spec, net.params, batch, mode, update_stats=False)
    base_masks = _relu_masks(cache)
    grads, dx = backward(net.spec, net.params, cache, c)

    def loss():
        y, probe = forward(net.spec, net.params, batch, mode, update_stats=False)
        smooth = all(np.array_equal(m, b) for m, b in zip(_relu_masks(probe), base_masks))
        return float(np.sum(c * y)), smooth

    analytic, numeric = [], []
    skipped = total = 0
    for target, a_grad in list(zip(net.params.trainable, grads)) + [(batch, dx)]:
        for idx in np.ndindex(target.shape):
            old = target[idx]
            target[idx] = old + h
            up, ok_up = loss()
            target[idx] = old - h
            down, ok_down = loss()
            target[idx] = old
            total += 1
            if not (ok_up and ok_down):
                skipped += 1
                continue
            analytic.append(a_grad[idx])
            numeric.append((up - down) / (2 * h))
    assert skipped <= max_skipped * total, f"{skipped} of {total} probes crossed a ReLU kink"
    return max_relative_error([np.array(analytic)], [np.array(numeric)])
