"""Forward and reverse-mode passes over a :class:`NetworkSpec`.

Parameters live in a flat :class:`ParameterSet`, ordered by a depth-first walk
of the spec: each dense layer contributes ``(W, b)``, each batch-norm layer
contributes ``(gamma, beta)`` to the trainable list and ``(running_mean,
running_var)`` to the non-trainable state list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from irsddpg.errors import NumericalInputError, ShapeMismatchError
from irsddpg.neural.spec import Activation, BatchNorm, Concat, Dense, HeadMap, MultiHead, NetworkSpec

_DIV_EPS = 1e-12
MODES = ("train", "infer")


@dataclass
class ParameterSet:
    trainable: list[np.ndarray]
    state: list[np.ndarray] = field(default_factory=list)

    def copy(self) -> "ParameterSet":
        return ParameterSet([a.copy() for a in self.trainable], [a.copy() for a in self.state])

    def arrays(self) -> list[np.ndarray]:
        return self.trainable + self.state

    def n_trainable(self) -> int:
        return int(sum(a.size for a in self.trainable))

    def shapes(self) -> tuple[list[tuple], list[tuple]]:
        return [a.shape for a in self.trainable], [a.shape for a in self.state]


# --- plan: the network spec annotated with parameter indices -------------------------

@dataclass(frozen=True)
class _Node:
    kind: str
    layer: object
    idx: tuple = ()
    children: tuple = ()


@lru_cache(maxsize=256)
def _plan(spec: NetworkSpec):
    counter = {"t": 0, "s": 0}

    def walk(s: NetworkSpec):
        nodes = []
        for layer in s.layers:
            if isinstance(layer, Dense):
                t = counter["t"]
                counter["t"] += 2
                nodes.append(_Node("dense", layer, (t, t + 1)))
            elif isinstance(layer, BatchNorm):
                t, st = counter["t"], counter["s"]
                counter["t"] += 2
                counter["s"] += 2
                nodes.append(_Node("bn", layer, (t, t + 1, st, st + 1)))
            elif isinstance(layer, Activation):
                nodes.append(_Node("act", layer))
            elif isinstance(layer, Concat):
                nodes.append(_Node("concat", layer, children=tuple(walk(b) for b in layer.branches)))
            elif isinstance(layer, MultiHead):
                nodes.append(_Node("multi_head", layer, children=tuple(walk(h) for h in layer.heads)))
            else:
                raise TypeError(f"unsupported layer {layer!r}")
        return tuple(nodes)

    nodes = walk(spec)
    return nodes, counter["t"], counter["s"]


def init_params(spec: NetworkSpec, rng: np.random.Generator) -> ParameterSet:
    """Glorot-uniform dense weights, zero biases; batch norm starts as the identity."""
    trainable: list[np.ndarray] = []
    state: list[np.ndarray] = []

    def walk(s: NetworkSpec):
        for layer in s.layers:
            if isinstance(layer, Dense):
                limit = np.sqrt(6.0 / (layer.n_in + layer.n_out))
                trainable.append(rng.uniform(-limit, limit, size=(layer.n_in, layer.n_out)))
                trainable.append(np.zeros(layer.n_out))
            elif isinstance(layer, BatchNorm):
                trainable.extend([np.ones(layer.width), np.zeros(layer.width)])
                state.extend([np.zeros(layer.width), np.ones(layer.width)])
            elif isinstance(layer, Concat):
                for b in layer.branches:
                    walk(b)
            elif isinstance(layer, MultiHead):
                for h in layer.heads:
                    walk(h)

    walk(spec)
    return ParameterSet(trainable, state)


def param_shapes(spec: NetworkSpec) -> tuple[list[tuple], list[tuple]]:
    trainable: list[tuple] = []
    state: list[tuple] = []

    def walk(s: NetworkSpec):
        for layer in s.layers:
            if isinstance(layer, Dense):
                trainable.extend([(layer.n_in, layer.n_out), (layer.n_out,)])
            elif isinstance(layer, BatchNorm):
                trainable.extend([(layer.width,), (layer.width,)])
                state.extend([(layer.width,), (layer.width,)])
            elif isinstance(layer, Concat):
                for b in layer.branches:
                    walk(b)
            elif isinstance(layer, MultiHead):
                for h in layer.heads:
                    walk(h)

    walk(spec)
    return trainable, state


def check_params(spec: NetworkSpec, params: ParameterSet) -> None:
    """Raise :class:`ShapeMismatchError` unless ``params`` fits ``spec`` exactly."""
    if param_shapes(spec) != params.shapes():
        raise ShapeMismatchError("parameter shapes do not match the network spec")


# --- head maps ---------------------------------------------------------------

def _head_forward(hmap: HeadMap, u: np.ndarray):
    if hmap.kind == "identity":
        return u, None
    if hmap.kind == "normalize":
        norm = np.sqrt(np.sum(u * u, axis=1, keepdims=True))
        tiny = norm < _DIV_EPS
        safe = np.where(tiny, 1.0, norm)
        y = np.sqrt(hmap.scale) * u / safe
        if np.any(tiny):
            fallback = np.sqrt(hmap.scale / u.shape[1])
            y = np.where(tiny, fallback, y)
        return y, (u, safe, tiny)
    pairs = u.reshape(u.shape[0], -1, 2)
    mod = np.sqrt(np.sum(pairs * pairs, axis=2, keepdims=True))
    tiny = mod < _DIV_EPS
    safe = np.where(tiny, 1.0, mod)
    y = pairs / safe
    if np.any(tiny):
        y = np.where(tiny, np.array([1.0, 0.0]), y)
    return y.reshape(u.shape), (y, safe, tiny)


def _head_backward(hmap: HeadMap, cache, g: np.ndarray) -> np.ndarray:
    if hmap.kind == "identity":
        return g
    if hmap.kind == "normalize":
        u, norm, tiny = cache
        proj = np.sum(u * g, axis=1, keepdims=True) / (norm * norm)
        du = np.sqrt(hmap.scale) / norm * (g - u * proj)
        return np.where(tiny, 0.0, du)
    y, mod, tiny = cache
    gp = g.reshape(y.shape)
    dv = (gp - y * np.sum(y * gp, axis=2, keepdims=True)) / mod
    dv = np.where(tiny, 0.0, dv)
    return dv.reshape(g.shape)


# --- forward / backward --------------------------------------------------------

def _forward_nodes(nodes, params: ParameterSet, x: np.ndarray, mode: str, update_stats: bool):
    caches = []
    for node in nodes:
        if node.kind == "dense":
            w, b = params.trainable[node.idx[0]], params.trainable[node.idx[1]]
            caches.append(x)
            x = x @ w + b
        elif node.kind == "bn":
            layer = node.layer
            gamma, beta = params.trainable[node.idx[0]], params.trainable[node.idx[1]]
            r_mean, r_var = params.state[node.idx[2]], params.state[node.idx[3]]
            if mode == "train":
                mean = x.mean(axis=0)
                var = x.var(axis=0)
                if update_stats:
                    r_mean *= layer.momentum
                    r_mean += (1 - layer.momentum) * mean
                    r_var *= layer.momentum
                    r_var += (1 - layer.momentum) * var
            else:
                mean, var = r_mean, r_var
            inv_std = 1.0 / np.sqrt(var + layer.eps)
            xhat = (x - mean) * inv_std
            caches.append((xhat, inv_std))
            x = gamma * xhat + beta
        elif node.kind == "act":
            kind = node.layer.kind
            if kind == "relu":
                mask = x > 0
                caches.append(mask)
                x = np.where(mask, x, 0.0)
            elif kind == "tanh":
                x = np.tanh(x)
                caches.append(x)
            else:
                caches.append(None)
        elif node.kind == "concat":
            outs, sub = [], []
            start = 0
            for child, branch in zip(node.children, node.layer.branches):
                stop = start + branch.in_width
                y, c = _forward_nodes(child, params, x[:, start:stop], mode, update_stats)
                outs.append(y)
                sub.append(c)
                start = stop
            caches.append(sub)
            x = np.concatenate(outs, axis=1)
        elif node.kind == "multi_head":
            outs, sub = [], []
            for child, hmap in zip(node.children, node.layer.maps):
                u, c = _forward_nodes(child, params, x, mode, update_stats)
                y, hc = _head_forward(hmap, u)
                outs.append(y)
                sub.append((c, hc))
            caches.append(sub)
            x = np.concatenate(outs, axis=1)
    return x, caches


def _backward_nodes(nodes, params: ParameterSet, caches, g: np.ndarray, grads: list, mode: str):
    for node, cache in zip(reversed(nodes), reversed(caches)):
        if node.kind == "dense":
            x = cache
            w = params.trainable[node.idx[0]]
            grads[node.idx[0]] += x.T @ g
            grads[node.idx[1]] += g.sum(axis=0)
            g = g @ w.T
        elif node.kind == "bn":
            xhat, inv_std = cache
            gamma = params.trainable[node.idx[0]]
            grads[node.idx[0]] += np.sum(g * xhat, axis=0)
            grads[node.idx[1]] += g.sum(axis=0)
            dxhat = g * gamma
            if mode == "train":
                n = g.shape[0]
                g = inv_std / n * (n * dxhat - dxhat.sum(axis=0) - xhat * np.sum(dxhat * xhat, axis=0))
            else:
                g = dxhat * inv_std
        elif node.kind == "act":
            kind = node.layer.kind
            if kind == "relu":
                g = g * cache
            elif kind == "tanh":
                g = g * (1.0 - cache * cache)
        elif node.kind == "concat":
            parts = []
            start = 0
            for child, branch, sub in zip(node.children, node.layer.branches, cache):
                stop = start + branch.out_width
                parts.append(_backward_nodes(child, params, sub, g[:, start:stop], grads, mode))
                start = stop
            g = np.concatenate(parts, axis=1)
        elif node.kind == "multi_head":
            total = None
            start = 0
            for child, head, hmap, (sub, hc) in zip(node.children, node.layer.heads, node.layer.maps, cache):
                stop = start + head.out_width
                gu = _head_backward(hmap, hc, g[:, start:stop])
                dx = _backward_nodes(child, params, sub, gu, grads, mode)
                total = dx if total is None else total + dx
                start = stop
            g = total
    return g


@dataclass
class ForwardCache:
    spec: NetworkSpec
    mode: str
    layers: list
    param_ids: tuple


def forward(spec: NetworkSpec, params: ParameterSet, batch: np.ndarray, mode: str = "infer",
            update_stats: bool = True) -> tuple[np.ndarray, ForwardCache]:
    """Run the network on a ``(B, in_width)`` batch.

    In ``train`` mode batch norm uses batch statistics and, unless
    ``update_stats`` is false, moves its running statistics. In ``infer`` mode
    it uses the running statistics, so every row is processed independently.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    x = np.asarray(batch, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != spec.in_width:
        raise ShapeMismatchError(f"batch of shape {x.shape} does not fit input width {spec.in_width}")
    if not np.all(np.isfinite(x)):
        raise NumericalInputError("batch contains non-finite entries")
    nodes, _, _ = _plan(spec)
    y, caches = _forward_nodes(nodes, params, x, mode, update_stats)
    return y, ForwardCache(spec, mode, caches, tuple(id(a) for a in params.trainable))


def backward(spec: NetworkSpec, params: ParameterSet, cache: ForwardCache,
             output_gradient: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Gradients of ``sum(output * output_gradient)`` w.r.t. the parameters and the input."""
    if cache.spec != spec or cache.param_ids != tuple(id(a) for a in params.trainable):
        raise ValueError("forward cache does not belong to this network/parameter set")
    nodes, _, _ = _plan(spec)
    grads = [np.zeros_like(a) for a in params.trainable]
    g = np.asarray(output_gradient, dtype=float)
    if g.ndim == 1:
        g = g[None, :]
    dx = _backward_nodes(nodes, params, cache.layers, g, grads, cache.mode)
    return grads, dx


class Network:
    """A spec bound to its parameters."""

    def __init__(self, spec: NetworkSpec, params: ParameterSet | None = None, rng: np.random.Generator | None = None):
        if params is None:
            params = init_params(spec, rng if rng is not None else np.random.default_rng())
        else:
            check_params(spec, params)
        self.spec = spec
        self.params = params

    def forward(self, batch, mode: str = "infer", update_stats: bool = True):
        return forward(self.spec, self.params, batch, mode, update_stats)

    def __call__(self, batch, mode: str = "infer") -> np.ndarray:
        return self.forward(batch, mode, update_stats=False)[0]

    def backward(self, cache: ForwardCache, output_gradient):
        return backward(self.spec, self.params, cache, output_gradient)

    def copy(self) -> "Network":
        return Network(self.spec, self.params.copy())

    @property
    def in_width(self) -> int:
        return self.spec.in_width

    @property
    def out_width(self) -> int:
        return self.spec.out_width
