"""Declarative network descriptions.

A :class:`NetworkSpec` is an ordered tuple of layer descriptors. Descriptors
are frozen dataclasses, so specs are hashable and compare by value; that is
what checkpoint loading relies on to detect architecture mismatches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from irsddpg.errors import ShapeMismatchError

ACTIVATIONS = ("relu", "tanh", "linear")
HEAD_MAPS = ("identity", "normalize", "unit_modulus")


@dataclass(frozen=True)
class Dense:
    n_in: int
    n_out: int


@dataclass(frozen=True)
class BatchNorm:
    width: int
    momentum: float = 0.99
    eps: float = 1e-5


@dataclass(frozen=True)
class Activation:
    kind: str

    def __post_init__(self):
        if self.kind not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.kind!r}")


@dataclass(frozen=True)
class HeadMap:
    """Post-map applied to a head output viewed as interleaved (re, im) pairs.

    ``normalize`` rescales each row to squared norm ``scale`` (a precoder power
    budget); ``unit_modulus`` divides every complex pair by its modulus.
    """

    kind: str = "identity"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in HEAD_MAPS:
            raise ValueError(f"unknown head map {self.kind!r}")


@dataclass(frozen=True)
class Concat:
    """Split the input by branch widths, run each branch, concatenate the outputs."""

    branches: tuple["NetworkSpec", ...]


@dataclass(frozen=True)
class MultiHead:
    """Feed the same input to every head, apply its post-map, concatenate."""

    heads: tuple["NetworkSpec", ...]
    maps: tuple[HeadMap, ...]

    def __post_init__(self):
        if len(self.heads) != len(self.maps):
            raise ValueError("every head needs exactly one post-map")


Layer = Union[Dense, BatchNorm, Activation, Concat, MultiHead]


def _layer_in(layer) -> int | None:
    if isinstance(layer, Dense):
        return layer.n_in
    if isinstance(layer, BatchNorm):
        return layer.width
    if isinstance(layer, Concat):
        return sum(b.in_width for b in layer.branches)
    if isinstance(layer, MultiHead):
        widths = {h.in_width for h in layer.heads}
        if len(widths) != 1:
            raise ShapeMismatchError(f"multi-head input widths disagree: {sorted(widths)}")
        return widths.pop()
    return None


def _layer_out(layer, width_in: int | None) -> int | None:
    if isinstance(layer, Dense):
        return layer.n_out
    if isinstance(layer, BatchNorm):
        return layer.width
    if isinstance(layer, Concat):
        return sum(b.out_width for b in layer.branches)
    if isinstance(layer, MultiHead):
        return sum(h.out_width for h in layer.heads)
    return width_in


@dataclass(frozen=True)
class NetworkSpec:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        width = None
        for i, layer in enumerate(self.layers):
            w_in = _layer_in(layer)
            if w_in is not None and width is not None and w_in != width:
                raise ShapeMismatchError(f"layer {i} ({type(layer).__name__}) expects width {w_in}, got {width}")
            if isinstance(layer, MultiHead):
                for head, hmap in zip(layer.heads, layer.maps):
                    if hmap.kind == "unit_modulus" and head.out_width % 2:
                        raise ShapeMismatchError("unit-modulus head needs an even (re, im) width")
            width = _layer_out(layer, width if w_in is None else w_in)
        if self.in_width is None or width is None:
            raise ShapeMismatchError("network input/output width cannot be derived")

    @property
    def in_width(self) -> int | None:
        for layer in self.layers:
            w = _layer_in(layer)
            if w is not None:
                return w
        return None

    @property
    def out_width(self) -> int:
        width = None
        for layer in self.layers:
            w_in = _layer_in(layer)
            width = _layer_out(layer, width if w_in is None else w_in)
        return width

    def to_dict(self) -> dict:
        return {"layers": [_layer_to_dict(layer) for layer in self.layers]}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        return cls(tuple(_layer_from_dict(item) for item in d["layers"]))


def sequential(*layers: Layer) -> NetworkSpec:
    return NetworkSpec(tuple(layers))


def _layer_to_dict(layer) -> dict:
    if isinstance(layer, Dense):
        return {"kind": "dense", "in": layer.n_in, "out": layer.n_out}
    if isinstance(layer, BatchNorm):
        return {"kind": "batch_norm", "width": layer.width, "momentum": layer.momentum, "eps": layer.eps}
    if isinstance(layer, Activation):
        return {"kind": "activation", "fn": layer.kind}
    if isinstance(layer, Concat):
        return {"kind": "concat", "branches": [b.to_dict() for b in layer.branches]}
    if isinstance(layer, MultiHead):
        return {
            "kind": "multi_head",
            "heads": [h.to_dict() for h in layer.heads],
            "maps": [{"kind": m.kind, "scale": m.scale} for m in layer.maps],
        }
    raise TypeError(f"not a layer: {layer!r}")


def _layer_from_dict(d: dict):
    kind = d["kind"]
    if kind == "dense":
        return Dense(int(d["in"]), int(d["out"]))
    if kind == "batch_norm":
        return BatchNorm(int(d["width"]), float(d["momentum"]), float(d["eps"]))
    if kind == "activation":
        return Activation(d["fn"])
    if kind == "concat":
        return Concat(tuple(NetworkSpec.from_dict(b) for b in d["branches"]))
    if kind == "multi_head":
        return MultiHead(
            tuple(NetworkSpec.from_dict(h) for h in d["heads"]),
            tuple(HeadMap(m["kind"], float(m["scale"])) for m in d["maps"]),
        )
    raise ValueError(f"unknown layer kind {kind!r}")
