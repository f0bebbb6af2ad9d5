"""Binary checkpoint files.

Layout::

    b"IRSDDPG1"              8-byte magic
    version                  1 byte
    header_length            uint64, little-endian
    header                   UTF-8 JSON: network specs, array shapes, optimizer
                             hyperparameters, metadata, payload byte length
    payload                  every array as little-endian float64, row-major,
                             in header declaration order
    checksum                 8-byte BLAKE2b digest of the payload
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from irsddpg.errors import IntegrityError
from irsddpg.neural.network import Network, ParameterSet, check_params
from irsddpg.neural.optim import AdamState
from irsddpg.neural.spec import NetworkSpec

MAGIC = b"IRSDDPG1"
VERSION = 1
_LEN = struct.Struct("<Q")


@dataclass
class Checkpoint:
    networks: dict[str, Network]
    optimizers: dict[str, AdamState] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _checksum(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=8).digest()


def encode_arrays(arrays) -> bytes:
    return b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)


def save_checkpoint(path, networks: dict[str, Network], optimizers: dict[str, AdamState] | None = None,
                    metadata: dict | None = None) -> Path:
    optimizers = optimizers or {}
    arrays: list[np.ndarray] = []
    header: dict = {"networks": {}, "optimizers": {}, "metadata": metadata or {}}
    for name, net in networks.items():
        header["networks"][name] = {
            "spec": net.spec.to_dict(),
            "trainable": [list(a.shape) for a in net.params.trainable],
            "state": [list(a.shape) for a in net.params.state],
        }
        arrays.extend(net.params.trainable)
        arrays.extend(net.params.state)
    for name, opt in optimizers.items():
        header["optimizers"][name] = {
            "lr": opt.lr, "beta1": opt.beta1, "beta2": opt.beta2, "eps": opt.eps, "step": opt.step,
            "shapes": [list(a.shape) for a in opt.m],
        }
        arrays.extend(opt.m)
        arrays.extend(opt.v)
    payload = encode_arrays(arrays)
    header["payload_bytes"] = len(payload)
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        fh.write(_LEN.pack(len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)
        fh.write(_checksum(payload))
    return path


def read_header(path) -> dict:
    """Parse and return only the JSON header (no payload verification)."""
    data = Path(path).read_bytes()
    header, _ = _split(data)
    return header


def _split(data: bytes) -> tuple[dict, int]:
    if len(data) < len(MAGIC) + 1 + _LEN.size or data[: len(MAGIC)] != MAGIC:
        raise IntegrityError("not a checkpoint file (bad magic)")
    version = data[len(MAGIC)]
    if version != VERSION:
        raise IntegrityError(f"unsupported checkpoint version {version}")
    pos = len(MAGIC) + 1
    (hlen,) = _LEN.unpack_from(data, pos)
    pos += _LEN.size
    if pos + hlen > len(data):
        raise IntegrityError("truncated checkpoint header")
    try:
        header = json.loads(data[pos:pos + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"corrupt checkpoint header: {exc}") from exc
    return header, pos + hlen


def load_checkpoint(path) -> Checkpoint:
    data = Path(path).read_bytes()
    header, pos = _split(data)
    n = int(header.get("payload_bytes", -1))
    if n < 0 or pos + n + 8 != len(data):
        raise IntegrityError("checkpoint payload length does not match its header (truncated file?)")
    payload = data[pos:pos + n]
    if _checksum(payload) != data[pos + n:]:
        raise IntegrityError("checkpoint checksum mismatch")
    flat = np.frombuffer(payload, dtype="<f8")
    cursor = 0

    def take(shape) -> np.ndarray:
        nonlocal cursor
        size = int(np.prod(shape)) if shape else 1
        if cursor + size > flat.size:
            raise IntegrityError("checkpoint payload shorter than declared shapes")
        arr = flat[cursor:cursor + size].reshape(shape).astype(np.float64)
        cursor += size
        return arr

    networks = {}
    for name, entry in header["networks"].items():
        spec = NetworkSpec.from_dict(entry["spec"])
        params = ParameterSet([take(tuple(s)) for s in entry["trainable"]], [take(tuple(s)) for s in entry["state"]])
        check_params(spec, params)
        networks[name] = Network(spec, params)
    optimizers = {}
    for name, entry in header["optimizers"].items():
        shapes = [tuple(s) for s in entry["shapes"]]
        m = [take(s) for s in shapes]
        v = [take(s) for s in shapes]
        optimizers[name] = AdamState(entry["lr"], entry["beta1"], entry["beta2"], entry["eps"], int(entry["step"]), m, v)
    if cursor != flat.size:
        raise IntegrityError("checkpoint payload longer than declared shapes")
    return Checkpoint(networks, optimizers, header.get("metadata", {}))
