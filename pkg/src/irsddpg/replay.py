"""Fixed-capacity experience replay with uniform mini-batch sampling."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from irsddpg.errors import InsufficientEntriesError, ShapeMismatchError

DEFAULT_CAPACITY = 100_000


class CbExperience(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    reward: float


class RlExperience(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


@dataclass
class Batch:
    """Stacked mini-batch; ``next_states`` is ``None`` for bandit experiences."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray | None = None

    def __len__(self) -> int:
        return self.states.shape[0]


class ReplayBuffer:
    """Ring buffer over preallocated arrays; the oldest entry is evicted first once full.

    Widths are fixed by the first pushed experience.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.count = 0
        self.cursor = 0
        self._states = self._actions = self._rewards = self._next = None
        self._kind = None

    def __len__(self) -> int:
        return self.count

    def _allocate(self, exp) -> None:
        self._kind = type(exp)
        self._states = np.empty((self.capacity, np.size(exp.state)))
        self._actions = np.empty((self.capacity, np.size(exp.action)))
        self._rewards = np.empty(self.capacity)
        if isinstance(exp, RlExperience):
            self._next = np.empty((self.capacity, np.size(exp.next_state)))

    def push(self, exp: CbExperience | RlExperience) -> None:
        if self._kind is None:
            self._allocate(exp)
        if type(exp) is not self._kind:
            raise ShapeMismatchError(f"buffer holds {self._kind.__name__}, got {type(exp).__name__}")
        state = np.asarray(exp.state, dtype=float).reshape(-1)
        action = np.asarray(exp.action, dtype=float).reshape(-1)
        if state.size != self._states.shape[1] or action.size != self._actions.shape[1]:
            raise ShapeMismatchError(
                f"experience widths ({state.size}, {action.size}) != buffer widths "
                f"({self._states.shape[1]}, {self._actions.shape[1]})"
            )
        i = self.cursor
        self._states[i] = state
        self._actions[i] = action
        self._rewards[i] = float(exp.reward)
        if self._next is not None:
            nxt = np.asarray(exp.next_state, dtype=float).reshape(-1)
            if nxt.size != self._next.shape[1]:
                raise ShapeMismatchError("next_state width differs from state width")
            self._next[i] = nxt
        self.cursor = (i + 1) % self.capacity
        self.count = min(self.count + 1, self.capacity)

    def _order(self) -> np.ndarray:
        """Storage slots from oldest to newest."""
        if self.count < self.capacity:
            return np.arange(self.count)
        return (np.arange(self.capacity) + self.cursor) % self.capacity

    def sample_indices(self, batch_size: int, rng: np.random.Generator) -> np.ndarray:
        """Logical indices (0 = oldest) drawn uniformly without replacement."""
        if batch_size > self.count:
            raise InsufficientEntriesError(f"buffer holds {self.count} entries, {batch_size} requested")
        return rng.choice(self.count, size=batch_size, replace=False)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        slots = self._order()[self.sample_indices(batch_size, rng)]
        # fancy indexing copies, so later pushes cannot alter the batch
        return Batch(
            states=self._states[slots],
            actions=self._actions[slots],
            rewards=self._rewards[slots],
            next_states=None if self._next is None else self._next[slots],
        )

    def experiences(self) -> list:
        """All stored experiences, oldest first, as value copies."""
        out = []
        for s in self._order():
            if self._next is None:
                out.append(CbExperience(self._states[s].copy(), self._actions[s].copy(), float(self._rewards[s])))
            else:
                out.append(RlExperience(self._states[s].copy(), self._actions[s].copy(), float(self._rewards[s]),
                                        self._next[s].copy()))
        return out

    def spill(self, path) -> Path:
        """Write the stored experiences (oldest first) using the checkpoint float format."""
        from irsddpg.neural.checkpoint import MAGIC, VERSION, _LEN, _checksum, encode_arrays
        import json

        order = self._order()
        arrays = [self._states[order], self._actions[order], self._rewards[order]]
        if self._next is not None:
            arrays.append(self._next[order])
        payload = encode_arrays(arrays)
        header = json.dumps({
            "kind": "replay",
            "experience": self._kind.__name__ if self._kind else None,
            "capacity": self.capacity,
            "shapes": [list(a.shape) for a in arrays],
            "payload_bytes": len(payload),
        }, sort_keys=True).encode()
        path = Path(path)
        with open(path, "wb") as fh:
            fh.write(MAGIC + bytes([VERSION]) + _LEN.pack(len(header)) + header + payload + _checksum(payload))
        return path

    @classmethod
    def restore(cls, path) -> "ReplayBuffer":
        from irsddpg.errors import IntegrityError
        from irsddpg.neural.checkpoint import _checksum, _split

        data = Path(path).read_bytes()
        header, pos = _split(data)
        n = header["payload_bytes"]
        payload = data[pos:pos + n]
        if len(data) != pos + n + 8 or _checksum(payload) != data[pos + n:]:
            raise IntegrityError("replay spill file is truncated or corrupt")
        flat = np.frombuffer(payload, dtype="<f8")
        arrays, cur = [], 0
        for shape in header["shapes"]:
            size = int(np.prod(shape))
            arrays.append(flat[cur:cur + size].reshape(shape).astype(float))
            cur += size
        buf = cls(header["capacity"])
        rl = header["experience"] == "RlExperience"
        for i in range(arrays[0].shape[0]):
            if rl:
                buf.push(RlExperience(arrays[0][i], arrays[1][i], arrays[2][i], arrays[3][i]))
            else:
                buf.push(CbExperience(arrays[0][i], arrays[1][i], arrays[2][i]))
        return buf
