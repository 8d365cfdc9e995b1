"""
Per-trajectory random streams.

Algorithm: Philox4x64-10, a counter-based generator (numpy.random.Philox),
keyed by SeedSequence(master_seed, spawn_key=(trajectory_index,)). The
stream of trajectory k depends only on (master_seed, k), never on which
worker runs it or in what order.

Uniforms are read in fixed-size blocks and handed out one at a time, so
the i-th draw of a trajectory is the same regardless of how the draws
are interleaved with computation.
"""

import numpy as np

from config import RNG_BLOCK_SIZE


def trajectory_seed_sequence(master_seed: int, trajectory_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trajectory_index),))


class UniformStream:
    """Buffered Uniform[0, 1) draws from one Philox stream."""

    def __init__(self, master_seed: int, trajectory_index: int = 0, block_size: int = RNG_BLOCK_SIZE):
        self.master_seed = int(master_seed)
        self.trajectory_index = int(trajectory_index)
        self._gen = np.random.Generator(
            np.random.Philox(trajectory_seed_sequence(master_seed, trajectory_index))
        )
        self._block_size = block_size
        self._buffer = np.empty(0)
        self._pos = 0
        self.draws = 0

    def random(self) -> float:
        if self._pos >= self._buffer.shape[0]:
            self._buffer = self._gen.random(self._block_size)
            self._pos = 0
        r = float(self._buffer[self._pos])
        self._pos += 1
        self.draws += 1
        return r

    def peek(self, count: int) -> np.ndarray:
        """Next count draws, in order, without consuming them."""
        while self._buffer.shape[0] - self._pos < count:
            self._buffer = np.concatenate((self._buffer[self._pos:], self._gen.random(self._block_size)))
            self._pos = 0
        return self._buffer[self._pos:self._pos + count]

    def skip(self, count: int) -> None:
        """Consume count draws previously returned by peek."""
        if self._buffer.shape[0] - self._pos < count:
            raise ValueError(f"cannot skip {count} draws; only {self._buffer.shape[0] - self._pos} buffered")
        self._pos += count
        self.draws += count

