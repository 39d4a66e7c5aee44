"""Seeded random streams.

Every consumer (one retriever's motion, one retriever's conjugation draws, one
cluster's checkouts, ...) gets its own counter-based Philox stream derived
from the run seed and a fixed key, so results do not depend on the order in
which agents are visited.
"""

from __future__ import annotations

import numpy as np

MOTION = 1
CONJUGATION = 2
CHECKOUT = 3
STORAGE = 4
PAYLOAD = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


class BitFeed:
    """Per-agent tumble-sign words for the compiled kernel.

    Words are drawn from each agent's motion stream only as needed, and any
    word that was drawn but not fully consumed is carried into the next fill,
    so the kernel sees exactly the bit sequence a
    :class:`dnaarchive.agent.SignStream` on the same generator would produce.
    """

    def __init__(self, generators: list[np.random.Generator]):
        self._bits = [g.bit_generator for g in generators]
        self._left = [np.zeros(0, dtype=np.uint64)] * len(generators)
        self._offset = np.zeros(len(generators), dtype=np.int64)
        self._filled = np.zeros(len(generators), dtype=np.int64)

    def fill(self, n_steps: int, which: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = len(self._bits)
        width = (n_steps + 63) // 64 + 1
        words = np.zeros((n, width), dtype=np.uint64)
        bitpos = np.zeros(n, dtype=np.int64)
        for i in np.flatnonzero(which):
            left = self._left[i]
            k = len(left)
            words[i, :k] = left
            have = 64 * k - self._offset[i]
            if have < n_steps:
                extra = -(-(n_steps - have) // 64)
                words[i, k : k + extra] = self._bits[i].random_raw(extra)
                k += extra
            bitpos[i] = self._offset[i]
            self._filled[i] = k
        return words, bitpos

    def settle(self, words: np.ndarray, bitpos: np.ndarray, which: np.ndarray) -> None:
        """Record what the kernel consumed after a :meth:`fill`."""
        for i in np.flatnonzero(which):
            used = bitpos[i] >> 6
            self._left[i] = words[i, used : self._filled[i]].copy()
            self._offset[i] = bitpos[i] & 63
