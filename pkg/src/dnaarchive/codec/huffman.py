"""Ternary Huffman code over the 256 byte values."""

from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

N_SYMBOLS = 256


@dataclass(frozen=True)
class HuffmanTable:
    """Byte -> trit-string code.

    ``code`` always has an entry for every byte 0..255, so any byte stream can
    be encoded with it regardless of the histogram it was built from.
    """

    code: Mapping[int, str]
    histogram: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if sorted(self.code) != list(range(N_SYMBOLS)):
            raise ValueError("a table needs a codeword for each of the 256 byte values")
        for word in self.code.values():
            if not word or set(word) - set("012"):
                raise ValueError(f"invalid ternary codeword {word!r}")
        object.__setattr__(self, "_decode", {w: b for b, w in self.code.items()})
        if len(self._decode) != N_SYMBOLS:
            raise ValueError("codewords are not distinct")

    def __getitem__(self, byte: int) -> str:
        return self.code[byte]

    @property
    def lengths(self) -> dict[int, int]:
        return {b: len(w) for b, w in self.code.items()}

    @property
    def max_length(self) -> int:
        return max(map(len, self.code.values()))

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 3 ** len(w)) for w in self.code.values()), Fraction(0))

    def lookup(self, word: str) -> int | None:
        """Byte for a complete codeword, or None."""
        return self._decode.get(word)

    def codewords(self) -> list[str]:
        """Codewords in byte order, the serialized form of the table."""
        return [self.code[b] for b in range(N_SYMBOLS)]

    @classmethod
    def from_codewords(cls, words: Iterable[str]) -> "HuffmanTable":
        return cls(dict(enumerate(words)))


def byte_histogram(data: bytes) -> dict[int, int]:
    counts = Counter(data)
    return {b: counts.get(b, 0) for b in range(N_SYMBOLS)}


def build_huffman(histogram: Mapping[int, int]) -> HuffmanTable:
    """Build a ternary Huffman table from byte frequencies.

    Bytes missing from ``histogram`` get frequency 0 and still receive a code.
    One zero-weight dummy leaf is added so that every merge takes exactly three
    nodes ((n - 1) must be even). Ties are broken by the smallest byte value in
    a subtree, then by creation order, so the result depends only on the
    frequency ordering.
    """
    weights = [histogram.get(b, 0) for b in range(N_SYMBOLS)]
    if any(w < 0 for w in weights):
        raise ValueError("frequencies must be non-negative")

    n_leaves = N_SYMBOLS
    while (n_leaves - 1) % 2:
        n_leaves += 1

    order = itertools.count()
    # (weight, smallest symbol in subtree, creation order, children or symbol)
    heap = [(weights[s] if s < N_SYMBOLS else 0, s, next(order), s) for s in range(n_leaves)]
    heapq.heapify(heap)
    while len(heap) > 1:
        kids = [heapq.heappop(heap) for _ in range(3)]
        heapq.heappush(
            heap,
            (sum(k[0] for k in kids), min(k[1] for k in kids), next(order), tuple(kids)),
        )

    code: dict[int, str] = {}
    stack = [(heap[0], "")]
    while stack:
        node, prefix = stack.pop()
        payload = node[3]
        if isinstance(payload, tuple):
            for trit, child in enumerate(payload):
                stack.append((child, prefix + str(trit)))
        elif payload < N_SYMBOLS:
            code[payload] = prefix
    return HuffmanTable(code, histogram=tuple(weights))


def is_prefix_free(words: Iterable[str]) -> bool:
    ordered = sorted(words)
    return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))
