"""Huffman base-3 coding followed by a homopolymer-free rotational code.

The rotation: given the previously written base P, trit t is written as the
t-th base after P in the cycle A -> C -> G -> T -> A, so P itself can never be
repeated. The first base is written against a sentinel previous base ``A``.
"""

from __future__ import annotations

from typing import Iterable

from .huffman import HuffmanTable, build_huffman, byte_histogram

BASES = "ACGT"
SENTINEL = "A"

_ROTATE = {p: BASES[i + 1 :] + BASES[:i] for i, p in enumerate(BASES)}
_UNROTATE = {p: {base: str(t) for t, base in enumerate(row)} for p, row in _ROTATE.items()}


class InvalidSequence(ValueError):
    pass


class DanglingCodeword(ValueError):
    pass


def check_trit(t) -> int:
    t = int(t)
    if t not in (0, 1, 2):
        raise ValueError(f"trit out of range: {t}")
    return t


def rotational_encode(trits: Iterable, prev: str = SENTINEL) -> str:
    """Write trits (ints or '0'/'1'/'2' characters) as bases."""
    if prev not in _ROTATE:
        raise ValueError(f"not a nucleotide: {prev!r}")
    out = []
    for t in trits:
        prev = _ROTATE[prev][check_trit(t)]
        out.append(prev)
    return "".join(out)


def rotational_decode(seq: str, prev: str = SENTINEL) -> str:
    """Inverse of :func:`rotational_encode`, returned as a '0'/'1'/'2' string."""
    out = []
    for i, base in enumerate(seq):
        try:
            out.append(_UNROTATE[prev][base])
        except KeyError:
            if base == prev:
                raise InvalidSequence(f"repeated base {base!r} at position {i}") from None
            raise InvalidSequence(f"not a nucleotide: {base!r} at position {i}") from None
        prev = base
    return "".join(out)


def huffman_trits(table: HuffmanTable, data: bytes) -> str:
    return "".join(table.code[b] for b in data)


def encode_goldman(data: bytes, table: HuffmanTable | None = None) -> tuple[HuffmanTable, str]:
    """Encode ``data`` using a table built from its own byte histogram."""
    if table is None:
        table = build_huffman(byte_histogram(data))
    return table, rotational_encode(huffman_trits(table, data))


def decode_trits(table: HuffmanTable, trits: str, max_dangling: int | None = None) -> bytes:
    """Split a trit string into codewords.

    Up to ``max_dangling`` trailing trits (default: one less than the longest
    codeword) that do not complete a codeword are dropped.
    """
    if max_dangling is None:
        max_dangling = table.max_length - 1
    limit = table.max_length
    out = bytearray()
    word = ""
    for t in trits:
        word += t
        byte = table.lookup(word)
        if byte is not None:
            out.append(byte)
            word = ""
        elif len(word) >= limit:
            raise InvalidSequence(f"trits {word!r} do not match any codeword")
    if len(word) > max_dangling:
        raise DanglingCodeword(f"{len(word)} trailing trits do not form a codeword")
    return bytes(out)


def decode_goldman(table: HuffmanTable, seq: str, max_dangling: int | None = None) -> bytes:
    return decode_trits(table, rotational_decode(seq), max_dangling)
