"""Two bits per nucleotide mapping.

Each byte is split into four 2-bit pairs, most significant pair first, and
every pair is written as one base: 00->A, 01->C, 10->G, 11->T.
"""

from __future__ import annotations

BASES = "ACGT"
BIT_BASE_MAP = {"00": "A", "01": "C", "10": "G", "11": "T"}

_BYTE_TO_QUAD = [
    "".join(BASES[(b >> shift) & 0b11] for shift in (6, 4, 2, 0)) for b in range(256)
]
_BASE_VALUE = {base: i for i, base in enumerate(BASES)}


class LengthNotMultipleOfFour(ValueError):
    pass


def encode_basic(data: bytes) -> str:
    return "".join(_BYTE_TO_QUAD[b] for b in data)


def decode_basic(seq: str) -> bytes:
    if len(seq) % 4:
        raise LengthNotMultipleOfFour(
            f"basic-encoded sequence length {len(seq)} is not a multiple of 4"
        )
    out = bytearray(len(seq) // 4)
    try:
        for i in range(len(out)):
            a, b, c, d = seq[4 * i : 4 * i + 4]
            out[i] = (
                _BASE_VALUE[a] << 6 | _BASE_VALUE[b] << 4 | _BASE_VALUE[c] << 2 | _BASE_VALUE[d]
            )
    except KeyError as exc:
        raise ValueError(f"not a nucleotide: {exc.args[0]!r}") from None
    return bytes(out)
