"""Splitting encoded sequences into fixed-length plasmids and back."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .basic import decode_basic, encode_basic
from .goldman import decode_goldman, encode_goldman
from .huffman import HuffmanTable

PLASMID_LENGTH = 200
PAD_BASE = "A"


class Encoding(str, enum.Enum):
    BASIC = "basic"
    GOLDMAN = "goldman"


class MissingPlasmid(LookupError):
    def __init__(self, indices):
        self.indices = sorted(indices)
        super().__init__(f"missing plasmid indices: {self.indices}")


@dataclass(frozen=True)
class Plasmid:
    file_id: str
    index: int
    total: int
    bases: str

    def __post_init__(self):
        if not 0 <= self.index < self.total:
            raise ValueError(f"plasmid index {self.index} outside 0..{self.total - 1}")


@dataclass(frozen=True)
class EncodedFile:
    encoding: Encoding
    payload_len_bytes: int
    sequence_len: int
    plasmids: tuple[Plasmid, ...]
    huffman: HuffmanTable | None = None
    plasmid_len: int = PLASMID_LENGTH

    def __post_init__(self):
        indices = [p.index for p in self.plasmids]
        if indices != list(range(len(indices))):
            raise ValueError("plasmids must cover indices 0..total-1 in order")
        if self.encoding is Encoding.GOLDMAN and self.huffman is None:
            raise ValueError("a Goldman-encoded file needs its Huffman table")

    @property
    def total(self) -> int:
        return len(self.plasmids)

    @property
    def file_id(self) -> str:
        return self.plasmids[0].file_id if self.plasmids else ""


def packetize(seq: str, file_id: str, length: int = PLASMID_LENGTH) -> list[Plasmid]:
    if length <= 0:
        raise ValueError("plasmid length must be positive")
    total = -(-len(seq) // length)
    return [
        Plasmid(file_id, i, total, seq[i * length : (i + 1) * length].ljust(length, PAD_BASE))
        for i in range(total)
    ]


def reassemble(plasmids: Iterable[Plasmid], sequence_len: int, total: int | None = None) -> str:
    """Concatenate plasmids in index order and strip the padding.

    Input order does not matter. ``total`` defaults to the count recorded in
    the plasmids themselves. Raises :class:`MissingPlasmid` listing every
    absent index.
    """
    by_index = {p.index: p for p in plasmids}
    if total is None:
        total = next(iter(by_index.values())).total if by_index else 0
    missing = set(range(total)) - set(by_index)
    if missing:
        raise MissingPlasmid(missing)
    return "".join(by_index[i].bases for i in range(total))[:sequence_len]


def encode_file(
    data: bytes,
    encoding: Encoding | str = Encoding.BASIC,
    file_id: str = "file",
    plasmid_len: int = PLASMID_LENGTH,
) -> EncodedFile:
    encoding = Encoding(encoding)
    table = None
    if encoding is Encoding.BASIC:
        seq = encode_basic(data)
    else:
        table, seq = encode_goldman(data)
    return EncodedFile(
        encoding=encoding,
        payload_len_bytes=len(data),
        sequence_len=len(seq),
        plasmids=tuple(packetize(seq, file_id, plasmid_len)),
        huffman=table,
        plasmid_len=plasmid_len,
    )


def decode_file(encoded: EncodedFile, plasmids: Sequence[Plasmid] | None = None) -> bytes:
    """Recover the payload, optionally from a different (e.g. delivered) plasmid set."""
    seq = reassemble(
        encoded.plasmids if plasmids is None else plasmids, encoded.sequence_len, encoded.total
    )
    if encoded.encoding is Encoding.BASIC:
        data = decode_basic(seq)
    else:
        data = decode_goldman(encoded.huffman, seq)
    if len(data) != encoded.payload_len_bytes:
        raise ValueError(
            f"decoded {len(data)} bytes, manifest says {encoded.payload_len_bytes}"
        )
    return data
