"""Digital data <-> nucleotide sequences <-> plasmids."""

from .basic import BIT_BASE_MAP, LengthNotMultipleOfFour, decode_basic, encode_basic
from .goldman import (
    DanglingCodeword,
    InvalidSequence,
    decode_goldman,
    encode_goldman,
    rotational_decode,
    rotational_encode,
)
from .huffman import HuffmanTable, build_huffman, byte_histogram, is_prefix_free
from .mutation import Mutation, inject_errors, mutate
from .plasmid import (
    PLASMID_LENGTH,
    EncodedFile,
    Encoding,
    MissingPlasmid,
    Plasmid,
    decode_file,
    encode_file,
    packetize,
    reassemble,
)

__all__ = [
    "BIT_BASE_MAP",
    "DanglingCodeword",
    "EncodedFile",
    "Encoding",
    "HuffmanTable",
    "InvalidSequence",
    "LengthNotMultipleOfFour",
    "MissingPlasmid",
    "Mutation",
    "PLASMID_LENGTH",
    "Plasmid",
    "build_huffman",
    "byte_histogram",
    "decode_basic",
    "decode_file",
    "decode_goldman",
    "encode_basic",
    "encode_file",
    "encode_goldman",
    "inject_errors",
    "is_prefix_free",
    "mutate",
    "packetize",
    "reassemble",
    "rotational_decode",
    "rotational_encode",
]
