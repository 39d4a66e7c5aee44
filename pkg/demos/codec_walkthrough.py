"""
Storing a file as plasmids
==========================

Two ways to turn bytes into DNA: two bits per base, or a ternary Huffman
code written with a rotational base mapping that never repeats a base.
"""

import numpy as np

from dnaarchive.codec.basic import decode_basic, encode_basic
from dnaarchive.codec.goldman import decode_goldman, encode_goldman, rotational_encode
from dnaarchive.codec.mutation import mutate
from dnaarchive.codec.plasmid import decode_file, encode_file
from dnaarchive.engine import payload

# two bits per base, most significant pair first
print(encode_basic(b"\x00\x1b\xff"))  # AAAA ACGT TTTT

# a trit picks one of the three bases that differ from the previous one
print(rotational_encode("0000"), rotational_encode("1212"))

###############################################################################
# The synthetic retrieval payload: 18,400 random bytes

data = payload(18_400, 2018)
basic = encode_file(data, "basic", "payload")
goldman = encode_file(data, "goldman", "payload")
for f in (basic, goldman):
    print(f"{f.encoding.value:8s} {f.sequence_len:6d} bases "
          f"({f.sequence_len / len(data):.3f} per byte) in {f.total} plasmids")

###############################################################################
# Codeword lengths follow the byte histogram

table, _ = encode_goldman(data)
lengths, counts = np.unique([len(table[b]) for b in range(256)], return_counts=True)
print("codeword lengths:", {int(k): int(n) for k, n in zip(lengths, counts)})
skewed, _ = encode_goldman(b"a" * 900 + bytes(range(256)))
print("'a' gets", len(skewed[ord("a")]), "trits when it dominates the file")

###############################################################################
# Round trip, then a lost plasmid

assert decode_file(basic) == data and decode_file(goldman) == data
try:
    decode_file(basic, basic.plasmids[1:])
except LookupError as exc:
    print("decode refused:", exc)

###############################################################################
# One substituted base: Basic loses a single byte, while a Goldman error can
# shift the Huffman framing of everything after it (or break the rotation)

rng = np.random.default_rng(0)
clip = data[:500]
seq = encode_basic(clip)
bad, events = mutate(seq, substitution=2 / len(seq), rng=rng)
diff = sum(a != b for a, b in zip(decode_basic(bad), clip))
print(f"basic: {len(events)} substitutions -> {diff} bytes wrong")

table, seq = encode_goldman(clip)
bad, events = mutate(seq, substitution=2 / len(seq), rng=rng)
try:
    out = decode_goldman(table, bad, max_dangling=5)
    diff = sum(a != b for a, b in zip(out, clip)) + abs(len(out) - len(clip))
    print(f"goldman: {len(events)} substitutions -> {diff} bytes wrong")
except ValueError as exc:
    print(f"goldman: {len(events)} substitutions -> undecodable ({exc})")
