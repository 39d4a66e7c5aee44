import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from rapidfuzz.distance import Levenshtein

from dnaarchive.codec import (
    EncodedFile,
    Encoding,
    HuffmanTable,
    InvalidSequence,
    LengthNotMultipleOfFour,
    MissingPlasmid,
    build_huffman,
    byte_histogram,
    decode_basic,
    decode_file,
    decode_goldman,
    encode_basic,
    encode_file,
    encode_goldman,
    inject_errors,
    is_prefix_free,
    mutate,
    packetize,
    reassemble,
    rotational_decode,
    rotational_encode,
)
from dnaarchive.codec import manifest
from dnaarchive.codec.goldman import DanglingCodeword, decode_trits, huffman_trits


def basic_oracle(data: bytes) -> str:
    bits = "".join(format(b, "08b") for b in data)
    table = {"00": "A", "01": "C", "10": "G", "11": "T"}
    return "".join(table[bits[i : i + 2]] for i in range(0, len(bits), 2))


NEXT = {
    "A": ("C", "G", "T"),
    "C": ("G", "T", "A"),
    "G": ("T", "A", "C"),
    "T": ("A", "C", "G"),
}


def rotation_oracle(trits, prev="A"):
    out = []
    for t in trits:
        prev = NEXT[prev][int(t)]
        out.append(prev)
    return "".join(out)


def no_repeats(seq: str) -> bool:
    return all(a != b for a, b in zip(seq, seq[1:]))


def uniform_table():
    return build_huffman({b: 1 for b in range(256)})


# basic ---------------------------------------------------------------------


def test_basic_examples():
    assert encode_basic(b"") == ""
    assert encode_basic(b"\x00") == "AAAA"
    assert encode_basic(b"Hi") == "CAGACGGC"
    assert decode_basic("AAAA") == b"\x00"
    assert decode_basic("CAGACGGC") == b"Hi"
    assert encode_basic(b"\xff") == "TTTT"


def test_basic_rejects_bad_input():
    with pytest.raises(LengthNotMultipleOfFour):
        decode_basic("AAA")
    with pytest.raises(ValueError):
        decode_basic("AAAN")


def test_basic_matches_bit_oracle_for_every_byte():
    data = bytes(range(256))
    assert encode_basic(data) == basic_oracle(data)


@given(st.binary(max_size=10_000))
@settings(max_examples=200, deadline=None)
def test_basic_round_trip_and_density(data):
    seq = encode_basic(data)
    assert len(seq) == 4 * len(data)
    assert seq == basic_oracle(data)
    assert decode_basic(seq) == data


# huffman -------------------------------------------------------------------


def kraft(words):
    return sum(Fraction(1, 3 ** len(w)) for w in words)


def prefix_free_pairwise(words):
    for a, b in itertools.permutations(words, 2):
        if b.startswith(a):
            return False
    return True


def test_uniform_histogram_lengths():
    table = uniform_table()
    lengths = sorted(table.lengths.values())
    assert set(lengths) <= {5, 6}
    assert lengths.count(5) == 236 and lengths.count(6) == 20
    assert kraft(table.codewords()) == Fraction(728, 729)
    assert table.kraft_sum() == kraft(table.codewords())
    assert prefix_free_pairwise(table.codewords())


def test_dominant_byte_gets_strictly_shortest_codeword():
    hist = {b: 1 for b in range(256)}
    hist[0x41] = 10**6
    table = build_huffman(hist)
    others = [len(w) for b, w in table.code.items() if b != 0x41]
    assert len(table[0x41]) < min(others)


def test_scaled_histograms_give_identical_tables():
    rng = random.Random(5)
    hist = {b: rng.randint(1, 50) for b in range(256)}
    assert build_huffman(hist) == build_huffman({b: 7 * w for b, w in hist.items()})


def test_huffman_is_deterministic_and_covers_absent_bytes():
    hist = byte_histogram(b"hello world")
    t1, t2 = build_huffman(hist), build_huffman(dict(reversed(list(hist.items()))))
    assert t1 == t2
    assert sorted(t1.code) == list(range(256))


@given(st.dictionaries(st.integers(0, 255), st.integers(0, 10**6), max_size=256))
@settings(max_examples=60, deadline=None)
def test_every_table_is_prefix_free_with_kraft_at_most_one(hist):
    table = build_huffman(hist)
    words = table.codewords()
    assert len(set(words)) == 256
    assert prefix_free_pairwise(words)
    assert is_prefix_free(words)
    assert kraft(words) <= 1


def test_is_prefix_free_detects_violation():
    assert not is_prefix_free(["0", "01", "2"])
    assert is_prefix_free(["0", "10", "11", "12", "2"])


def test_table_serialization_round_trip():
    table = build_huffman(byte_histogram(b"abracadabra"))
    assert HuffmanTable.from_codewords(table.codewords()) == table
    with pytest.raises(ValueError):
        HuffmanTable.from_codewords(["0"] * 256)


# rotation ------------------------------------------------------------------


def test_rotation_examples():
    assert rotational_encode([]) == ""
    assert rotational_encode([0, 0, 0, 0], "A") == "CGTA"
    assert rotational_decode("CGTA") == "0000"


def test_rotation_exhaustive_short_trit_strings():
    for prev in "ACGT":
        for n in range(9):
            for trits in itertools.product((0, 1, 2), repeat=n):
                seq = rotational_encode(trits, prev)
                assert seq == rotation_oracle(trits, prev)
                assert no_repeats(prev + seq)
                assert rotational_decode(seq, prev) == "".join(map(str, trits))


def test_rotation_rejects_repeats_and_bad_trits():
    with pytest.raises(InvalidSequence):
        rotational_decode("CC")
    with pytest.raises(InvalidSequence):
        rotational_decode("A")  # repeats the sentinel
    with pytest.raises(InvalidSequence):
        rotational_decode("CN")
    with pytest.raises(ValueError):
        rotational_encode([3])


# goldman -------------------------------------------------------------------


def test_goldman_examples():
    table, seq = encode_goldman(b"")
    assert seq == "" and decode_goldman(table, "") == b""
    table, seq = encode_goldman(b"Hello World")
    assert decode_goldman(table, seq) == b"Hello World"
    assert no_repeats(seq)


def test_goldman_stage_one_is_huffman_then_rotation():
    data = b"goldman"
    table, seq = encode_goldman(data)
    trits = "".join(table[b] for b in data)
    assert huffman_trits(table, data) == trits
    assert seq == rotation_oracle(trits)


def test_goldman_rejects_homopolymer():
    table, seq = encode_goldman(b"abc")
    with pytest.raises(InvalidSequence):
        decode_goldman(table, "AA" + seq)


def test_goldman_dangling_trits():
    table = uniform_table()
    word = table[0]
    with pytest.raises(DanglingCodeword):
        decode_trits(table, word + word[:3], max_dangling=0)
    assert decode_trits(table, word + word[:3]) == b"\x00"


def test_goldman_exhaustive_small_inputs():
    # every 1- and 2-byte input, plus a seeded sample of 3-byte inputs, against one table
    table = uniform_table()
    prev_sentinel = "A"
    for n in (1, 2):
        for data in itertools.product(range(256), repeat=n):
            data = bytes(data)
            seq = rotational_encode(huffman_trits(table, data))
            assert no_repeats(prev_sentinel + seq)
            assert decode_goldman(table, seq) == data
    rng = random.Random(3)
    for _ in range(5000):
        data = bytes(rng.randrange(256) for _ in range(3))
        tbl, seq = encode_goldman(data)
        assert no_repeats(prev_sentinel + seq)
        assert decode_goldman(tbl, seq) == data


@pytest.mark.parametrize("hist", [{b: 1 for b in range(256)}, {b: b * b + 1 for b in range(256)}, {}])
def test_goldman_segments_exhaustive(hist):
    # output is a chain of per-byte segments, each fixed by (entry base, byte):
    # covering all 4 x 256 pairs covers every input length for this table
    table = build_huffman(hist)
    for prev in "ACGT":
        for b in range(256):
            seg = rotational_encode(table[b], prev)
            assert no_repeats(prev + seg)
            assert rotational_decode(seg, prev) == table[b]


def test_goldman_density_uniform_histogram():
    data = bytes(range(256)) * 4
    table, seq = encode_goldman(data)
    per_byte = [len(table[b]) for b in data]
    assert all(5 <= k <= 6 for k in per_byte)
    assert 5 * len(data) <= len(seq) <= 6 * len(data)


def test_goldman_18400_byte_file_length_bound():
    data = np.random.default_rng(11).integers(0, 256, 18_400, dtype=np.uint8).tobytes()
    _, seq = encode_goldman(data)
    assert 92_000 <= len(seq) <= 110_400


@given(st.binary(max_size=10_000))
@settings(max_examples=150, deadline=None)
def test_goldman_round_trip(data):
    table, seq = encode_goldman(data)
    assert no_repeats("A" + seq)
    assert set(seq) <= set("ACGT")
    assert decode_goldman(table, seq) == data


# plasmids ------------------------------------------------------------------


@pytest.mark.parametrize("n", [0, 1, 199, 200, 201, 73_600])
def test_packetize_reassemble_identity(n):
    seq = "".join(random.Random(n).choice("ACGT") for _ in range(n))
    ps = packetize(seq, "f", 200)
    assert len(ps) == -(-n // 200)
    assert [p.index for p in ps] == list(range(len(ps)))
    assert all(len(p.bases) == 200 and p.total == len(ps) for p in ps)
    assert reassemble(ps, n) == seq
    shuffled = ps[:]
    random.Random(1).shuffle(shuffled)
    assert reassemble(shuffled, n) == seq


def test_packetize_examples():
    assert len(packetize("A" * 73_600, "f")) == 368
    (p,) = packetize("CGTACGTACG", "f")
    assert p.bases == "CGTACGTACG" + "A" * 190
    assert packetize("", "f") == []


def test_missing_plasmid_lists_gaps():
    ps = packetize("C" * 1000, "f", 200)
    with pytest.raises(MissingPlasmid) as err:
        reassemble([p for p in ps if p.index != 3], 1000)
    assert err.value.indices == {3} or list(err.value.indices) == [3]


@pytest.mark.parametrize("encoding", list(Encoding))
def test_encode_file_round_trip(encoding):
    data = np.random.default_rng(2).integers(0, 256, 18_400, dtype=np.uint8).tobytes()
    ef = encode_file(data, encoding, "doc")
    assert isinstance(ef, EncodedFile)
    if encoding is Encoding.BASIC:
        assert ef.total == 368
    assert decode_file(ef) == data
    assert decode_file(ef, list(reversed(ef.plasmids))) == data


@pytest.mark.parametrize("encoding", list(Encoding))
def test_manifest_round_trip(tmp_path, encoding):
    data = b"The quick brown fox jumps over the lazy dog" * 20
    ef = encode_file(data, encoding, "fox")
    path = manifest.save(ef, tmp_path / "fox.json")
    doc = json.loads(path.read_text())
    for key in ("encoding", "payload_len_bytes", "plasmid_len", "total_plasmids", "bit_base_map"):
        assert key in doc
    assert ("huffman_codewords" in doc) == (encoding is Encoding.GOLDMAN)
    fasta = (tmp_path / "fox.fasta").read_text().splitlines()
    assert all(set(line) <= set("ACGT") for line in fasta if not line.startswith(">"))
    assert decode_file(manifest.load(path)) == data


def test_manifest_missing_plasmid(tmp_path):
    ef = encode_file(b"x" * 200, "basic", "x")
    path = manifest.save(ef, tmp_path / "x.json")
    fasta = tmp_path / "x.fasta"
    lines = fasta.read_text().splitlines()
    fasta.write_text("\n".join(lines[:2] + lines[4:]) + "\n")
    with pytest.raises(MissingPlasmid):
        manifest.load(path)


# errors --------------------------------------------------------------------


def test_zero_rates_identity():
    seq = encode_basic(b"zero error rates")
    assert inject_errors(seq, {"insertion": 0, "deletion": 0, "substitution": 0},
                         np.random.default_rng(0)) == seq


def test_transition_only_substitution():
    seq = "ACGT" * 50
    out = inject_errors(seq, {"substitution": 1.0}, np.random.default_rng(0), transition_fraction=1.0)
    assert out == seq.translate(str.maketrans("ACGT", "GTAC"))


def test_events_replay_to_output():
    seq = "ACGTTGCA" * 100
    out, events = mutate(seq, 0.05, 0.05, 0.05, np.random.default_rng(4))
    by_pos = {}
    for e in events:
        by_pos.setdefault(e.position, []).append(e)
    rebuilt = []
    for i, b in enumerate(seq):
        evs = by_pos.get(i, [])
        kinds = {e.kind: e for e in evs}
        if "deletion" in kinds:
            pass
        elif "transition" in kinds or "transversion" in kinds:
            e = kinds.get("transition") or kinds["transversion"]
            assert e.base != b
            assert (e.kind == "transition") == ({b, e.base} in ({"A", "G"}, {"C", "T"}))
            rebuilt.append(e.base)
        else:
            rebuilt.append(b)
        if "insertion" in kinds:
            rebuilt.append(kinds["insertion"].base)
    assert "".join(rebuilt) == out


def test_error_rate_matches_edit_distance():
    ratios = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        seq = "".join("ACGT"[i] for i in rng.integers(0, 4, 100_000))
        out = inject_errors(seq, {"insertion": 0.01, "deletion": 0.01, "substitution": 0.01}, rng)
        ratios.append(Levenshtein.distance(seq, out) / len(seq))
    assert abs(np.mean(ratios) - 0.03) <= 0.005
