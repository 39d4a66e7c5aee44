"""On-disk form of an encoded file.

Two files are written side by side:

``<name>.json``
    manifest with ``encoding``, ``payload_len_bytes``, ``sequence_len_bases``,
    ``plasmid_len``, ``total_plasmids``, ``bit_base_map`` and, for Goldman,
    ``huffman_codewords`` (256 trit strings in byte order).
``<name>.fasta``
    one record per plasmid, header ``>file_id|index|total`` followed by the
    bases on a single uppercase line.
"""

from __future__ import annotations

import json
from pathlib import Path

from .basic import BIT_BASE_MAP
from .goldman import SENTINEL
from .huffman import HuffmanTable
from .plasmid import EncodedFile, Encoding, MissingPlasmid, Plasmid

FORMAT_VERSION = 1


def manifest_dict(encoded: EncodedFile, sequences_name: str) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "file_id": encoded.file_id,
        "encoding": encoded.encoding.value,
        "payload_len_bytes": encoded.payload_len_bytes,
        "sequence_len_bases": encoded.sequence_len,
        "plasmid_len": encoded.plasmid_len,
        "total_plasmids": encoded.total,
        "bit_base_map": BIT_BASE_MAP,
        "sequences": sequences_name,
    }
    if encoded.huffman is not None:
        doc["rotation_sentinel"] = SENTINEL
        doc["huffman_codewords"] = encoded.huffman.codewords()
    return doc


def write_fasta(plasmids, path: Path) -> None:
    with open(path, "w", newline="\n") as fh:
        for p in plasmids:
            fh.write(f">{p.file_id}|{p.index}|{p.total}\n{p.bases}\n")


def read_fasta(path: Path) -> list[Plasmid]:
    plasmids = []
    header = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                header = line[1:]
                continue
            if header is None:
                raise ValueError(f"{path}:{lineno}: sequence line without a header")
            file_id, index, total = header.rsplit("|", 2)
            plasmids.append(Plasmid(file_id, int(index), int(total), line.upper()))
            header = None
    return plasmids


def save(encoded: EncodedFile, manifest_path: str | Path) -> Path:
    manifest_path = Path(manifest_path)
    fasta_path = manifest_path.with_suffix(".fasta")
    write_fasta(encoded.plasmids, fasta_path)
    doc = manifest_dict(encoded, fasta_path.name)
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n")
    return manifest_path


def load(manifest_path: str | Path) -> EncodedFile:
    manifest_path = Path(manifest_path)
    doc = json.loads(manifest_path.read_text())
    if doc.get("bit_base_map", BIT_BASE_MAP) != BIT_BASE_MAP:
        raise ValueError(f"{manifest_path}: unsupported bit->base map {doc['bit_base_map']}")
    plasmids = read_fasta(manifest_path.parent / doc["sequences"])
    total = doc["total_plasmids"]
    present = {p.index for p in plasmids}
    missing = set(range(total)) - present
    if missing:
        raise MissingPlasmid(missing)
    plasmids = sorted(plasmids, key=lambda p: p.index)
    words = doc.get("huffman_codewords")
    return EncodedFile(
        encoding=Encoding(doc["encoding"]),
        payload_len_bytes=doc["payload_len_bytes"],
        sequence_len=doc["sequence_len_bases"],
        plasmids=tuple(plasmids),
        huffman=HuffmanTable.from_codewords(words) if words else None,
        plasmid_len=doc["plasmid_len"],
    )
