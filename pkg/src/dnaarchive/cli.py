"""Command-line front end.

    dnaarchive encode FILE --encoding goldman -o file.json
    dnaarchive decode file.json -o FILE
    dnaarchive run retrieval --desk-scale --seed 3 --out results/ motility.D=14

``run`` writes ``<preset>.csv`` (one row per run), ``<preset>-summary.csv``
(seed averages) and, when ``trajectory_every_steps`` is set,
``<preset>-trajectories.csv`` into ``--out`` (default: ``$DNAARCHIVE_OUT_DIR``
or the working directory).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import engine, summary
from .codec import manifest
from .codec.plasmid import Encoding, MissingPlasmid, decode_file, encode_file
from .config import ConfigInvalid, Settings, load_settings, merge

OUT_DIR_ENV = "DNAARCHIVE_OUT_DIR"

CODEC_COLUMNS = ("encoding", "payload_len_bytes", "payload_seed", "sequence_len_bases",
                 "plasmids", "bases_per_byte", "max_homopolymer", "round_trip")


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    kind: str
    defaults: dict = field(default_factory=dict)
    desk: dict = field(default_factory=dict)


PRESETS = {
    p.name: p
    for p in (
        ExperimentPreset(
            "positioning", "positioning",
            desk={"sweep": {"dest_points_per_circle": 1, "start_points_per_circle": 1}},
        ),
        ExperimentPreset(
            "retrieval", "retrieval",
            desk={"sweep": {"retriever_counts": [10, 50, 100], "diffusion": [5, 26],
                            "repetitions": 3}},
        ),
        ExperimentPreset(
            "content-mgmt", "retrieval",
            defaults={"layout": {"mode": "two-outside"},
                      "sweep": {"retriever_counts": [150], "diffusion": [5]}},
            desk={"sweep": {"repetitions": 3}},
        ),
        ExperimentPreset("codec-bench", "codec"),
    )
}


def preset_settings(preset: ExperimentPreset, desk: bool, config_path=None, overrides=()) -> Settings:
    base = merge(preset.defaults, preset.desk) if desk else dict(preset.defaults)
    return load_settings(config_path, overrides, base=base)


def max_homopolymer(seq: str) -> int:
    best = run = 0
    prev = None
    for ch in seq:
        run = run + 1 if ch == prev else 1
        prev = ch
        best = max(best, run)
    return best


def codec_rows(settings: Settings) -> list[dict]:
    sim = settings.sim
    data = engine.payload(sim.file_size_bytes, sim.payload_seed)
    rows = []
    for enc in settings.sweep.encodings:
        encoded = encode_file(data, enc, "payload", sim.plasmid_len)
        seq = "".join(p.bases for p in encoded.plasmids)[: encoded.sequence_len]
        rows.append({
            "encoding": Encoding(enc).value,
            "payload_len_bytes": len(data),
            "payload_seed": sim.payload_seed,
            "sequence_len_bases": encoded.sequence_len,
            "plasmids": encoded.total,
            "bases_per_byte": encoded.sequence_len / len(data) if data else 0.0,
            "max_homopolymer": max_homopolymer(seq),
            "round_trip": decode_file(encoded) == data,
        })
    return rows


def retrieval_configs(settings: Settings) -> list[tuple[engine.SimConfig, str]]:
    sw = settings.sweep
    seeds = [settings.sim.seed + k for k in range(sw.repetitions)]
    return engine.sweep_configs(settings.sim, sw.retriever_counts, sw.diffusion, sw.encodings, seeds)


def positioning_tasks(settings: Settings) -> list[tuple]:
    sw = settings.sweep
    return [
        (settings.sim, rid, start, dest)
        for rid, start, dest in engine.circle_tasks(
            settings.sim, sw.dest_points_per_circle, sw.start_points_per_circle,
            sw.dest_radii, sw.start_radii)
    ]


@dataclass
class RunResult:
    preset: str
    kind: str
    records: list
    trajectories: list
    paths: list[Path]

    def summary_line(self) -> str:
        n = len(self.records)
        if self.kind == "retrieval":
            done = sum(r.pct_retrieved == 1.0 for r in self.records)
            pct = sum(r.pct_retrieved for r in self.records) / n if n else 0.0
            body = f"{n} runs, {done} completed, mean pct {pct:.3f}"
        elif self.kind == "positioning":
            err = sum(r.positioning_error_cm for r in self.records) / n if n else 0.0
            body = f"{n} runs, mean error {err:.4f} cm"
        else:
            ok = sum(r["round_trip"] for r in self.records)
            body = f"{n} encodings, {ok} round-tripped"
        return f"{self.preset}: {body} -> {self.paths[0]}"


def _write(path: Path, writer: Callable) -> Path:
    with open(path, "w", newline="") as fh:
        writer(fh)
    return path


def run_preset(name: str, settings: Settings, out_dir: Path, jobs: int = 1) -> RunResult:
    preset = PRESETS[name]
    out_dir.mkdir(parents=True, exist_ok=True)
    main = out_dir / f"{name}.csv"
    trajectories = []
    if preset.kind == "codec":
        rows = codec_rows(settings)

        def write_codec(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CODEC_COLUMNS)
            for row in rows:
                w.writerow([engine._fmt(row[c]) for c in CODEC_COLUMNS])

        return RunResult(name, "codec", rows, [], [_write(main, write_codec)])

    if preset.kind == "retrieval":
        pairs = engine._map(engine._retrieval_task, retrieval_configs(settings), jobs)
        table = summary.retrieval_table
    else:
        pairs = engine._map(engine._positioning_task, positioning_tasks(settings), jobs)
        table = summary.positioning_table
    records = [r for r, _ in pairs]
    trajectories = [t for _, t in pairs if t is not None]
    paths = [
        _write(main, lambda fh: engine.write_csv(records, fh)),
        _write(out_dir / f"{name}-summary.csv", lambda fh: summary.write_table(table(records), fh)),
    ]
    if trajectories:
        def write_traj(fh):
            for k, rec in enumerate(trajectories):
                rec.write(fh, header=k == 0)

        paths.append(_write(out_dir / f"{name}-trajectories.csv", write_traj))
    return RunResult(name, preset.kind, records, trajectories, paths)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnaarchive", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a file into a manifest and plasmid FASTA")
    enc.add_argument("input")
    enc.add_argument("-o", "--output", required=True, help="manifest path (.json)")
    enc.add_argument("--encoding", choices=[e.value for e in Encoding], default="basic")
    enc.add_argument("--plasmid-len", type=int, default=200)
    enc.add_argument("--file-id", default=None)

    dec = sub.add_parser("decode", help="rebuild the original bytes from a manifest")
    dec.add_argument("manifest")
    dec.add_argument("-o", "--output", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    run.add_argument("items", nargs="*", metavar="PRESET|KEY=VALUE",
                     help=f"preset ({', '.join(PRESETS)}) and dotted overrides")
    run.add_argument("--preset", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--desk-scale", action="store_true", help="truncated grid for a laptop")
    run.add_argument("--config", default=None, help="JSON config file")
    return parser


def cmd_encode(args) -> int:
    path = Path(args.input)
    try:
        data = path.read_bytes()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return 1
    if args.plasmid_len <= 0:
        print("error: --plasmid-len must be positive", file=sys.stderr)
        return 2
    encoded = encode_file(data, args.encoding, args.file_id or path.name, args.plasmid_len)
    try:
        out = manifest.save(encoded, args.output)
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    print(f"encode: {len(data)} bytes -> {encoded.total} plasmids ({encoded.encoding.value}) -> {out}")
    return 0


def cmd_decode(args) -> int:
    try:
        encoded = manifest.load(args.manifest)
        data = decode_file(encoded)
        Path(args.output).write_bytes(data)
    except MissingPlasmid as exc:
        print(f"error: {args.manifest}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {args.manifest}: {exc}", file=sys.stderr)
        return 1
    print(f"decode: {encoded.total} plasmids -> {len(data)} bytes -> {args.output}")
    return 0


def cmd_run(args, parser) -> int:
    names = [i for i in args.items if "=" not in i]
    overrides = [i for i in args.items if "=" in i]
    if args.preset is not None:
        names.insert(0, args.preset)
    if len(names) != 1:
        parser.error("run needs exactly one preset")
    name = names[0]
    if name not in PRESETS:
        parser.error(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        settings = preset_settings(PRESETS[name], args.desk_scale, args.config, overrides)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or os.environ.get(OUT_DIR_ENV) or ".")
    result = run_preset(name, settings, out, args.jobs)
    print(result.summary_line())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        if args.command != "run" or any(e.startswith("-") or "=" not in e for e in extra):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        args.items += extra
    if args.command == "encode":
        return cmd_encode(args)
    if args.command == "decode":
        return cmd_decode(args)
    return cmd_run(args, parser)


if __name__ == "__main__":
    sys.exit(main())
