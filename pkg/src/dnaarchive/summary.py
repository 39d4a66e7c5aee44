"""Aggregate tables over MetricsRecord lists (seed averages per grid point)."""

from __future__ import annotations

import csv
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from .engine import MetricsRecord, _fmt

RETRIEVAL_KEYS = ("encoding", "layout", "n_retrievers", "D")
POSITIONING_KEYS = ("dest_radius",)


def group(records: Iterable[MetricsRecord], keys: Sequence[str]) -> dict[tuple, list[MetricsRecord]]:
    out: dict[tuple, list[MetricsRecord]] = defaultdict(list)
    for r in records:
        out[tuple(getattr(r, k) for k in keys)].append(r)
    return dict(out)


def _hull_mean(records, inside: bool) -> float | None:
    vals = [f for r in records for f, h in zip(r.per_cluster_retrieved, r.per_cluster_in_hull)
            if h == inside]
    return float(np.mean(vals)) if vals else None


def retrieval_table(records: Iterable[MetricsRecord]) -> list[dict]:
    rows = []
    for key, rs in sorted(group(records, RETRIEVAL_KEYS).items()):
        rows.append({
            **dict(zip(RETRIEVAL_KEYS, key)),
            "runs": len(rs),
            "completed": sum(r.pct_retrieved == 1.0 for r in rs),
            "mean_completion_time_s": float(np.mean([r.completion_time_s for r in rs])),
            "mean_pct_retrieved": float(np.mean([r.pct_retrieved for r in rs])),
            "mean_in_hull_retrieved": _hull_mean(rs, True),
            "mean_out_hull_retrieved": _hull_mean(rs, False),
        })
    return rows


def positioning_table(records: Iterable[MetricsRecord]) -> list[dict]:
    rows = []
    for key, rs in sorted(group(records, POSITIONING_KEYS).items()):
        rows.append({
            "dest_radius": key[0],
            "runs": len(rs),
            "mean_error_cm": float(np.mean([r.positioning_error_cm for r in rs])),
            "mean_error_std_cm": float(np.mean([r.positioning_error_std_cm for r in rs])),
            "max_error_cm": float(np.max([r.positioning_error_cm for r in rs])),
        })
    return rows


def write_table(rows: list[dict], fh) -> None:
    if not rows:
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(rows[0].keys())
    for row in rows:
        w.writerow(["" if v is None else _fmt(v) for v in row.values()])
