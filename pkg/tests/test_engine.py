import dataclasses
import io
import math

import numpy as np
import pytest
from scipy.stats import norm

from dnaarchive import streams
from dnaarchive.agent import MotilityParams
from dnaarchive.archive import ArchiveLayout, Cluster, default_layout
from dnaarchive.engine import (
    ConfigInvalid,
    LayoutParams,
    MetricsRecord,
    SimConfig,
    TrajectoryRecorder,
    circle_tasks,
    conjugation_succeeds,
    csv_text,
    positioning_triad,
    run_positioning,
    run_retrieval,
    sweep_configs,
)

# small archive that completes within a few seconds of wall time
SMALL = SimConfig(n_retrievers_per_cluster=20, file_size_bytes=2000, time_limit_s=3000)


def test_zero_retrievers_retrieve_nothing():
    rec = run_retrieval(dataclasses.replace(SMALL, n_retrievers_per_cluster=0))
    assert rec.pct_retrieved == 0.0
    assert rec.completion_time_s == SMALL.time_limit_s
    assert rec.per_cluster_conjugations == (0, 0, 0, 0)


def test_degenerate_archive_completes_at_tick_zero():
    base = default_layout()
    here = base.point_a
    layout = ArchiveLayout(base.storage_triad, base.destination_triad, here, base.point_b, here,
                           [Cluster(0, here)])
    cfg = SimConfig(
        n_retrievers_per_cluster=1,
        file_size_bytes=50,  # exactly one 200-base plasmid
        conjugation_success_threshold=-math.inf,
        conjugation_time_s=0.0,
        delivery_radius_cm=math.inf,
        capacity_sd=0.0,
    )
    rec = run_retrieval(cfg, layout=layout)
    assert rec.pct_retrieved == 1.0
    assert rec.completion_time_s == 0.0
    assert rec.per_cluster_conjugations == (1,)


def test_conjugation_success_rate_matches_normal_tail():
    cfg = SimConfig()
    rng = streams.stream(0, streams.CONJUGATION, 0)
    hits = sum(conjugation_succeeds(rng, cfg) for _ in range(20_000))
    p = norm.sf(0.5)
    assert p == pytest.approx(0.3085, abs=1e-4)
    assert abs(hits / 20_000 - p) < 4 * math.sqrt(p * (1 - p) / 20_000)
    coin = dataclasses.replace(cfg, conjugation_model="coin")
    hits = sum(conjugation_succeeds(rng, coin) for _ in range(20_000))
    assert abs(hits / 20_000 - 0.5) < 0.015


class Watcher:
    """Collects per-tick state and checks the tick-level invariants as it goes."""

    def __init__(self, config):
        self.config = config
        self.ticks = []
        self.frozen_at = {}
        self.started = {}
        self.prev_delivered = frozenset()
        self.prev_conj = None

    def __call__(self, view):
        pop = view.population
        delivered = view.delivered
        assert self.prev_delivered <= delivered
        for i in np.flatnonzero(pop.mode == 2):
            xy = (float(pop.x[i]), float(pop.y[i]))
            assert self.frozen_at.setdefault(int(i), xy) == xy
        for i, c in view.busy.items():
            self.started.setdefault(int(i), view.t)
        if self.prev_conj is not None:
            assert all(a <= b for a, b in zip(self.prev_conj, view.conjugations))
        cap = self.config.layout.max_concurrent
        assert all(0 <= k <= cap for k in view.concurrent)
        assert all(k == sum(1 for c in view.busy.values() if c == cid)
                   for cid, k in enumerate(view.concurrent))
        self.prev_delivered = delivered
        self.prev_conj = view.conjugations
        self.ticks.append(view.t)


@pytest.fixture(scope="module")
def small_run():
    w = Watcher(SMALL)
    rec = run_retrieval(SMALL, run_id="small", observer=w)
    return rec, w


def test_small_run_completes_with_invariants(small_run):
    rec, w = small_run
    assert rec.pct_retrieved == 1.0
    assert rec.completion_time_s < SMALL.time_limit_s
    assert rec.completion_time_s == w.ticks[-1]
    assert w.ticks == [50.0 * k for k in range(len(w.ticks))]
    # each retriever conjugates at most once, and the count matches the record
    assert sum(rec.per_cluster_conjugations) == len(w.started)
    assert rec.per_cluster_retrieved == (1.0,) * 4
    assert rec.per_cluster_in_hull == (True,) * 4


def test_frozen_retrievers_do_not_move():
    # a conjugation longer than the run keeps every conjugating retriever parked
    cfg = dataclasses.replace(SMALL, conjugation_time_s=3000, time_limit_s=3000)
    w = Watcher(cfg)
    rec = run_retrieval(cfg, observer=w)
    assert w.frozen_at, "no retriever reached its cluster"
    assert rec.pct_retrieved == 0.0 and rec.completion_time_s == 3000


def test_concurrency_cap_holds():
    cfg = dataclasses.replace(SMALL, layout=LayoutParams(max_concurrent=2), time_limit_s=2000)
    seen = []
    w = Watcher(cfg)

    def obs(view):
        w(view)
        seen.append(max(view.concurrent))

    run_retrieval(cfg, observer=obs)
    assert max(seen) == 2


def test_pct_one_iff_before_limit():
    for limit in (1500.0, 2000.0, 3000.0):
        rec = run_retrieval(dataclasses.replace(SMALL, time_limit_s=limit))
        assert (rec.pct_retrieved == 1.0) == (rec.completion_time_s < limit)
        assert 0.0 <= rec.pct_retrieved <= 1.0


def test_same_seed_same_record(small_run):
    again = run_retrieval(SMALL, run_id="small")
    assert again == small_run[0]
    other = run_retrieval(dataclasses.replace(SMALL, seed=1), run_id="small")
    assert other != small_run[0]


def test_trajectory_hook_records_each_tick():
    cfg = dataclasses.replace(SMALL, n_retrievers_per_cluster=2, time_limit_s=200,
                              conjugation_time_s=100)
    rec = TrajectoryRecorder("t")
    run_retrieval(cfg, trajectory=rec)
    buf = io.StringIO()
    rec.write(buf, header=True)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 1 + 4 * 8  # header, then 8 retrievers at t = 0, 50, 100, 150


@pytest.mark.parametrize("field,value", [
    ("time_limit_s", 100.0),
    ("event_dt_s", 0.03),
    ("event_dt_s", 0.001),
    ("n_retrievers_per_cluster", -1),
    ("conjugation_model", "dice"),
    ("replication", 0),
    ("positioning_time_s", 0.0),
])
def test_invalid_configs_name_the_field(field, value):
    with pytest.raises(ConfigInvalid, match=field):
        dataclasses.replace(SimConfig(), **{field: value}).validate()


def test_invalid_destination():
    with pytest.raises(ConfigInvalid):
        run_positioning(SimConfig(), (0.0, -0.3), (math.nan, 0.0))


def test_circle_task_counts():
    tasks = circle_tasks(SimConfig())
    assert len(tasks) == 576
    assert len({rid for rid, _, _ in tasks}) == 576
    assert len(circle_tasks(SimConfig(), 1, 1)) == 12
    bary = positioning_triad(SimConfig()).barycentre
    radii = sorted({round(math.dist(d, bary), 9) for _, _, d in tasks})
    assert radii == [0.03, 0.058, 0.087, 0.2]


def test_sweep_configs_grid():
    runs = sweep_configs(SimConfig(), retriever_counts=[10, 50], diffusion=[5, 26], seeds=[0, 1])
    assert len(runs) == 16
    assert len({rid for _, rid in runs}) == 16
    cfg, rid = runs[-1]
    assert rid == "ret-goldman-D26-N50-s1"
    assert cfg.motility.D == 26.0 and cfg.n_retrievers_per_cluster == 50 and cfg.seed == 1


def test_positioning_converges_near_barycentre():
    cfg = SimConfig(n_positioning_bacteria=30, positioning_time_s=600)
    bary = positioning_triad(cfg).barycentre
    rec = run_positioning(cfg, (0.0, -0.3), bary)
    assert rec.kind == "positioning"
    assert rec.start_radius == pytest.approx(0.3) and rec.dest_radius == 0.0
    assert rec.positioning_error_cm < 0.05


def test_positioning_at_destination_stays_bounded():
    # saturated bacteria keep running, so the error is a random-walk excursion, not zero
    cfg = SimConfig(n_positioning_bacteria=30, positioning_time_s=1000)
    bary = positioning_triad(cfg).barycentre
    rec = run_positioning(cfg, bary, bary)
    assert 0.0 < rec.positioning_error_cm < 0.02


def test_positioning_without_diffusion_is_deterministic_per_heading():
    cfg = SimConfig(motility=MotilityParams(D=0.0), n_positioning_bacteria=4, positioning_time_s=50)
    a = run_positioning(cfg, (0.0, -0.3), (0.0, 0.0))
    b = run_positioning(cfg, (0.0, -0.3), (0.0, 0.0))
    assert a == b


def test_metrics_csv_row_format():
    rec = MetricsRecord("r", "retrieval", 3, per_cluster_conjugations=(1, 2),
                        per_cluster_in_hull=(True, False), pct_retrieved=0.5)
    text = csv_text([rec])
    header, row = text.splitlines()
    cols = header.split(",")
    assert cols == MetricsRecord.columns()
    values = dict(zip(cols, row.split(",")))
    assert values["per_cluster_conjugations"] == "1;2"
    assert values["per_cluster_in_hull"] == "1;0"
    assert values["pct_retrieved"] == "0.5"
