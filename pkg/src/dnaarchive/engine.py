"""Retrieval and positioning simulations.

Two cadences are used. Bacteria move every ``motility.dt`` seconds (compiled
kernel); every ``event_dt_s`` seconds the loop stops to try conjugations,
finish transfers and record deliveries, always visiting retrievers in
ascending id order.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import streams
from ._kernel import CONJUGATING, advance, scan_table
from .agent import MotilityParams, initial_heading
from .archive import (
    ArchiveLayout,
    LayoutMode,
    checkout_conjugation,
    default_layout,
    populate,
    release_conjugation,
    store,
)
from .codec.plasmid import EncodedFile, Encoding, encode_file
from .field import BeaconTriad, Point, targets_for

DESTINATION_RADII = (0.030, 0.058, 0.087, 0.200)
START_RADII = (0.300, 0.350, 0.450)
RETRIEVER_COUNTS = tuple(range(10, 151, 10))
DIFFUSION_VALUES = tuple(float(d) for d in range(5, 33, 3))


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class LayoutParams:
    mode: LayoutMode = LayoutMode.ALL_INSIDE
    ab_distance: float = 0.4
    cluster_offset: float = 0.02
    triad_side: float = 0.2425
    cluster_radius: float = 0.005
    max_concurrent: int = 50

    def build(self) -> ArchiveLayout:
        return default_layout(
            self.mode,
            ab_distance=self.ab_distance,
            cluster_offset=self.cluster_offset,
            triad_side=self.triad_side,
            cluster_radius=self.cluster_radius,
            max_concurrent=self.max_concurrent,
        )


@dataclass(frozen=True)
class SimConfig:
    motility: MotilityParams = field(default_factory=MotilityParams)
    layout: LayoutParams = field(default_factory=LayoutParams)
    n_retrievers_per_cluster: int = 150
    storage_ratio: float = 1.0
    capacity_mean: float = 100.0
    capacity_sd: float = 10.0
    replication: int | None = None  # None: every storage bacterium filled
    conjugation_time_s: float = 1500.0
    time_limit_s: float = 7200.0
    event_dt_s: float = 50.0
    conjugation_threshold_cm: float = 0.005
    conjugation_success_threshold: float = 0.5
    conjugation_model: str = "normal"  # "normal": N(0,1) > threshold; "coin": p = 0.5
    delivery_radius_cm: float = 0.01
    encoding: Encoding = Encoding.BASIC
    file_size_bytes: int = 18400
    payload_seed: int = 2018
    plasmid_len: int = 200
    seed: int = 0
    positioning_time_s: float = 1000.0
    n_positioning_bacteria: int = 100
    trajectory_every_steps: int = 0  # 0 disables trajectory capture

    def validate(self) -> "SimConfig":
        def bad(name, msg):
            raise ConfigInvalid(f"{name}: {msg}")

        m = self.motility
        if self.time_limit_s < self.conjugation_time_s:
            bad("time_limit_s", f"{self.time_limit_s} is shorter than conjugation_time_s "
                f"{self.conjugation_time_s}")
        if self.event_dt_s < m.dt:
            bad("event_dt_s", f"{self.event_dt_s} is below motility.dt {m.dt}")
        ratio = self.event_dt_s / m.dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            bad("event_dt_s", f"{self.event_dt_s} is not an integer multiple of motility.dt {m.dt}")
        if self.n_retrievers_per_cluster < 0:
            bad("n_retrievers_per_cluster", "must be >= 0")
        if self.storage_ratio <= 0:
            bad("storage_ratio", "must be positive")
        if self.conjugation_time_s < 0:
            bad("conjugation_time_s", "must be >= 0")
        if self.conjugation_model not in ("normal", "coin"):
            bad("conjugation_model", f"unknown model {self.conjugation_model!r}")
        if self.replication is not None and self.replication < 1:
            bad("replication", "must be >= 1 or None for full replication")
        if self.plasmid_len <= 0:
            bad("plasmid_len", "must be positive")
        if self.file_size_bytes < 0:
            bad("file_size_bytes", "must be >= 0")
        if self.positioning_time_s <= 0:
            bad("positioning_time_s", "must be positive")
        if self.trajectory_every_steps < 0:
            bad("trajectory_every_steps", "must be >= 0")
        return self

    @property
    def n_storage_per_cluster(self) -> int:
        return max(1, int(round(self.storage_ratio * self.n_retrievers_per_cluster)))


@dataclass
class MetricsRecord:
    run_id: str
    kind: str
    seed: int
    encoding: str = ""
    layout: str = ""
    n_retrievers: int = 0
    D: float = 0.0
    completion_time_s: float | None = None
    pct_retrieved: float | None = None
    per_cluster_conjugations: tuple[int, ...] = ()
    per_cluster_retrieved: tuple[float, ...] = ()
    per_cluster_in_hull: tuple[bool, ...] = ()
    start_x: float | None = None
    start_y: float | None = None
    dest_x: float | None = None
    dest_y: float | None = None
    start_radius: float | None = None
    dest_radius: float | None = None
    positioning_error_cm: float | None = None
    positioning_error_std_cm: float | None = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def row(self) -> list[str]:
        out = []
        for name in self.columns():
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, tuple):
                out.append(";".join(_fmt(x) for x in v))
            else:
                out.append(_fmt(v))
        return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(records: Iterable[MetricsRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(MetricsRecord.columns())
    for r in records:
        w.writerow(r.row())


def csv_text(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


@functools.lru_cache(maxsize=8)
def payload(size: int, seed: int) -> bytes:
    """The synthetic file used by retrieval experiments (uniform random bytes)."""
    return streams.stream(seed, streams.PAYLOAD).integers(0, 256, size, dtype=np.uint8).tobytes()


@functools.lru_cache(maxsize=8)
def payload_file(size: int, seed: int, encoding: Encoding, plasmid_len: int) -> EncodedFile:
    return encode_file(payload(size, seed), encoding, "payload", plasmid_len)


class Population:
    """Flat arrays describing a group of bacteria for the compiled kernel."""

    def __init__(self, n: int, params: MotilityParams, seed: int, first_id: int = 0):
        self.n = n
        self.params = params
        self.x = np.zeros(n)
        self.y = np.zeros(n)
        self.theta = np.zeros(n)
        self.mode = np.zeros(n, dtype=np.int8)
        self.frozen = np.zeros(n, dtype=np.int64)
        self.bx = np.zeros((n, 3))
        self.by = np.zeros((n, 3))
        self.amp = np.ones((n, 3))
        self.tgt = np.ones((n, 3))
        self.nbx = np.zeros((n, 3))
        self.nby = np.zeros((n, 3))
        self.namp = np.ones((n, 3))
        self.ntgt = np.ones((n, 3))
        self.pending = np.zeros(n, dtype=np.bool_)
        self.active = np.ones(n, dtype=np.bool_)
        gens = [streams.stream(seed, streams.MOTION, first_id + i) for i in range(n)]
        for i, g in enumerate(gens):
            self.theta[i] = initial_heading(g)
        self.feed = streams.BitFeed(gens)
        self._scan = scan_table(params)

    def place(self, idx, pos: Point) -> None:
        self.x[idx] = pos[0]
        self.y[idx] = pos[1]

    def aim(self, idx, triad: BeaconTriad, destination: Point, pending: bool = False) -> None:
        t = targets_for(triad, destination)
        verts, amps = triad.vertices, triad.amplitudes
        if pending:
            self.nbx[idx], self.nby[idx], self.namp[idx], self.ntgt[idx] = (
                verts[:, 0], verts[:, 1], amps, t.as_array())
            self.pending[idx] = True
        else:
            self.bx[idx], self.by[idx], self.amp[idx], self.tgt[idx] = (
                verts[:, 0], verts[:, 1], amps, t.as_array())

    def apply_pending(self, i: int) -> None:
        self.bx[i], self.by[i], self.amp[i], self.tgt[i] = (
            self.nbx[i], self.nby[i], self.namp[i], self.ntgt[i])
        self.pending[i] = False

    def advance(self, n_steps: int) -> None:
        if n_steps <= 0:
            return
        moving = self.active & ~((self.mode == CONJUGATING) & (self.frozen > n_steps))
        frozen_only = self.active & ~moving
        if frozen_only.any():
            self.frozen[frozen_only] -= n_steps
        if not moving.any():
            return
        words, bitpos = self.feed.fill(n_steps, moving)
        p = self.params
        psi, cos, sin = self._scan
        advance(
            n_steps,
            self.x, self.y, self.theta, self.mode, self.frozen,
            self.bx, self.by, self.amp, self.tgt,
            self.nbx, self.nby, self.namp, self.ntgt, self.pending,
            words, bitpos, moving,
            psi, cos, sin,
            p.step_length, p.tumble_magnitude, p.hysteresis,
        )  # fmt: skip
        self.feed.settle(words, bitpos, moving)

    def distances(self, point: Point) -> np.ndarray:
        return np.hypot(self.x - point[0], self.y - point[1])


def conjugation_succeeds(rng: np.random.Generator, config: SimConfig) -> bool:
    """One conjugation attempt.

    Default model: a N(0, 1) sample must exceed the threshold (strictly),
    i.e. success probability 1 - Phi(threshold). ``coin`` uses p = 0.5.
    """
    s = rng.standard_normal()
    if config.conjugation_model == "coin":
        return s > 0.0
    return s > config.conjugation_success_threshold


TrajectoryHook = Callable[[float, "Population"], None]


@dataclass(frozen=True)
class TickView:
    """Read-only snapshot handed to a retrieval observer after each tick's events."""

    t: float
    population: "Population"
    home: np.ndarray
    delivered: frozenset
    cargo: dict
    busy: dict
    conjugations: tuple
    concurrent: tuple


TRAJECTORY_COLUMNS = ("run_id", "t", "id", "x", "y", "theta", "mode")


class TrajectoryRecorder:
    """Collects (t, id, x, y, theta, mode) rows of active bacteria."""

    def __init__(self, run_id: str = ""):
        self.run_id = run_id
        self.rows: list[tuple] = []

    def __call__(self, t: float, pop: Population) -> None:
        for i in np.flatnonzero(pop.active):
            self.rows.append((self.run_id, round(t, 9), int(i), float(pop.x[i]), float(pop.y[i]),
                              float(pop.theta[i]), int(pop.mode[i])))

    def write(self, fh, header: bool = True) -> None:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(TRAJECTORY_COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])


def run_retrieval(config: SimConfig, run_id: str = "", trajectory: TrajectoryHook | None = None,
                  layout: ArchiveLayout | None = None,
                  observer: Callable[[TickView], None] | None = None) -> MetricsRecord:
    config.validate()
    m = config.motility
    layout = config.layout.build() if layout is None else layout
    clusters = layout.clusters
    encoded = payload_file(config.file_size_bytes, config.payload_seed,
                           Encoding(config.encoding), config.plasmid_len)
    if config.n_retrievers_per_cluster:
        populate(layout, config.n_storage_per_cluster, streams.stream(config.seed, streams.STORAGE),
                 config.capacity_mean, config.capacity_sd)
        store(None, encoded, layout, config.replication)
        cluster_sets = [frozenset(c.plasmid_indices) for c in clusters]
    else:
        # nobody can fetch anything, so storage bacteria are never consulted
        k = len(clusters)
        cluster_sets = [frozenset(range(c, encoded.total, k)) for c in range(k)]
    total = encoded.total

    per = config.n_retrievers_per_cluster
    n = per * len(clusters)
    home = np.repeat(np.arange(len(clusters)), per)
    pop = Population(n, m, config.seed)
    pop.place(slice(None), layout.point_a)
    for c, cluster in enumerate(clusters):
        idx = home == c
        pop.aim(idx, layout.storage_triad, cluster.centre)
        pop.aim(idx, layout.destination_triad, layout.point_c, pending=True)
    pop.pending[:] = False  # armed only once a conjugation starts
    home_x = np.array([c.centre[0] for c in clusters])[home]
    home_y = np.array([c.centre[1] for c in clusters])[home]

    conj_rngs = [streams.stream(config.seed, streams.CONJUGATION, i) for i in range(n)]
    checkout_rngs = [streams.stream(config.seed, streams.CHECKOUT, c) for c in range(len(clusters))]
    should_conjugate = np.ones(n, dtype=bool)
    donors: dict[int, object] = {}
    cargo: dict[int, frozenset] = {}
    delivered: set[int] = set()
    conjugations = [0] * len(clusters)

    steps_per_tick = int(round(config.event_dt_s / m.dt))
    freeze_steps = math.ceil(config.conjugation_time_s / m.dt - 1e-9)
    n_ticks = math.ceil(config.time_limit_s / config.event_dt_s - 1e-9)
    completion = config.time_limit_s

    def finish(i):
        donor = donors.pop(i)
        release_conjugation(clusters[home[i]], donor)
        cargo[i] = frozenset(donor.held)

    for tick in range(n_ticks):
        t = tick * config.event_dt_s
        if trajectory is not None:
            trajectory(t, pop)
        conjugating = pop.mode == CONJUGATING
        for i in [i for i in donors if not conjugating[i]]:
            finish(i)

        near = pop.active & should_conjugate & ~conjugating
        near &= np.hypot(pop.x - home_x, pop.y - home_y) < config.conjugation_threshold_cm
        for i in np.flatnonzero(near):
            if not conjugation_succeeds(conj_rngs[i], config):
                continue
            c = home[i]
            donor = checkout_conjugation(clusters[c], checkout_rngs[c])
            if donor is None:
                continue
            conjugations[c] += 1
            should_conjugate[i] = False
            donors[i] = donor
            pop.pending[i] = True
            if freeze_steps == 0:
                pop.apply_pending(i)
                finish(i)
            else:
                pop.mode[i] = CONJUGATING
                pop.frozen[i] = freeze_steps

        carriers = [i for i in cargo if pop.active[i] and pop.mode[i] != CONJUGATING]
        if carriers:
            d = pop.distances(layout.point_c)
            for i in carriers:
                if d[i] < config.delivery_radius_cm:
                    delivered |= cargo[i]
                    pop.active[i] = False
        # retrievers that can no longer add anything stop being simulated
        for c, cset in enumerate(cluster_sets):
            if cset <= delivered:
                pop.active[home == c] = False
        for i, load in cargo.items():
            if pop.active[i] and load <= delivered:
                pop.active[i] = False
        if observer is not None:
            observer(TickView(t, pop, home, frozenset(delivered), dict(cargo),
                              {i: home[i] for i in donors}, tuple(conjugations),
                              tuple(c.concurrent_conjugations for c in clusters)))

        if len(delivered) == total:
            completion = t
            break
        if not pop.active.any():
            break
        pop.advance(steps_per_tick)

    pct = len(delivered) / total if total else 1.0
    return MetricsRecord(
        run_id=run_id,
        kind="retrieval",
        seed=config.seed,
        encoding=Encoding(config.encoding).value,
        layout=LayoutMode(config.layout.mode).value,
        n_retrievers=per,
        D=m.D,
        completion_time_s=float(completion),
        pct_retrieved=pct,
        per_cluster_conjugations=tuple(conjugations),
        per_cluster_retrieved=tuple(
            len(s & delivered) / len(s) if s else 1.0 for s in cluster_sets),
        per_cluster_in_hull=tuple(layout.in_hull(c) for c in clusters),
    )


def positioning_triad(config: SimConfig) -> BeaconTriad:
    return BeaconTriad.equilateral((0.0, 0.0), config.layout.triad_side)


def run_positioning(
    config: SimConfig,
    start: Point,
    destination: Point,
    n_bacteria: int | None = None,
    run_id: str = "",
    triad: BeaconTriad | None = None,
    trajectory: TrajectoryHook | None = None,
) -> MetricsRecord:
    """Release bacteria at ``start`` aimed at ``destination`` and measure final error."""
    config.validate()
    if not all(math.isfinite(v) for v in destination):
        raise ConfigInvalid("destination: must be finite")
    m = config.motility
    triad = positioning_triad(config) if triad is None else triad
    n = config.n_positioning_bacteria if n_bacteria is None else n_bacteria
    pop = Population(n, m, config.seed)
    pop.place(slice(None), start)
    pop.aim(slice(None), triad, destination)

    total = int(round(config.positioning_time_s / m.dt))
    chunk = config.trajectory_every_steps or 2500
    done = 0
    while done < total:
        if trajectory is not None:
            trajectory(done * m.dt, pop)
        k = min(chunk, total - done)
        pop.advance(k)
        done += k
    if trajectory is not None:
        trajectory(done * m.dt, pop)

    err = pop.distances(destination)
    bary = triad.barycentre
    return MetricsRecord(
        run_id=run_id,
        kind="positioning",
        seed=config.seed,
        n_retrievers=n,
        D=m.D,
        start_x=float(start[0]),
        start_y=float(start[1]),
        dest_x=float(destination[0]),
        dest_y=float(destination[1]),
        start_radius=round(math.dist(start, bary), 12),
        dest_radius=round(math.dist(destination, bary), 12),
        positioning_error_cm=float(err.mean()) if n else 0.0,
        positioning_error_std_cm=float(err.std()) if n else 0.0,
    )


def circle_points(centre: Point, radius: float, count: int, phase: float = 0.0) -> list[Point]:
    return [
        (centre[0] + radius * math.cos(phase + 2 * math.pi * k / count),
         centre[1] + radius * math.sin(phase + 2 * math.pi * k / count))
        for k in range(count)
    ]


def circle_tasks(config: SimConfig, dest_per_circle: int = 8, start_per_circle: int = 6,
                 dest_radii: Sequence[float] = DESTINATION_RADII,
                 start_radii: Sequence[float] = START_RADII) -> list[tuple]:
    """Every (start, destination) pair of the concentric-circle experiment.

    Destinations start at the top of each circle, starts at the bottom.
    """
    bary = positioning_triad(config).barycentre
    dests = [(r, p) for r in dest_radii
             for p in circle_points(bary, r, dest_per_circle, math.pi / 2)]
    starts = [(r, p) for r in start_radii
              for p in circle_points(bary, r, start_per_circle, -math.pi / 2)]
    tasks = []
    for di, (_, dest) in enumerate(dests):
        for si, (_, start) in enumerate(starts):
            tasks.append((f"pos-d{di:03d}-s{si:03d}", start, dest))
    return tasks


def _recorder(config: SimConfig, run_id: str) -> TrajectoryRecorder | None:
    return TrajectoryRecorder(run_id) if config.trajectory_every_steps else None


def _positioning_task(args):
    config, run_id, start, dest = args
    rec = _recorder(config, run_id)
    return run_positioning(config, start, dest, run_id=run_id, trajectory=rec), rec


def _retrieval_task(args):
    config, run_id = args
    rec = _recorder(config, run_id)
    return run_retrieval(config, run_id=run_id, trajectory=rec), rec


def _map(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def circle_sweep(config: SimConfig, dest_per_circle: int = 8, start_per_circle: int = 6,
                 jobs: int = 1, with_trajectories: bool = False) -> list:
    """One positioning run per (start, destination) pair, in a fixed order.

    Returns records, or (record, recorder) pairs when ``with_trajectories``.
    """
    tasks = circle_tasks(config, dest_per_circle, start_per_circle)
    out = _map(_positioning_task, [(config, rid, s, d) for rid, s, d in tasks], jobs)
    return out if with_trajectories else [r for r, _ in out]


def sweep_configs(
    base: SimConfig,
    retriever_counts: Sequence[int] = RETRIEVER_COUNTS,
    diffusion: Sequence[float] = DIFFUSION_VALUES,
    encodings: Sequence[Encoding | str] = (Encoding.BASIC, Encoding.GOLDMAN),
    seeds: Sequence[int] = tuple(range(10)),
) -> list[tuple[SimConfig, str]]:
    out = []
    for enc in encodings:
        enc = Encoding(enc)
        for d in diffusion:
            for n in retriever_counts:
                for s in seeds:
                    cfg = dataclasses.replace(
                        base,
                        motility=dataclasses.replace(base.motility, D=float(d)),
                        n_retrievers_per_cluster=int(n),
                        encoding=enc,
                        seed=int(s),
                    )
                    out.append((cfg, f"ret-{enc.value}-D{d:g}-N{n}-s{s}"))
    return out


def retrieval_runs(configs: Sequence[tuple[SimConfig, str]], jobs: int = 1,
                   with_trajectories: bool = False) -> list:
    out = _map(_retrieval_task, list(configs), jobs)
    return out if with_trajectories else [r for r, _ in out]


def parameter_sweep(base: SimConfig, jobs: int = 1, with_trajectories: bool = False,
                    **grid) -> list:
    return retrieval_runs(sweep_configs(base, **grid), jobs, with_trajectories)
