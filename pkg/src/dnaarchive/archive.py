"""Storage side: clusters of motility-restricted bacteria holding plasmids.

Geometry of the default archive: the retrievers start at A, the storage
clusters sit around B (centre of the storage triad) and deliveries go to C
(centre of the destination triad). A, B and C lie on one vertical line.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .codec.plasmid import EncodedFile
from .field import BeaconTriad, Point, TargetConcentrations, distance, trilaterate


class Priority(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


class LayoutMode(str, enum.Enum):
    ALL_INSIDE = "all-inside"
    TWO_OUTSIDE = "two-outside"


class CapacityExceeded(RuntimeError):
    pass


class NoMatchingCluster(LookupError):
    pass


class UnknownNamespace(LookupError):
    pass


@dataclass
class StorageBacterium:
    position: Point
    capacity: int
    held: list[int] = field(default_factory=list)
    busy: bool = False


@dataclass
class Cluster:
    id: int
    centre: Point
    radius: float = 0.005
    priority: Priority = Priority.HIGH
    members: list[StorageBacterium] = field(default_factory=list)
    concurrent_conjugations: int = 0
    max_concurrent: int = 50

    @property
    def plasmid_indices(self) -> set[int]:
        return {i for m in self.members for i in m.held}

    @property
    def capacity(self) -> int:
        return sum(m.capacity for m in self.members)

    @property
    def used(self) -> int:
        return sum(len(m.held) for m in self.members)


@dataclass
class ArchiveLayout:
    storage_triad: BeaconTriad
    destination_triad: BeaconTriad
    point_a: Point
    point_b: Point
    point_c: Point
    clusters: list[Cluster]

    def in_hull(self, cluster: Cluster) -> bool:
        return self.storage_triad.contains(cluster.centre)

    def to_dict(self) -> dict:
        return {
            "storage_triad": self.storage_triad.to_dict(),
            "destination_triad": self.destination_triad.to_dict(),
            "point_a": list(self.point_a),
            "point_b": list(self.point_b),
            "point_c": list(self.point_c),
            "clusters": [
                {"id": c.id, "centre": list(c.centre), "radius": c.radius,
                 "priority": c.priority.value, "max_concurrent": c.max_concurrent}
                for c in self.clusters
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ArchiveLayout":
        def triad(d, prefix, first_id):
            t = BeaconTriad.from_vertices(d["vertices"], first_id=first_id, prefix=prefix)
            amps = d.get("amplitudes")
            if amps:
                t = BeaconTriad(tuple(replace(b, amplitude=a) for b, a in zip(t.beacons, amps)))
            return t

        return cls(
            storage_triad=triad(doc["storage_triad"], "S", 1),
            destination_triad=triad(doc["destination_triad"], "D", 4),
            point_a=tuple(doc["point_a"]),
            point_b=tuple(doc["point_b"]),
            point_c=tuple(doc["point_c"]),
            clusters=[
                Cluster(c["id"], tuple(c["centre"]), c.get("radius", 0.005),
                        Priority(c.get("priority", "high")), max_concurrent=c.get("max_concurrent", 50))
                for c in doc["clusters"]
            ],
        )


def default_layout(
    mode: LayoutMode | str = LayoutMode.ALL_INSIDE,
    *,
    ab_distance: float = 0.4,
    cluster_offset: float = 0.02,
    triad_side: float = 0.2425,
    cluster_radius: float = 0.005,
    max_concurrent: int = 50,
) -> ArchiveLayout:
    """Four clusters on a square around B, A below and C above.

    Both triads point their apex down (towards A), so their base edge is the
    top one. In ``two-outside`` mode the two upper clusters keep their x and
    are lifted to the base edge, offset by one cluster radius so the whole
    cluster disc lies outside the hull; they become low priority.
    """
    mode = LayoutMode(mode)
    b = (0.0, 0.0)
    a = (0.0, -ab_distance)
    c = (0.0, ab_distance)
    storage = BeaconTriad.equilateral(b, triad_side, first_id=1, prefix="S")
    dest = BeaconTriad.equilateral(c, triad_side, first_id=4, prefix="D")

    centres = [(-cluster_offset, -cluster_offset), (cluster_offset, -cluster_offset),
               (-cluster_offset, cluster_offset), (cluster_offset, cluster_offset)]
    priorities = [Priority.HIGH] * 4
    if mode is LayoutMode.TWO_OUTSIDE:
        top = storage.base_ordinate() + cluster_radius
        centres[2] = (-cluster_offset, top)
        centres[3] = (cluster_offset, top)
        priorities[2] = priorities[3] = Priority.LOW
    clusters = [
        Cluster(i, (b[0] + x, b[1] + y), cluster_radius, p, max_concurrent=max_concurrent)
        for i, ((x, y), p) in enumerate(zip(centres, priorities))
    ]
    return ArchiveLayout(storage, dest, a, b, c, clusters)


def draw_capacity(rng: np.random.Generator, mean: float = 100.0, sd: float = 10.0) -> int:
    return max(1, int(round(rng.normal(mean, sd))))


def populate(layout: ArchiveLayout, n_members: int, rng: np.random.Generator,
             capacity_mean: float = 100.0, capacity_sd: float = 10.0) -> None:
    """Scatter ``n_members`` empty storage bacteria uniformly over each cluster disc."""
    for cluster in layout.clusters:
        members = []
        for _ in range(n_members):
            r = cluster.radius * math.sqrt(rng.random())
            phi = 2.0 * math.pi * rng.random()
            members.append(
                StorageBacterium(
                    (cluster.centre[0] + r * math.cos(phi), cluster.centre[1] + r * math.sin(phi)),
                    draw_capacity(rng, capacity_mean, capacity_sd),
                )
            )
        cluster.members = members
        cluster.concurrent_conjugations = 0


def resolve_namespace(layout: ArchiveLayout, namespace) -> list[Cluster]:
    """Clusters addressed by one or more receptor-target triples.

    Each triple is trilaterated back to a position, which must fall inside a
    cluster disc. ``None`` addresses every cluster.
    """
    if namespace is None:
        return list(layout.clusters)
    if isinstance(namespace, TargetConcentrations):
        namespace = [namespace]
    found = []
    for ns in namespace:
        pos, _ = trilaterate(ns.triad, ns.values)
        hits = [c for c in layout.clusters if distance(pos, c.centre) <= c.radius]
        if not hits:
            raise UnknownNamespace(f"no cluster at {pos} for namespace {ns.values}")
        found.append(min(hits, key=lambda c: distance(pos, c.centre)))
    return found


def fill_members(cluster: Cluster, indices: Sequence[int], replication: int | None = 1) -> None:
    """Pack plasmid indices into members in member order, cycling through them.

    Each member takes up to ``min(capacity, len(indices))`` consecutive indices
    (cyclically) until ``replication * len(indices)`` copies are placed;
    ``replication=None`` fills every member.
    """
    m = len(indices)
    for member in cluster.members:
        member.held = []
    if m == 0:
        return
    if sum(min(mb.capacity, m) for mb in cluster.members) < m:
        raise CapacityExceeded(
            f"cluster {cluster.id}: {m} plasmids exceed capacity {cluster.capacity}"
        )
    slots = math.inf if replication is None else replication * m
    pos = 0
    for member in cluster.members:
        if slots <= 0:
            break
        take = int(min(member.capacity, m, slots))
        member.held = [indices[(pos + t) % m] for t in range(take)]
        pos = (pos + take) % m
        slots -= take


def store(
    namespace,
    encoded: EncodedFile,
    layout: ArchiveLayout,
    replication: int | None = 1,
) -> list[Cluster]:
    """Spread a file's plasmids round-robin over the addressed clusters."""
    clusters = resolve_namespace(layout, namespace)
    if not clusters:
        raise UnknownNamespace("namespace addresses no cluster")
    shares: list[list[int]] = [[] for _ in clusters]
    for p in encoded.plasmids:
        shares[p.index % len(clusters)].append(p.index)
    for cluster, share in zip(clusters, shares):
        fill_members(cluster, share, replication)
    return clusters


def distribute_by_priority(
    chunks: Iterable[tuple[object, Priority | str]],
    clusters: Sequence[Cluster],
    room: dict[int, int] | None = None,
) -> list[int]:
    """First-fit placement of prioritised chunks; returns one cluster id per chunk.

    Clusters are scanned in id order and a chunk goes to the first one that
    is not full and has the same priority. ``room`` gives how many chunks
    each cluster can still take (default: free plasmid slots).
    """
    ordered = sorted(clusters, key=lambda c: c.id)
    free = dict(room) if room is not None else {c.id: c.capacity - c.used for c in ordered}
    assignment = []
    for n, (_, priority) in enumerate(chunks):
        priority = Priority(priority)
        for cluster in ordered:
            if free.get(cluster.id, 0) > 0 and cluster.priority is priority:
                free[cluster.id] -= 1
                assignment.append(cluster.id)
                break
        else:
            raise NoMatchingCluster(f"chunk {n}: no {priority.value}-priority cluster with room")
    return assignment


def checkout_conjugation(cluster: Cluster, rng: np.random.Generator) -> StorageBacterium | None:
    if cluster.concurrent_conjugations >= cluster.max_concurrent:
        return None
    idle = [m for m in cluster.members if not m.busy]
    if not idle:
        return None
    member = idle[int(rng.integers(len(idle)))]
    member.busy = True
    cluster.concurrent_conjugations += 1
    return member


def release_conjugation(cluster: Cluster, member: StorageBacterium) -> None:
    if not member.busy:
        raise ValueError("storage bacterium is not conjugating")
    member.busy = False
    cluster.concurrent_conjugations -= 1
