"""Static chemoattractant field of fixed beacons.

Concentration decays as exp(-d^2) with distance d (cm) to a beacon. A
bacterium programmed for a destination only counts a beacon's signal while it
is strictly below the value that beacon produces at the destination; at or
above it the receptor is saturated and the channel reads 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True)
class Beacon:
    id: int
    position: Point
    attractant: str
    amplitude: float = 1.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("beacon amplitude must be positive")


@dataclass(frozen=True)
class BeaconTriad:
    beacons: tuple[Beacon, Beacon, Beacon]

    def __post_init__(self):
        if len(self.beacons) != 3:
            raise ValueError("a triad has exactly three beacons")
        if len({b.id for b in self.beacons}) != 3:
            raise ValueError("beacon ids must be unique")
        if len({b.attractant for b in self.beacons}) != 3:
            raise ValueError("each beacon needs its own attractant")
        if abs(self._cross(*self.vertices)) < 1e-15:
            raise ValueError("triad vertices are collinear")

    @classmethod
    def equilateral(
        cls,
        centre: Point = (0.0, 0.0),
        side: float = 0.2425,
        apex_angle: float = -math.pi / 2,
        first_id: int = 1,
        prefix: str = "B",
    ) -> "BeaconTriad":
        """Equilateral triad with barycentre ``centre``.

        ``apex_angle`` is the direction (rad) from the centre to the first
        vertex; the default points it down, leaving the opposite edge (the
        base) horizontal on top.
        """
        r = side / math.sqrt(3.0)
        beacons = []
        for k in range(3):
            a = apex_angle + 2.0 * math.pi * k / 3.0
            beacons.append(
                Beacon(
                    first_id + k,
                    (centre[0] + r * math.cos(a), centre[1] + r * math.sin(a)),
                    f"{prefix}{first_id + k}",
                )
            )
        return cls(tuple(beacons))

    @classmethod
    def from_vertices(cls, vertices: Sequence[Point], first_id: int = 1, prefix: str = "B"):
        return cls(
            tuple(
                Beacon(first_id + k, (float(x), float(y)), f"{prefix}{first_id + k}")
                for k, (x, y) in enumerate(vertices)
            )
        )

    @property
    def vertices(self) -> np.ndarray:
        return np.array([b.position for b in self.beacons], dtype=float)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([b.amplitude for b in self.beacons], dtype=float)

    @property
    def barycentre(self) -> Point:
        c = self.vertices.mean(axis=0)
        return float(c[0]), float(c[1])

    @staticmethod
    def _cross(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def edge_signs(self, point: Point) -> tuple[float, float, float]:
        a, b, c = self.vertices
        return (self._cross(a, b, point), self._cross(b, c, point), self._cross(c, a, point))

    def contains(self, point: Point) -> bool:
        """True only for points strictly inside the triangle."""
        s = self.edge_signs(point)
        return all(v > 0 for v in s) or all(v < 0 for v in s)

    def base_ordinate(self) -> float:
        """y of the horizontal edge, if the triad has one."""
        ys = sorted(self.vertices[:, 1])
        if math.isclose(ys[1], ys[2], abs_tol=1e-12):
            return float(ys[2])
        if math.isclose(ys[0], ys[1], abs_tol=1e-12):
            return float(ys[0])
        raise ValueError("triad has no horizontal edge")

    def to_dict(self) -> dict:
        return {"vertices": [list(b.position) for b in self.beacons],
                "amplitudes": [b.amplitude for b in self.beacons]}


@dataclass(frozen=True)
class TargetConcentrations:
    """Per-beacon receptor set-points: the concentrations at a destination."""

    triad: BeaconTriad
    values: tuple[float, float, float]
    destination: Point

    def __post_init__(self):
        for v in self.values:
            if not 0.0 < v <= max(b.amplitude for b in self.triad.beacons):
                raise ValueError(f"target concentration {v} outside (0, amplitude]")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


def distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def raw_concentration(beacon: Beacon, pos: Point) -> float:
    dx = pos[0] - beacon.position[0]
    dy = pos[1] - beacon.position[1]
    return beacon.amplitude * math.exp(-(dx * dx + dy * dy))


def gated_concentration(beacon: Beacon, pos: Point, target: float) -> float:
    c = raw_concentration(beacon, pos)
    return c if c < target else 0.0


def targets_for(triad: BeaconTriad, destination: Point) -> TargetConcentrations:
    if not all(math.isfinite(v) for v in destination):
        raise ValueError("destination must be finite")
    values = tuple(raw_concentration(b, destination) for b in triad.beacons)
    return TargetConcentrations(triad, values, (float(destination[0]), float(destination[1])))


def sensed_vector(triad: BeaconTriad, pos: Point, targets: TargetConcentrations) -> np.ndarray:
    return np.array(
        [gated_concentration(b, pos, c) for b, c in zip(triad.beacons, targets.values)]
    )


def raw_vector(triad: BeaconTriad, pos: Point) -> np.ndarray:
    return np.array([raw_concentration(b, pos) for b in triad.beacons])


def trilaterate(triad: BeaconTriad, concentrations: Sequence[float]) -> tuple[Point, float]:
    """Position whose beacon distances reproduce ``concentrations``.

    Each concentration fixes a squared distance -ln(c / amplitude). Subtracting
    the first circle equation from the other two leaves a 2x2 linear system.
    Returns the solution and the largest mismatch between its squared beacon
    distances and the requested ones (cm^2); the mismatch is ~0 when the three
    circles meet in a single point.
    """
    verts = triad.vertices
    d2 = -np.log(np.asarray(concentrations, dtype=float) / triad.amplitudes)
    norms = (verts**2).sum(axis=1)
    A = 2.0 * (verts[1:] - verts[0])
    rhs = norms[1:] - norms[0] - d2[1:] + d2[0]
    p = np.linalg.solve(A, rhs)
    residual = float(np.max(np.abs(((verts - p) ** 2).sum(axis=1) - d2)))
    return (float(p[0]), float(p[1])), residual
