"""Engineered retriever bacterium: gated chemotaxis with receptor saturation.

Every motility step a bacterium in chemotaxis mode probes ``n_scan`` headings
in ``[theta - psi_A, theta + psi_A]`` one step ahead, turns towards the probe
with the largest summed gated concentration, then adds a tumble of
``+/- sqrt(2 D dt)``. Once every receptor is saturated it only tumbles (random
walk) until one concentration drops below ``target * (1 - hysteresis)``.

This module is the readable per-bacterium reference. Populations are advanced
by the compiled kernel in :mod:`dnaarchive._kernel`, which follows the same
arithmetic step for step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .field import BeaconTriad, Point, TargetConcentrations

TWO_PI = 2.0 * math.pi


class Mode(enum.IntEnum):
    CHEMOTAXIS = 0
    SATURATED = 1
    CONJUGATING = 2


@dataclass(frozen=True)
class MotilityParams:
    dt: float = 2e-2  # s
    v: float = 5e-3  # cm/s
    D: float = 5.0  # rad^2/s
    psi_a: float = 3.49e-2  # rad
    n_scan: int = 21
    hysteresis: float = 0.02

    def __post_init__(self):
        if self.dt <= 0 or self.v <= 0 or self.psi_a <= 0:
            raise ValueError("dt, v and psi_a must be positive")
        if self.D < 0:
            raise ValueError("D must be non-negative")
        if self.n_scan < 3 or self.n_scan % 2 == 0:
            raise ValueError("n_scan must be odd and >= 3 so that psi = 0 is probed")
        if not 0.0 <= self.hysteresis < 1.0:
            raise ValueError("hysteresis must lie in [0, 1)")

    @property
    def step_length(self) -> float:
        return self.v * self.dt

    @property
    def tumble_magnitude(self) -> float:
        return math.sqrt(2.0 * self.D * self.dt)

    def scan_angles(self) -> np.ndarray:
        """Probe offsets in tie-break order: 0, -d, +d, -2d, +2d, ..."""
        psi = np.linspace(-self.psi_a, self.psi_a, self.n_scan)
        psi[self.n_scan // 2] = 0.0
        order = sorted(range(self.n_scan), key=lambda k: (abs(psi[k]), psi[k] > 0))
        return psi[order]


class SignStream:
    """Fair +/-1 signs taken bit by bit (LSB first) from 64-bit generator output."""

    def __init__(self, rng: np.random.Generator):
        self._bits = rng.bit_generator
        self._word = 0
        self._left = 0

    def next_sign(self) -> int:
        if not self._left:
            self._word = int(self._bits.random_raw())
            self._left = 64
        bit = self._word & 1
        self._word >>= 1
        self._left -= 1
        return 1 if bit else -1


@dataclass(frozen=True)
class BacteriumState:
    position: Point
    heading: float
    targets: TargetConcentrations
    mode: Mode = Mode.CHEMOTAXIS
    remaining_s: float = 0.0
    cargo: tuple = ()
    should_conjugate: bool = True
    id: int = 0

    @property
    def triad(self) -> BeaconTriad:
        return self.targets.triad


def wrap_angle(theta: float) -> float:
    """Map to (-pi, pi]."""
    if theta > math.pi:
        theta -= TWO_PI
    elif theta <= -math.pi:
        theta += TWO_PI
    if -math.pi < theta <= math.pi:
        return theta
    w = theta % TWO_PI
    if w > math.pi:
        w -= TWO_PI
    return w


def small_exp(z: float) -> float:
    """exp(z) for the tiny exponents of a one-step lookahead.

    Degree-4 Taylor polynomial when |z| <= 1e-3 (truncation < 1e-17 relative,
    below half an ulp), library exp otherwise.
    """
    if -1e-3 <= z <= 1e-3:
        return 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0))))
    return math.exp(z)


def best_heading(state: BacteriumState, params: MotilityParams) -> float:
    """Heading offset whose one-step lookahead maximises the gated sum.

    The lookahead concentration of a beacon at offset w = pos - beacon along
    unit heading u is exp(-|w|^2) * exp(-L^2) * exp(-2 L w.u), so only the
    last factor changes across the scan. With u rotated by psi from the
    current heading, -2 L w.u = p cos(psi) + q sin(psi) for per-beacon p, q.
    Ties go to the smallest |psi|, then to the negative side.
    """
    step = params.step_length
    shrink = math.exp(-step * step)
    x, y = state.position
    ct, st = math.cos(state.heading), math.sin(state.heading)
    beacons = []
    for beacon, target in zip(state.triad.beacons, state.targets.values):
        wx = x - beacon.position[0]
        wy = y - beacon.position[1]
        here = beacon.amplitude * math.exp(-(wx * wx + wy * wy))
        p = -2.0 * step * (wx * ct + wy * st)
        q = -2.0 * step * (wy * ct - wx * st)
        beacons.append((p, q, here * shrink, target))

    best, best_psi = -1.0, 0.0
    for psi in params.scan_angles():
        cp, sp = math.cos(psi), math.sin(psi)
        s = 0.0
        for p, q, base, target in beacons:
            c = base * small_exp(p * cp + q * sp)
            if c < target:
                s += c
        if s > best:
            best, best_psi = s, float(psi)
    return best_psi


def tumble_term(params: MotilityParams, signs: SignStream) -> float:
    return signs.next_sign() * params.tumble_magnitude


def all_saturated(targets: TargetConcentrations, position: Point, slack: float = 0.0) -> bool:
    x, y = position
    for beacon, target in zip(targets.triad.beacons, targets.values):
        dx = x - beacon.position[0]
        dy = y - beacon.position[1]
        if beacon.amplitude * math.exp(-(dx * dx + dy * dy)) < target * (1.0 - slack):
            return False
    return True


def update_mode(state: BacteriumState, params: MotilityParams | None = None) -> Mode:
    if state.mode is Mode.CONJUGATING:
        raise ValueError("conjugation is started and ended by the engine, not by update_mode")
    h = MotilityParams().hysteresis if params is None else params.hysteresis
    if state.mode is Mode.SATURATED:
        return Mode.SATURATED if all_saturated(state.targets, state.position, h) else Mode.CHEMOTAXIS
    return Mode.SATURATED if all_saturated(state.targets, state.position) else Mode.CHEMOTAXIS


def step(state: BacteriumState, params: MotilityParams, signs: SignStream) -> BacteriumState:
    if state.mode is Mode.CONJUGATING:
        # whole steps, so a long freeze lasts exactly ceil(duration / dt) steps
        steps_left = math.ceil(state.remaining_s / params.dt - 1e-9)
        if steps_left <= 1:
            return replace(state, mode=Mode.CHEMOTAXIS, remaining_s=0.0)
        return replace(state, remaining_s=(steps_left - 1) * params.dt)

    mode = update_mode(state, params)
    state = replace(state, mode=mode)
    turn = best_heading(state, params) if mode is Mode.CHEMOTAXIS else 0.0
    theta = wrap_angle(state.heading + turn + tumble_term(params, signs))
    step_len = params.step_length
    x, y = state.position
    return replace(
        state,
        heading=theta,
        position=(x + step_len * math.cos(theta), y + step_len * math.sin(theta)),
    )


def retarget(state: BacteriumState, new_targets: TargetConcentrations) -> BacteriumState:
    state = replace(state, targets=new_targets, mode=Mode.CHEMOTAXIS)
    return replace(state, mode=update_mode(state))


def start_conjugation(state: BacteriumState, duration_s: float, cargo=()) -> BacteriumState:
    return replace(
        state,
        mode=Mode.CONJUGATING,
        remaining_s=duration_s,
        cargo=tuple(cargo),
        should_conjugate=False,
    )


def initial_heading(rng: np.random.Generator) -> float:
    """Uniform on (-pi, pi]."""
    return math.pi - TWO_PI * rng.random()
