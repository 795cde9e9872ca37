"""Swarm sweep geometry and synthetic backscatter phase.

The reader sits at a fixed point and every tag's phase follows the round-trip
law ``theta = (4*pi*d/lambda + mu) mod 2*pi``. A sweep moves the whole
formation along one world axis at constant speed so that each tag passes the
reader once and its phase profile carries a single trough.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FormationError, InvalidParameterError, SingularityError
from .trace import TagTrace

SPEED_OF_LIGHT = 299792458.0
TWO_PI = 2.0 * math.pi
BAND_HZ = (902e6, 928e6)
DEFAULT_FREQUENCY = 915e6
DEFAULT_ROUNDS_PER_SECOND = 40.0
AXES = ("x", "y", "z")
SPEED_PRESETS = {"low": 0.15, "medium": 1.0, "high": 2.0}


def axis_index(axis: str) -> int:
    try:
        return AXES.index(axis)
    except ValueError:
        raise InvalidParameterError(f"unknown axis {axis!r}; expected one of x, y, z") from None


def wavelength_for(frequency: float) -> float:
    return SPEED_OF_LIGHT / frequency


@dataclass(frozen=True)
class ReaderConfig:
    position: tuple = (0.0, 0.0, 0.0)
    frequency: float = DEFAULT_FREQUENCY
    rounds_per_second: float = DEFAULT_ROUNDS_PER_SECOND
    allow_out_of_band: bool = False

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        if len(self.position) != 3 or not all(map(math.isfinite, self.position)):
            raise InvalidParameterError("reader position must be a finite 3D point")
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise InvalidParameterError(f"invalid carrier frequency {self.frequency!r}")
        if not self.allow_out_of_band and not BAND_HZ[0] <= self.frequency <= BAND_HZ[1]:
            raise InvalidParameterError(
                f"carrier {self.frequency:g} Hz outside the 902-928 MHz band"
            )
        if not (math.isfinite(self.rounds_per_second) and self.rounds_per_second > 0):
            raise InvalidParameterError("rounds_per_second must be positive")

    @property
    def wavelength(self) -> float:
        return wavelength_for(self.frequency)


DEFAULT_WAVELENGTH = wavelength_for(DEFAULT_FREQUENCY)


@dataclass(frozen=True)
class DroneSpec:
    """A drone in a formation: identity plus a position (offset or start point)."""

    drone_id: str
    position: tuple
    tag_id: str | None = None
    phase_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        if self.tag_id is None:
            object.__setattr__(self, "tag_id", f"tag-{self.drone_id}")


@dataclass(frozen=True)
class DroneTrajectory:
    drone_id: str
    tag_id: str
    start: tuple
    velocity: tuple
    duration: float
    phase_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(float(c) for c in self.start))
        object.__setattr__(self, "velocity", tuple(float(c) for c in self.velocity))
        if len(self.start) != 3 or len(self.velocity) != 3:
            raise InvalidParameterError("start and velocity must be 3D")
        if not self.duration > 0:
            raise InvalidParameterError("trajectory duration must be positive")
        if sum(1 for c in self.velocity if c != 0.0) != 1:
            raise InvalidParameterError("sweep velocity must have exactly one non-zero component")
        if not 0.0 <= self.phase_offset < TWO_PI:
            raise InvalidParameterError("phase_offset must lie in [0, 2*pi)")

    @property
    def axis(self) -> str:
        return next(a for a, c in zip(AXES, self.velocity) if c != 0.0)

    def position(self, t):
        """Position(s) at time(s) ``t``; shape (3,) or (len(t), 3)."""
        t = np.asarray(t, dtype=float)
        return np.asarray(self.start) + np.multiply.outer(t, np.asarray(self.velocity))


@dataclass(frozen=True)
class RotationEvent:
    tag_id: str
    t: float
    step: float


@dataclass(frozen=True)
class NoiseModel:
    seed: int
    phase_sigma: float = 0.0
    read_drop_prob: float = 0.0
    rotation_events: tuple = ()

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise InvalidParameterError("noise seed must be an integer")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("noise seed must fit in 64 unsigned bits")
        if not (math.isfinite(self.phase_sigma) and self.phase_sigma >= 0):
            raise InvalidParameterError("phase_sigma must be >= 0")
        if not 0.0 <= self.read_drop_prob < 1.0:
            raise InvalidParameterError("read_drop_prob must lie in [0, 1)")
        events = tuple(
            ev if isinstance(ev, RotationEvent) else RotationEvent(*ev)
            for ev in self.rotation_events
        )
        object.__setattr__(self, "rotation_events", events)


@dataclass
class SweepRecording:
    axis: str
    reader: ReaderConfig
    traces: dict
    ground_truth: dict
    tag_to_drone: dict
    direction: int = 1

    def __post_init__(self):
        axis_index(self.axis)
        if self.direction not in (1, -1):
            raise InvalidParameterError("direction must be +1 or -1")
        drones = list(self.tag_to_drone.values())
        if len(set(drones)) != len(drones):
            raise InvalidParameterError("each drone must carry exactly one tag")
        for tag in self.traces:
            if tag not in self.tag_to_drone:
                raise InvalidParameterError(f"trace for unknown tag {tag!r}")
        for drone in drones:
            if drone not in self.ground_truth:
                raise InvalidParameterError(f"no ground truth for drone {drone!r}")

    @property
    def drone_ids(self) -> list:
        return list(self.tag_to_drone.values())

    def trace_for(self, drone_id: str) -> TagTrace:
        tag = next(tag for tag, d in self.tag_to_drone.items() if d == drone_id)
        return self.traces.get(tag, TagTrace(tag))

    def __eq__(self, other):
        if not isinstance(other, SweepRecording):
            return NotImplemented
        return (
            self.axis == other.axis
            and self.direction == other.direction
            and self.reader == other.reader
            and self.ground_truth == other.ground_truth
            and self.tag_to_drone == other.tag_to_drone
            and self.traces == other.traces
        )


def _wrap(theta):
    wrapped = np.mod(theta, TWO_PI)
    # np.mod can round a tiny negative input up to exactly 2*pi
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


def ideal_phase(distance, wavelength, offset=0.0):
    """Backscatter phase of a tag ``distance`` metres from the reader.

    Parameters
    ----------
    distance : float or array_like
        Reader-tag distance in metres, non-negative.
    wavelength : float
        Carrier wavelength in metres.
    offset : float or array_like
        Constant phase shift in radians.

    Returns
    -------
    float or ndarray
        ``(4*pi*distance/wavelength + offset) mod 2*pi`` in ``[0, 2*pi)``.
        Distances that are whole multiples of half a wavelength wrap to
        exactly zero.
    """
    if not (np.isscalar(wavelength) and math.isfinite(wavelength) and wavelength > 0):
        raise InvalidParameterError(f"wavelength must be finite and positive, got {wavelength!r}")
    d = np.asarray(distance, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise InvalidParameterError("distance must be finite and non-negative")
    cycles = 2.0 * d / wavelength
    whole = np.round(cycles)
    # 2*(k*lambda/2)/lambda can land an ulp away from k; snap those to the wrap
    cycles = np.where(np.abs(cycles - whole) <= 4 * np.spacing(np.maximum(whole, 1.0)), whole, cycles)
    theta = _wrap(TWO_PI * (cycles - whole) + np.asarray(offset, dtype=float))
    if theta.ndim == 0:
        return float(theta)
    return theta


def analytic_phase_rate(x0, y0, v, t, wavelength):
    """Rate of phase change for a tag moving along x past the reader.

    The tag sits at ``(x0 + v*t, y0)`` relative to the reader; ``y0`` is the
    perpendicular miss distance (in 3D, the norm of both lateral offsets).
    """
    # along-track position written around the closest-approach time -x0/v,
    # so the rate is exactly zero when t is that time
    along = x0 if v == 0 else v * (t + x0 / v)
    denom = math.sqrt(along**2 + y0**2)
    if denom == 0.0:
        raise SingularityError("tag coincides with the reader")
    return (4 * math.pi / wavelength) * (v * along) / denom


def check_spacing(drones: Sequence[DroneSpec], wavelength: float):
    min_gap = wavelength / 2
    bad = []
    for a, b in itertools.combinations(drones, 2):
        gap = math.dist(a.position, b.position)
        if gap < min_gap:
            bad.append((a.drone_id, b.drone_id, gap))
    if bad:
        listing = ", ".join(f"{a}-{b} ({g:.3f} m)" for a, b, g in bad)
        raise FormationError(
            f"drones closer than half a wavelength ({min_gap:.3f} m): {listing}", bad
        )


def make_axis_sweep(drones, axis, speed, duration, wavelength=DEFAULT_WAVELENGTH, direction=1):
    """Fly every drone from its current position along ``axis`` at ``speed``.

    Raises FormationError when any pair is closer than half a wavelength.
    """
    if not speed > 0:
        raise InvalidParameterError("sweep speed must be positive")
    if not duration > 0:
        raise InvalidParameterError("sweep duration must be positive")
    drones = list(drones)
    check_spacing(drones, wavelength)
    velocity = [0.0, 0.0, 0.0]
    velocity[axis_index(axis)] = float(speed) * direction
    return [
        DroneTrajectory(d.drone_id, d.tag_id, d.position, tuple(velocity), duration, d.phase_offset)
        for d in drones
    ]


def lateral_axis(axis: str) -> int:
    """Axis along which the formation is held off from the reader."""
    return 0 if axis == "y" else 1


def plan_sweep(formation, axis, speed, reader: ReaderConfig, standoff=1.5, margin=1.5):
    """Place a formation so that its sweep passes the reader once.

    ``formation`` holds drone offsets relative to any origin. The formation
    centroid travels along ``axis`` from ``margin`` metres before the reader's
    coordinate to ``margin`` metres past it (plus the formation's own extent),
    held ``standoff`` metres off along the boresight (+y), or along +x for a
    y sweep. Returns the trajectories of all drones.
    """
    if not standoff > 0 or not margin > 0:
        raise InvalidParameterError("standoff and margin must be positive")
    formation = list(formation)
    if not formation:
        return []
    a = axis_index(axis)
    offsets = np.array([d.position for d in formation], dtype=float)
    centroid = offsets.mean(axis=0)
    half_extent = (offsets[:, a].max() - offsets[:, a].min()) / 2
    anchor = np.asarray(reader.position, dtype=float).copy()
    anchor[a] -= half_extent + margin
    anchor[lateral_axis(axis)] += standoff
    duration = 2 * (half_extent + margin) / speed
    placed = [
        DroneSpec(d.drone_id, tuple(anchor + off - centroid), d.tag_id, d.phase_offset)
        for d, off in zip(formation, offsets)
    ]
    return make_axis_sweep(placed, axis, speed, duration, reader.wavelength)


def simulate_recording(trajectories, reader: ReaderConfig, noise: NoiseModel) -> SweepRecording:
    """Synthesize the phase readings a reader collects during one sweep.

    One potential read per tag per inventory round; each read survives with
    probability ``1 - read_drop_prob`` and carries Gaussian phase noise plus
    any rotation steps that occurred at or before the read time.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise InvalidParameterError("at least one trajectory is required")
    axes = {tr.axis for tr in trajectories}
    if len(axes) != 1:
        raise InvalidParameterError("all trajectories in a recording must share one sweep axis")
    axis = axes.pop()
    a = axis_index(axis)
    direction = 1 if trajectories[0].velocity[a] > 0 else -1
    rng = np.random.default_rng(noise.seed)
    lam = reader.wavelength
    reader_pos = np.asarray(reader.position)
    steps_by_tag: dict = {}
    for ev in noise.rotation_events:
        steps_by_tag.setdefault(ev.tag_id, []).append(ev)

    traces = {}
    tag_to_drone = {}
    ground_truth = {}
    for tr in trajectories:
        if tr.tag_id in tag_to_drone:
            raise InvalidParameterError(f"tag {tr.tag_id!r} attached to two drones")
        tag_to_drone[tr.tag_id] = tr.drone_id
        ground_truth[tr.drone_id] = tr.start
        n_rounds = int(math.floor(tr.duration * reader.rounds_per_second + 1e-9)) + 1
        rounds = np.arange(n_rounds, dtype=np.int64)
        t = rounds / reader.rounds_per_second
        # draw both streams unconditionally so the RNG sequence ignores parameter values
        keep = rng.random(n_rounds) >= noise.read_drop_prob
        jitter = rng.standard_normal(n_rounds) * noise.phase_sigma
        dist = np.linalg.norm(tr.position(t) - reader_pos, axis=1)
        theta = ideal_phase(dist, lam, tr.phase_offset) + jitter
        for ev in steps_by_tag.get(tr.tag_id, ()):
            theta = theta + np.where(t >= ev.t, ev.step, 0.0)
        theta = _wrap(theta)
        traces[tr.tag_id] = TagTrace(tr.tag_id, rounds[keep], t[keep], theta[keep])
    return SweepRecording(axis, reader, traces, ground_truth, tag_to_drone, direction)


def closest_approach_time(traj: DroneTrajectory, reader: ReaderConfig) -> float:
    """Time of minimum reader distance, clipped to the trajectory's span."""
    start = np.asarray(traj.start) - np.asarray(reader.position)
    v = np.asarray(traj.velocity)
    t_star = -float(start @ v) / float(v @ v)
    return min(max(t_star, 0.0), traj.duration)
