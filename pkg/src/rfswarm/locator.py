"""Relative ordering of drones from the troughs of their phase profiles.

Rank 0 on an axis is the drone whose trough bottom comes first, i.e. the drone
furthest ahead in the direction of the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTraceError, InconsistentRecordingsError, InsufficientDataError, InvalidParameterError
from .pipeline import FilterConfig, detect_rotation_events, savitzky_golay
from .sim import AXES, SweepRecording, axis_index, lateral_axis
from .trace import TagTrace
from .trough import TroughPoint, find_trough_lowest, splice

BOUNDARY = "boundary"
FLAT = "flat"
ROTATION = "rotation"
TIE = "tie"
FAILED = "failed"
HEIGHT_CONFOUND = "height-confound"


@dataclass(frozen=True)
class PipelineConfig:
    filter: FilterConfig = FilterConfig()
    guard: int = 5
    rotation_threshold: float = 1.0
    rotation_sustain: int = 9

    @property
    def min_samples(self) -> int:
        return max(self.filter.window, 2 * self.guard + 1)


@dataclass
class AxisOrder:
    axis: str
    ranking: list
    trough_points: dict
    confidence_flags: dict
    failures: dict = field(default_factory=dict)
    direction: int = 1
    method: str = "time"
    warnings: tuple = ()

    def ranks(self) -> dict:
        return {d: r for r, d in enumerate(self.ranking)}


@dataclass
class SwarmGeometry:
    ranks: dict
    orders: dict = field(default_factory=dict)

    @property
    def directions(self) -> dict:
        return {a: o.direction for a, o in self.orders.items()} or dict.fromkeys(AXES, 1)

    @property
    def partial(self) -> bool:
        return any(o.failures for o in self.orders.values())


@dataclass
class TagProfile:
    """Intermediate products of the per-tag pipeline."""

    spliced: TagTrace
    smoothed: TagTrace
    trough: TroughPoint
    rotation_ranges: list
    flags: tuple


def profile_tag(trace: TagTrace, cfg: PipelineConfig = PipelineConfig()) -> TagProfile:
    """Splice, smooth and search one tag's trace for its trough bottom."""
    if len(trace) == 0:
        raise EmptyTraceError(f"tag {trace.tag_id!r} has no reads")
    if len(trace) < cfg.min_samples:
        raise InsufficientDataError(
            f"tag {trace.tag_id!r} has {len(trace)} reads, needs {cfg.min_samples}"
        )
    spliced = splice(trace)
    smoothed = savitzky_golay(spliced, cfg.filter)
    trough = find_trough_lowest(smoothed, cfg.guard)
    rotations = detect_rotation_events(spliced, cfg.rotation_threshold, cfg.rotation_sustain)
    flags = []
    if trough.boundary:
        flags.append(BOUNDARY)
    if not trough.strict:
        flags.append(FLAT)
    pad = cfg.rotation_sustain
    if any(lo - pad <= trough.index < hi + pad for lo, hi in rotations):
        flags.append(ROTATION)
    return TagProfile(spliced, smoothed, trough, rotations, tuple(flags))


def _profile_all(recording: SweepRecording, cfg: PipelineConfig):
    profiles, failures = {}, {}
    for drone in recording.drone_ids:
        try:
            profiles[drone] = profile_tag(recording.trace_for(drone), cfg)
        except (EmptyTraceError, InsufficientDataError) as exc:
            failures[drone] = str(exc)
    return profiles, failures


def _assemble(axis, direction, method, keyed, profiles, failures, warnings=()):
    ranked = sorted(keyed, key=lambda item: item[0])
    ranking = [d for _, d in ranked]
    flags = {d: list(profiles[d].flags) for d in ranking}
    for (k1, d1), (k2, d2) in zip(ranked, ranked[1:]):
        if k1[0] == k2[0]:
            for d in (d1, d2):
                if TIE not in flags[d]:
                    flags[d].append(TIE)
    # failed drones go last so the ranking stays a permutation of the swarm
    for d in sorted(failures):
        ranking.append(d)
        flags[d] = [FAILED]
    return AxisOrder(
        axis=axis,
        ranking=ranking,
        trough_points={d: profiles[d].trough for d in profiles},
        confidence_flags={d: tuple(f) for d, f in flags.items()},
        failures=dict(failures),
        direction=direction,
        method=method,
        warnings=tuple(warnings),
    )


def order_axis(recording: SweepRecording, cfg: PipelineConfig = PipelineConfig(), axis=None) -> AxisOrder:
    """Rank drones along the sweep axis by the time of their trough bottom.

    Ties in time fall back to the trough value, then to drone id. Tags whose
    traces are too short are listed in ``failures`` and ranked last.
    """
    if axis is not None and axis != recording.axis:
        raise InvalidParameterError(f"recording sweeps {recording.axis}, not {axis}")
    profiles, failures = _profile_all(recording, cfg)
    keyed = [((p.trough.t, p.trough.value, d), d) for d, p in profiles.items()]
    return _assemble(recording.axis, recording.direction, "time", keyed, profiles, failures)


def order_by_trough_depth(recording: SweepRecording, cfg: PipelineConfig = PipelineConfig()) -> AxisOrder:
    """Rank drones by how deep their trough dips; deepest (closest) first.

    Depth is measured from the first smoothed sample of each profile, which
    cancels the unknown per-tag phase offset. This only separates drones that
    share their sweep-axis coordinate, and it reads distance to the reader,
    not the lateral coordinate alone: a drone that is laterally closer but
    flies higher can be ranked behind one that is laterally further away.
    The result is expressed along the standoff axis, with rank 0 at the
    smallest coordinate.
    """
    profiles, failures = _profile_all(recording, cfg)
    keyed = []
    for d, p in profiles.items():
        depth = p.trough.value - float(p.smoothed.phase[0])
        keyed.append(((depth, p.trough.t, d), d))
    lat = lateral_axis(recording.axis)
    other = 3 - axis_index(recording.axis) - lat
    heights = {round(float(recording.ground_truth[d][other]), 9) for d in recording.drone_ids}
    warnings = (HEIGHT_CONFOUND,) if len(heights) != 1 else ()
    return _assemble(AXES[lat], -1, "depth", keyed, profiles, failures, warnings)


def locate_swarm(rec_x: SweepRecording, rec_y: SweepRecording, rec_z: SweepRecording, cfg: PipelineConfig = PipelineConfig()) -> SwarmGeometry:
    """Combine one sweep per axis into a rank triple for every drone."""
    recordings = {"x": rec_x, "y": rec_y, "z": rec_z}
    for axis, rec in recordings.items():
        if rec.axis != axis:
            raise InconsistentRecordingsError(f"expected an {axis} sweep, got a {rec.axis} sweep")
    drone_sets = {axis: set(rec.drone_ids) for axis, rec in recordings.items()}
    if not drone_sets["x"] == drone_sets["y"] == drone_sets["z"]:
        raise InconsistentRecordingsError(
            "recordings cover different drones: "
            + "; ".join(f"{a}: {sorted(s)}" for a, s in drone_sets.items())
        )
    orders = {axis: order_axis(rec, cfg) for axis, rec in recordings.items()}
    per_axis = [orders[a].ranks() for a in AXES]
    ranks = {d: tuple(r[d] for r in per_axis) for d in rec_x.drone_ids}
    return SwarmGeometry(ranks, orders)


def true_ranking(points: dict, axis: str, direction: int = 1) -> list:
    """Drone ids ordered the way a perfect sweep would rank them."""
    a = axis_index(axis)
    return sorted(points, key=lambda d: (-direction * float(points[d][a]), d))


def true_ranks(points: dict, directions: dict | None = None) -> dict:
    directions = directions or {}
    per_axis = []
    for axis in AXES:
        order = true_ranking(points, axis, directions.get(axis, 1))
        per_axis.append({d: r for r, d in enumerate(order)})
    return {d: tuple(r[d] for r in per_axis) for d in points}


def closest_distances(recording: SweepRecording) -> dict:
    """Distance of closest approach per drone (noise-free geometry)."""
    a = axis_index(recording.axis)
    reader = np.asarray(recording.reader.position)
    out = {}
    for d, start in recording.ground_truth.items():
        rel = np.asarray(start) - reader
        rel[a] = 0.0
        out[d] = float(np.linalg.norm(rel))
    return out
