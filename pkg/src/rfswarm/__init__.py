"""Relative localization of an RFID-tagged drone swarm from backscatter phase troughs."""

from .errors import RFSwarmError
from .locator import AxisOrder, PipelineConfig, SwarmGeometry, locate_swarm, order_axis, order_by_trough_depth
from .metrics import geometry_accuracy, pairwise_accuracy
from .pipeline import FilterConfig, assemble_trace, detect_rotation_events, savitzky_golay
from .sim import (
    DroneSpec,
    DroneTrajectory,
    NoiseModel,
    ReaderConfig,
    RotationEvent,
    SweepRecording,
    analytic_phase_rate,
    ideal_phase,
    make_axis_sweep,
    plan_sweep,
    simulate_recording,
)
from .trace import PhaseSample, TagTrace
from .trough import TroughPoint, brute_force_min, find_trough_lowest, splice

__version__ = "0.1.0"

__all__ = [
    "AxisOrder",
    "DroneSpec",
    "DroneTrajectory",
    "FilterConfig",
    "NoiseModel",
    "PhaseSample",
    "PipelineConfig",
    "RFSwarmError",
    "ReaderConfig",
    "RotationEvent",
    "SwarmGeometry",
    "SweepRecording",
    "TagTrace",
    "TroughPoint",
    "analytic_phase_rate",
    "assemble_trace",
    "brute_force_min",
    "detect_rotation_events",
    "find_trough_lowest",
    "geometry_accuracy",
    "ideal_phase",
    "locate_swarm",
    "make_axis_sweep",
    "order_axis",
    "order_by_trough_depth",
    "pairwise_accuracy",
    "plan_sweep",
    "savitzky_golay",
    "simulate_recording",
    "splice",
]
