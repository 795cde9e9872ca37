"""Seeded Monte-Carlo evaluation: simulate, locate, score."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import GRID_PARAMETERS, ExperimentConfig
from .errors import ConfigError
from .locator import locate_swarm
from .metrics import geometry_accuracy, pairwise_accuracy
from .sim import AXES, DroneSpec, NoiseModel, plan_sweep, simulate_recording

METRICS = ("accuracy_x", "accuracy_y", "accuracy_z", "accuracy_mean", "geometry", "failed_tags")


@dataclass
class TrialReport:
    seed: int
    per_axis_accuracy: dict
    geometry_accuracy: float
    failures: list = field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([self.per_axis_accuracy[a] for a in AXES]))


def trial_streams(master_seed: int, trial: int):
    """Seeds for one trial: a phase-offset stream plus one noise seed per axis.

    Derived from (master seed, trial index) only, so every grid point replays
    the same random draws for a given trial.
    """
    state = np.random.SeedSequence(master_seed, spawn_key=(trial,)).generate_state(4, dtype=np.uint64)
    return int(state[0]), {a: int(s) for a, s in zip(AXES, state[1:])}


def simulate_sweeps(cfg: ExperimentConfig, trial: int = 0, axes=AXES) -> dict:
    """Recordings of one trial's sweeps, keyed by axis.

    Each tag gets a phase offset drawn uniformly from [0, 2*pi), shared by
    all of its sweeps.
    """
    offset_seed, noise_seeds = trial_streams(cfg.seed, trial)
    mus = np.random.default_rng(offset_seed).uniform(0.0, 2 * math.pi, len(cfg.formation))
    formation = [
        DroneSpec(d.drone_id, d.position, d.tag_id, float(mu) % (2 * math.pi))
        for d, mu in zip(cfg.formation, mus)
    ]
    recordings = {}
    for axis in axes:
        trajectories = plan_sweep(formation, axis, cfg.speed, cfg.reader, cfg.standoff, cfg.margin)
        noise = NoiseModel(
            noise_seeds[axis],
            cfg.noise.phase_sigma,
            cfg.noise.read_drop_prob,
            cfg.noise.rotation_events,
        )
        recordings[axis] = simulate_recording(trajectories, cfg.reader, noise)
    return recordings


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialReport:
    recs = simulate_sweeps(cfg, trial)
    geometry = locate_swarm(recs["x"], recs["y"], recs["z"], cfg.pipeline)
    truth = {d.drone_id: d.position for d in cfg.formation}
    per_axis = {a: pairwise_accuracy(geometry.orders[a], truth) for a in AXES}
    failures = [
        {"axis": a, "drone": d, "reason": msg}
        for a in AXES
        for d, msg in geometry.orders[a].failures.items()
    ]
    return TrialReport(trial, per_axis, geometry_accuracy(geometry, truth), failures)


def summarize(trials) -> dict:
    columns = {
        "accuracy_x": [t.per_axis_accuracy["x"] for t in trials],
        "accuracy_y": [t.per_axis_accuracy["y"] for t in trials],
        "accuracy_z": [t.per_axis_accuracy["z"] for t in trials],
        "accuracy_mean": [t.mean_accuracy for t in trials],
        "geometry": [t.geometry_accuracy for t in trials],
        "failed_tags": [len(t.failures) for t in trials],
    }
    return {m: {"mean": float(np.mean(v)), "std": float(np.std(v))} for m, v in columns.items()}


@dataclass
class GridPointResult:
    params: dict
    trials: list

    @property
    def summary(self) -> dict:
        return summarize(self.trials)


@dataclass
class AggregateReport:
    seed: int
    n_trials: int
    points: list


def validate_experiment(cfg: ExperimentConfig):
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    if len(cfg.formation) < 2:
        raise ConfigError("evaluation needs at least two drones")
    for i, axis in enumerate(AXES):
        if len({d.position[i] for d in cfg.formation}) < 2:
            raise ConfigError(f"all drones share one {axis} coordinate; accuracy undefined")
    for name, values in cfg.grid.items():
        if name not in GRID_PARAMETERS:
            raise ConfigError(f"unknown grid parameter {name!r}")
        if not values:
            raise ConfigError(f"grid parameter {name!r} has no values")


def _run_task(args):
    cfg, trial = args
    return run_trial(cfg, trial)


def run_monte_carlo(cfg: ExperimentConfig, jobs: int | None = 1) -> AggregateReport:
    """Run ``cfg.trials`` seeded trials at every grid point.

    Output depends only on the config (master seed included), never on
    ``jobs``: results are collected back into (grid point, trial) order.
    """
    validate_experiment(cfg)
    points = cfg.grid_points()
    tasks = [(cfg.at(p), k) for p in points for k in range(cfg.trials)]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        reports = [_run_task(t) for t in tasks]
    results = [
        GridPointResult(p, reports[i * cfg.trials : (i + 1) * cfg.trials])
        for i, p in enumerate(points)
    ]
    return AggregateReport(cfg.seed, cfg.trials, results)
