import json
from pathlib import Path

import numpy as np
import pytest

from rfswarm.config import parse_config
from rfswarm.sim import AXES, DroneSpec, NoiseModel, ReaderConfig, make_axis_sweep, plan_sweep, simulate_recording

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

# Staggered 5-drone formation: every axis holds a permutation of 0..0.8 m in
# 0.2 m steps, so all per-axis gaps exceed half a wavelength (~0.164 m).
STAGGERED = [
    DroneSpec("d1", (0.0, 0.4, 0.2)),
    DroneSpec("d2", (0.2, 0.0, 0.6)),
    DroneSpec("d3", (0.4, 0.6, 0.0)),
    DroneSpec("d4", (0.6, 0.2, 0.8)),
    DroneSpec("d5", (0.8, 0.8, 0.4)),
]


@pytest.fixture
def reader():
    return ReaderConfig()


@pytest.fixture
def staggered():
    return list(STAGGERED)


@pytest.fixture
def truth():
    return {d.drone_id: d.position for d in STAGGERED}


def load_doc(name):
    return json.loads((CONFIGS / name).read_text())


@pytest.fixture
def default_config():
    return parse_config(load_doc("default.json"))


def sweep_recordings(formation, reader, sigma=0.0, drop=0.0, seed=0, speed=0.15, offsets=None):
    """x, y and z recordings of one formation under a shared noise setting."""
    if offsets is not None:
        formation = [DroneSpec(d.drone_id, d.position, d.tag_id, mu) for d, mu in zip(formation, offsets)]
    recs = {}
    for i, axis in enumerate("xyz"):
        trajs = plan_sweep(formation, axis, speed, reader)
        recs[axis] = simulate_recording(trajs, reader, NoiseModel(seed * 3 + i, sigma, drop))
    return recs


def random_pass(rng, reader, sigma=0.0, drop=0.0, max_speed=0.5):
    """One tag on a random straight pass past the reader."""
    offsets = (float(rng.uniform(0, 2 * np.pi)),)
    lateral = float(rng.uniform(0.5, 2.5))
    height = float(rng.uniform(-0.5, 0.5))
    speed = float(rng.uniform(0.1, max_speed))
    axis = "xyz"[int(rng.integers(3))]
    drone = DroneSpec("d", (0.0, 0.0, height) if axis != "z" else (0.0, 0.0, 0.0), "t", offsets[0])
    trajs = plan_sweep([drone], axis, speed, reader, standoff=lateral, margin=float(rng.uniform(0.5, 2.0)))
    noise = NoiseModel(int(rng.integers(2**63)), sigma, drop)
    return simulate_recording(trajs, reader, noise).traces["t"]


# Height-confound scenario in absolute coordinates, reader at the origin.
# Both drones share x; y1 < y2 but drone 1 flies 1.2 m higher, so its range
# to the reader at closest approach is larger: sqrt(1.0^2 + 1.2^2) > 1.3.
CONFOUND = [DroneSpec("d1", (0.0, 1.0, 1.2)), DroneSpec("d2", (0.0, 1.3, 0.0))]


def confound_sweeps(reader):
    """One sweep per axis; each moves the formation rigidly past the reader."""
    recs = {}
    for a, axis in enumerate(AXES):
        shift = np.zeros(3)
        shift[a] = -2.0
        if axis != "x":
            # hold the formation off the reader along x instead of crossing it
            shift[0] += 1.5
        placed = [DroneSpec(d.drone_id, tuple(np.add(d.position, shift))) for d in CONFOUND]
        trajs = make_axis_sweep(placed, axis, 0.15, 4.0 / 0.15 + 10.0, reader.wavelength)
        recs[axis] = simulate_recording(trajs, reader, NoiseModel(0))
    return recs
