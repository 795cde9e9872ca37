"""Experiment configuration: a single JSON document validated against a schema."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

import jsonschema

from .errors import ConfigError, RFSwarmError
from .locator import PipelineConfig
from .pipeline import FilterConfig
from .sim import AXES, SPEED_PRESETS, DroneSpec, ReaderConfig, RotationEvent, check_spacing

GRID_PARAMETERS = ("phase_sigma", "read_drop_prob", "speed", "standoff")

_point = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_speed = {
    "oneOf": [
        {"type": "string", "enum": sorted(SPEED_PRESETS)},
        {"type": "number", "exclusiveMinimum": 0},
    ]
}

SCHEMA = {
    "type": "object",
    "required": ["seed", "formation"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**63 - 1},
        "formation": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "offset"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "tag": {"type": "string", "minLength": 1},
                    "offset": _point,
                },
            },
        },
        "reader": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "position": _point,
                "frequency": {"type": "number", "exclusiveMinimum": 0},
                "rounds_per_second": {"type": "number", "exclusiveMinimum": 0},
                "allow_out_of_band": {"type": "boolean"},
            },
        },
        "axes": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"type": "string", "enum": list(AXES)},
        },
        "speed": _speed,
        "standoff": {"type": "number", "exclusiveMinimum": 0},
        "margin": {"type": "number", "exclusiveMinimum": 0},
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "phase_sigma": {"type": "number", "minimum": 0},
                "read_drop_prob": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "rotation_events": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["tag", "t", "step"],
                        "additionalProperties": False,
                        "properties": {
                            "tag": {"type": "string"},
                            "t": {"type": "number", "minimum": 0},
                            "step": {"type": "number"},
                        },
                    },
                },
            },
        },
        "pipeline": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "window": {"type": "integer", "minimum": 3},
                "polyorder": {"type": "integer", "minimum": 0},
                "guard": {"type": "integer", "minimum": 1},
                "rotation_threshold": {"type": "number", "exclusiveMinimum": 0},
                "rotation_sustain": {"type": "integer", "minimum": 1},
            },
        },
        "trials": {"type": "integer", "minimum": 1},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "phase_sigma": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
                "read_drop_prob": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                },
                "speed": {"type": "array", "minItems": 1, "items": _speed},
                "standoff": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "plots": {"type": "boolean"}},
        },
    },
}


def resolve_speed(value) -> float:
    if isinstance(value, str):
        try:
            return SPEED_PRESETS[value]
        except KeyError:
            raise ConfigError(f"unknown speed preset {value!r}") from None
    return float(value)


@dataclass(frozen=True)
class NoiseSettings:
    phase_sigma: float = 0.0
    read_drop_prob: float = 0.0
    rotation_events: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    formation: tuple
    reader: ReaderConfig = ReaderConfig()
    axes: tuple = AXES
    speed: float = SPEED_PRESETS["low"]
    standoff: float = 1.5
    margin: float = 1.5
    noise: NoiseSettings = NoiseSettings()
    pipeline: PipelineConfig = PipelineConfig()
    trials: int = 1
    grid: dict = field(default_factory=dict)
    output_dir: str | None = None
    plots: bool = True

    def grid_points(self) -> list:
        """Cartesian product of the grid, in a fixed parameter order.

        Parameters absent from the grid take their base value. With no grid
        the result is the single base point.
        """
        base = {
            "phase_sigma": self.noise.phase_sigma,
            "read_drop_prob": self.noise.read_drop_prob,
            "speed": self.speed,
            "standoff": self.standoff,
        }
        values = [self.grid.get(name, [base[name]]) for name in GRID_PARAMETERS]
        return [dict(zip(GRID_PARAMETERS, combo)) for combo in itertools.product(*values)]

    def at(self, point: dict) -> ExperimentConfig:
        """The configuration with one grid point's values substituted in."""
        noise = replace(self.noise, phase_sigma=point["phase_sigma"], read_drop_prob=point["read_drop_prob"])
        return replace(self, noise=noise, speed=point["speed"], standoff=point["standoff"], grid={})


def parse_config(doc: dict, seed_override: int | None = None) -> ExperimentConfig:
    """Validate a decoded JSON document and build an ExperimentConfig.

    Raises ConfigError with a human-readable message on any problem.
    """
    if seed_override is not None:
        doc = {**doc, "seed": seed_override}
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None

    try:
        formation = tuple(
            DroneSpec(d["id"], tuple(d["offset"]), d.get("tag")) for d in doc["formation"]
        )
        ids = [d.drone_id for d in formation]
        tags = [d.tag_id for d in formation]
        if len(set(ids)) != len(ids):
            raise ConfigError("formation has duplicate drone ids")
        if len(set(tags)) != len(tags):
            raise ConfigError("formation has duplicate tag ids")

        reader = ReaderConfig(**doc.get("reader", {}))
        check_spacing(formation, reader.wavelength)
        n = doc.get("noise", {})
        events = tuple(RotationEvent(e["tag"], e["t"], e["step"]) for e in n.get("rotation_events", ()))
        unknown = {e.tag_id for e in events} - set(tags)
        if unknown:
            raise ConfigError(f"rotation events reference unknown tags: {sorted(unknown)}")
        noise = NoiseSettings(n.get("phase_sigma", 0.0), n.get("read_drop_prob", 0.0), events)

        p = doc.get("pipeline", {})
        pipeline = PipelineConfig(
            FilterConfig(p.get("window", 21), p.get("polyorder", 3)),
            guard=p.get("guard", 5),
            rotation_threshold=p.get("rotation_threshold", 1.0),
            rotation_sustain=p.get("rotation_sustain", 9),
        )
        grid = {k: list(v) for k, v in doc.get("grid", {}).items()}
        if "speed" in grid:
            grid["speed"] = [resolve_speed(s) for s in grid["speed"]]
        outputs = doc.get("outputs", {})
        return ExperimentConfig(
            seed=doc["seed"],
            formation=formation,
            reader=reader,
            axes=tuple(doc.get("axes", AXES)),
            speed=resolve_speed(doc.get("speed", "low")),
            standoff=doc.get("standoff", 1.5),
            margin=doc.get("margin", 1.5),
            noise=noise,
            pipeline=pipeline,
            trials=doc.get("trials", 1),
            grid=grid,
            output_dir=outputs.get("dir"),
            plots=outputs.get("plots", True),
        )
    except ConfigError:
        raise
    except RFSwarmError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    """Read and validate a config file. OSError propagates for the caller to classify."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(doc, seed_override)
