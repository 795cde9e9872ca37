"""On-disk formats.

Recordings are line-delimited JSON: a header object, then one object per
phase sample. Floats are written with 17 significant digits so every value
reads back bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .config import GRID_PARAMETERS
from .evaluation import METRICS, AggregateReport
from .locator import AxisOrder, SwarmGeometry
from .sim import ReaderConfig, SweepRecording
from .trace import TagTrace
from .trough import TroughPoint

RECORDING_KIND = "sweep-recording"
REPORT_KIND = "geometry-report"
FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def _num(x: float) -> str:
    if not math.isfinite(x):
        raise FormatError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _encode(obj) -> str:
    """Compact JSON with fixed-precision floats."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise FormatError(f"cannot serialize {type(obj).__name__}")


def dumps_recording(rec: SweepRecording) -> str:
    header = {
        "kind": RECORDING_KIND,
        "version": FORMAT_VERSION,
        "axis": rec.axis,
        "direction": rec.direction,
        "reader": {
            "position": list(rec.reader.position),
            "frequency": float(rec.reader.frequency),
            "rounds_per_second": float(rec.reader.rounds_per_second),
            "allow_out_of_band": rec.reader.allow_out_of_band,
        },
        "ground_truth": {d: [float(c) for c in p] for d, p in rec.ground_truth.items()},
        "tags": dict(rec.tag_to_drone),
    }
    rows = []
    for order, tag in enumerate(rec.tag_to_drone):
        trace = rec.traces.get(tag)
        if trace is None:
            continue
        for r, t, p in zip(trace.rounds.tolist(), trace.t.tolist(), trace.phase.tolist()):
            rows.append((r, order, t, tag, p))
    rows.sort(key=lambda row: (row[0], row[1]))
    lines = [_encode(header)]
    tag_json = {tag: json.dumps(tag) for tag in rec.tag_to_drone}
    for r, _, t, tag, p in rows:
        lines.append(f'{{"round": {r}, "t": {_num(t)}, "tag": {tag_json[tag]}, "phase": {_num(p)}}}')
    return "\n".join(lines) + "\n"


def loads_recording(text: str) -> SweepRecording:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty recording")
    try:
        header = json.loads(lines[0])
        if header.get("kind") != RECORDING_KIND:
            raise FormatError("first line is not a sweep-recording header")
        tags = header["tags"]
        columns = {tag: ([], [], []) for tag in tags}
        for n, line in enumerate(lines[1:], start=2):
            s = json.loads(line)
            if s["tag"] not in columns:
                raise FormatError(f"line {n}: sample for undeclared tag {s['tag']!r}")
            rounds, ts, phases = columns[s["tag"]]
            rounds.append(int(s["round"]))
            ts.append(float(s["t"]))
            phases.append(float(s["phase"]))
        r = header["reader"]
        reader = ReaderConfig(
            tuple(r["position"]),
            float(r["frequency"]),
            float(r["rounds_per_second"]),
            bool(r.get("allow_out_of_band", False)),
        )
        truth = {d: tuple(float(c) for c in p) for d, p in header["ground_truth"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed recording: {exc}") from None
    traces = {}
    for tag, (rounds, ts, phases) in columns.items():
        if rounds:
            if any(b <= a for a, b in zip(rounds, rounds[1:])):
                raise FormatError(f"samples for tag {tag!r} are not in strictly increasing rounds")
            traces[tag] = TagTrace(tag, rounds, ts, phases)
    try:
        return SweepRecording(header["axis"], reader, traces, truth, dict(tags), int(header.get("direction", 1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed recording: {exc}") from None


def save_recording(rec: SweepRecording, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_recording(rec))


def load_recording(path) -> SweepRecording:
    with open(path, encoding="utf-8") as fh:
        return loads_recording(fh.read())


def _order_to_dict(order: AxisOrder) -> dict:
    return {
        "method": order.method,
        "direction": order.direction,
        "ranking": list(order.ranking),
        "warnings": list(order.warnings),
        "troughs": {
            d: {
                "tag": tp.tag_id,
                "index": tp.index,
                "t": tp.t,
                "value": tp.value,
                "boundary": tp.boundary,
                "strict": tp.strict,
            }
            for d, tp in order.trough_points.items()
        },
        "flags": {d: list(f) for d, f in order.confidence_flags.items()},
        "failures": dict(order.failures),
    }


def _order_from_dict(axis: str, doc: dict) -> AxisOrder:
    troughs = {
        d: TroughPoint(v["tag"], int(v["index"]), float(v["t"]), float(v["value"]), bool(v["boundary"]), bool(v["strict"]))
        for d, v in doc["troughs"].items()
    }
    return AxisOrder(
        axis=axis,
        ranking=list(doc["ranking"]),
        trough_points=troughs,
        confidence_flags={d: tuple(f) for d, f in doc["flags"].items()},
        failures=dict(doc["failures"]),
        direction=int(doc["direction"]),
        method=doc["method"],
        warnings=tuple(doc["warnings"]),
    )


def geometry_to_dict(geom: SwarmGeometry) -> dict:
    return {
        "kind": REPORT_KIND,
        "version": FORMAT_VERSION,
        "partial": geom.partial,
        "ranks": {d: list(r) for d, r in geom.ranks.items()},
        "axes": {a: _order_to_dict(o) for a, o in geom.orders.items()},
    }


def geometry_from_dict(doc: dict) -> SwarmGeometry:
    if doc.get("kind") != REPORT_KIND:
        raise FormatError("not a geometry report")
    return SwarmGeometry(
        {d: tuple(int(x) for x in r) for d, r in doc["ranks"].items()},
        {a: _order_from_dict(a, o) for a, o in doc["axes"].items()},
    )


def save_report(geom: SwarmGeometry, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(geometry_to_dict(geom), fh, indent=2)
        fh.write("\n")


def load_report(path) -> SwarmGeometry:
    with open(path, encoding="utf-8") as fh:
        return geometry_from_dict(json.load(fh))


def aggregate_to_dict(report: AggregateReport) -> dict:
    return {
        "kind": "aggregate-report",
        "version": FORMAT_VERSION,
        "master_seed": report.seed,
        "trials": report.n_trials,
        "grid": [
            {
                "params": dict(point.params),
                "metrics": point.summary,
                "per_trial": [
                    {
                        "trial": t.seed,
                        "per_axis_accuracy": t.per_axis_accuracy,
                        "geometry_accuracy": t.geometry_accuracy,
                        "failures": t.failures,
                    }
                    for t in point.trials
                ],
            }
            for point in report.points
        ],
    }


def aggregate_csv(report: AggregateReport) -> str:
    """One row per grid point and metric."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*GRID_PARAMETERS, "metric", "mean", "std", "trials"])
    for point in report.points:
        summary = point.summary
        for metric in METRICS:
            writer.writerow(
                [*(repr(float(point.params[p])) for p in GRID_PARAMETERS), metric,
                 repr(summary[metric]["mean"]), repr(summary[metric]["std"]), len(point.trials)]
            )
    return buf.getvalue()


def save_aggregate(report: AggregateReport, json_path, csv_path):
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(aggregate_to_dict(report), fh, indent=2)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(aggregate_csv(report))
