"""Command-line entry point: ``rfswarm simulate | locate | evaluate``.

Exit codes: 0 success, 1 partial result, 2 configuration or input error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, RFSwarmError
from .evaluation import run_monte_carlo, simulate_sweeps, validate_experiment
from .fileio import FormatError, load_recording, save_aggregate, save_recording, save_report
from .locator import PipelineConfig, locate_swarm

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("rfswarm")


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.output_dir
    if not out:
        raise ConfigError("no output directory: pass --out or set outputs.dir in the config")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.seed)
    out = _out_dir(args, cfg)
    recordings = simulate_sweeps(cfg, trial=0, axes=cfg.axes)
    for axis, rec in recordings.items():
        path = out / f"sweep_{axis}.jsonl"
        save_recording(rec, path)
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_locate(args) -> int:
    pipeline = load_config(args.config).pipeline if args.config else PipelineConfig()
    recs = [load_recording(p) for p in args.recordings]
    by_axis = {r.axis: r for r in recs}
    if sorted(by_axis) != ["x", "y", "z"]:
        raise ConfigError(f"need one x, one y and one z recording, got {[r.axis for r in recs]}")
    geometry = locate_swarm(by_axis["x"], by_axis["y"], by_axis["z"], pipeline)
    out = Path(args.out)
    if out.parent:
        out.parent.mkdir(parents=True, exist_ok=True)
    save_report(geometry, out)
    if args.plots:
        from .plotting import plot_phase_profiles

        plot_phase_profiles(by_axis, out.with_name(out.stem + "_profiles.png"), pipeline)
    for axis, order in geometry.orders.items():
        for drone, reason in order.failures.items():
            print(f"warning: {axis} sweep, drone {drone}: {reason}", file=sys.stderr)
    return EXIT_PARTIAL if geometry.partial else EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config, args.seed)
    validate_experiment(cfg)
    out = _out_dir(args, cfg)
    report = run_monte_carlo(cfg, jobs=args.jobs)
    save_aggregate(report, out / "aggregate.json", out / "aggregate.csv")
    if args.plots and cfg.plots:
        from .plotting import plot_accuracy

        plot_accuracy(report, out / "accuracy.png")
    for point in report.points:
        m = point.summary
        log.info(
            "%s: per-axis %.3f, geometry %.3f",
            json.dumps(point.params),
            m["accuracy_mean"]["mean"],
            m["geometry"]["mean"],
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfswarm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None, help="override the config's master seed")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
        p.add_argument("--no-plots", dest="plots", action="store_false", help="skip figure rendering")

    p = sub.add_parser("simulate", help="write x/y/z sweep recordings")
    common(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("locate", help="rank drones from three sweep recordings")
    common(p, config_required=False)
    p.add_argument("recordings", nargs=3, help="x, y and z recordings (any order)")
    p.add_argument("--out", required=True, help="geometry report path (JSON)")
    p.set_defaults(func=cmd_locate)

    p = sub.add_parser("evaluate", help="Monte-Carlo accuracy over a parameter grid")
    common(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RFSwarmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
