"""Figures written next to the JSON/CSV outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .config import GRID_PARAMETERS  # noqa: E402
from .locator import PipelineConfig, profile_tag  # noqa: E402
from .sim import AXES  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 120,
}

# strip the matplotlib version from PNG metadata so reruns are byte-identical
_PNG_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)


def plot_phase_profiles(recordings: dict, path, cfg: PipelineConfig = PipelineConfig()):
    """Spliced and smoothed phase of every tag, one panel per sweep, troughs marked."""
    axes_present = [a for a in AXES if a in recordings]
    with plt.rc_context(STYLE):
        fig, panels = plt.subplots(len(axes_present), 1, figsize=(6.5, 2.4 * len(axes_present)), squeeze=False)
        for ax, axis in zip(panels[:, 0], axes_present):
            rec = recordings[axis]
            for drone in rec.drone_ids:
                trace = rec.trace_for(drone)
                try:
                    prof = profile_tag(trace, cfg)
                except ValueError:
                    continue
                # offset each profile by its own start so shapes are comparable
                base = prof.smoothed.phase[0]
                (line,) = ax.plot(prof.smoothed.rounds, prof.smoothed.phase - base, label=drone)
                ax.plot(prof.spliced.rounds, prof.spliced.phase - base, color=line.get_color(), alpha=0.25, lw=0.6)
                tp = prof.trough
                ax.plot(prof.smoothed.rounds[tp.index], tp.value - base, "v", color=line.get_color(), ms=6)
            ax.set_title(f"{axis} sweep")
            ax.set_xlabel("inventory round")
            ax.set_ylabel("phase - start (rad)")
            ax.legend(ncol=min(5, len(rec.drone_ids)), loc="upper center", frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_accuracy(report, path):
    """Mean accuracy (with one-std bars) across the evaluation grid."""
    points = report.points
    varying = [p for p in GRID_PARAMETERS if len({pt.params[p] for pt in points}) > 1]
    if len(varying) == 1:
        xs = np.array([pt.params[varying[0]] for pt in points], dtype=float)
        xlabel = varying[0]
        ticks = None
    else:
        xs = np.arange(len(points), dtype=float)
        xlabel = "grid point"
        ticks = [", ".join(f"{p}={pt.params[p]:g}" for p in varying) or "base" for pt in points]
    series = [
        ("accuracy_x", "x"),
        ("accuracy_y", "y"),
        ("accuracy_z", "z"),
        ("geometry", "geometry"),
    ]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        for metric, label in series:
            mean = np.array([pt.summary[metric]["mean"] for pt in points])
            std = np.array([pt.summary[metric]["std"] for pt in points])
            ax.errorbar(xs, mean, yerr=std, marker="o", ms=3, capsize=2, label=label)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("accuracy")
        ax.set_title(f"{report.n_trials} trials per point, master seed {report.seed}")
        if ticks is not None:
            ax.set_xticks(xs)
            ax.set_xticklabels(ticks, rotation=30, ha="right")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
