"""Trace assembly, Savitzky-Golay smoothing and rotation-step flagging."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import EmptyTraceError, InsufficientDataError, InvalidParameterError
from .trace import PhaseSample, TagTrace


@dataclass(frozen=True)
class FilterConfig:
    window: int = 21
    polyorder: int = 3

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise InvalidParameterError(f"filter window must be odd and >= 3, got {self.window}")
        if not 0 <= self.polyorder < self.window:
            raise InvalidParameterError("polyorder must satisfy 0 <= polyorder < window")


def assemble_trace(samples, tag_id) -> TagTrace:
    """Collect one tag's samples, sorted by round; repeated rounds keep the first read."""
    mine = [PhaseSample(*s) for s in samples if PhaseSample(*s).tag == tag_id]
    if not mine:
        raise EmptyTraceError(f"no samples for tag {tag_id!r}")
    # sorted() is stable, so the first occurrence of a duplicated round stays first
    mine = sorted(mine, key=lambda s: s.round)
    kept = [mine[0]]
    for s in mine[1:]:
        if s.round != kept[-1].round:
            kept.append(s)
    return TagTrace(
        tag_id,
        [s.round for s in kept],
        [s.t for s in kept],
        [s.phase for s in kept],
    )


@lru_cache(maxsize=32)
def _projection(window: int, polyorder: int) -> np.ndarray:
    """Hat matrix of a least-squares polynomial fit over one window.

    Row ``k`` maps the window's samples to the fitted value at position ``k``.
    """
    half = window // 2
    x = np.arange(-half, half + 1, dtype=float)
    vander = np.vander(x, polyorder + 1, increasing=True)
    hat = vander @ np.linalg.pinv(vander)
    hat.setflags(write=False)
    return hat


def savgol_values(y, window: int, polyorder: int) -> np.ndarray:
    """Smooth a 1-D array with a Savitzky-Golay filter.

    Interior points use the centred fit. The first and last ``window // 2``
    points are read off the polynomial fitted to the terminal window.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < window:
        raise InsufficientDataError(f"need at least {window} samples, got {n}")
    hat = _projection(window, polyorder)
    half = window // 2
    out = np.empty(n)
    out[half : n - half] = sliding_window_view(y, window) @ hat[half]
    out[:half] = hat[:half] @ y[:window]
    out[n - half :] = hat[half + 1 :] @ y[n - window :]
    return out


def savitzky_golay(trace: TagTrace, cfg: FilterConfig = FilterConfig()) -> TagTrace:
    """Filter a spliced (wrap-free) trace; rounds and timestamps are kept as is."""
    return trace.with_phase(savgol_values(trace.phase, cfg.window, cfg.polyorder))


def _window_slopes(y, width):
    """Least-squares slope of every length-``width`` window, by start index."""
    k = np.arange(width) - (width - 1) / 2
    return np.correlate(y, k / (k @ k), mode="valid")


def level_shift_scores(y, sustain: int, flank: int | None = None) -> np.ndarray:
    """Level shift at every index, NaN where undefined.

    The shift at index ``i`` is ``median(y[i:i+s]) - median(y[i-s:i])`` taken
    after removing the local slope from both windows. The slope is fitted on
    the flanking windows ``y[i-s-w:i-s]`` and ``y[i+s:i+s+w]`` (whichever
    fit inside the trace), so a step at ``i`` does not bias it. Without the
    detrending a steep but smooth profile reads as a level shift, and the
    median of a steep window is barely less noisy than a single sample.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    s = sustain
    w = flank if flank is not None else 3 * s
    scores = np.full(n, np.nan)
    if n < 2 * s + w:
        return scores
    idx = np.arange(s, n - s + 1)
    slopes = _window_slopes(y, w)
    before = idx - s - w
    after = idx + s
    has_b = before >= 0
    has_a = after + w <= n
    total = np.where(has_b, slopes[np.clip(before, 0, len(slopes) - 1)], 0.0)
    total += np.where(has_a, slopes[np.clip(after, 0, len(slopes) - 1)], 0.0)
    count = has_b.astype(int) + has_a
    ok = count > 0
    idx, g = idx[ok], total[ok] / count[ok]
    windows = sliding_window_view(y, s)
    lag = np.arange(s)
    b = windows[idx - s] - g[:, None] * (lag - s)[None, :]
    a = windows[idx] - g[:, None] * lag[None, :]
    scores[idx] = np.median(a, axis=1) - np.median(b, axis=1)
    return scores


def detect_rotation_events(trace: TagTrace, step_threshold=1.0, sustain=9, flank=None):
    """Flag index ranges where the phase level jumps by more than ``step_threshold``.

    The trace must be spliced. Returns a list of ``(start, stop)`` pairs,
    ``stop`` exclusive, sorted by position. A range is reported only if its
    peak score dominates everything within one flank-plus-sustain of it;
    this suppresses the echoes a single step leaves while it passes through
    the flanking windows.
    """
    if sustain < 1:
        raise InvalidParameterError("sustain must be at least one sample")
    w = flank if flank is not None else 3 * sustain
    scores = np.abs(level_shift_scores(trace.phase, sustain, w))
    above = np.nan_to_num(scores, nan=0.0) > step_threshold
    if not above.any():
        return []
    edges = np.flatnonzero(np.diff(np.concatenate(([0], above.astype(np.int8), [0]))))
    reach = sustain + w
    filled = np.nan_to_num(scores, nan=0.0)
    ranges = []
    for start, stop in zip(edges[::2], edges[1::2]):
        peak = start + int(np.argmax(filled[start:stop]))
        lo, hi = max(0, peak - reach), min(len(filled), peak + reach + 1)
        if filled[peak] >= filled[lo:hi].max():
            ranges.append((int(start), int(stop)))
    return ranges
