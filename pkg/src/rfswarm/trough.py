"""Phase splicing and trough lowest-point extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError
from .trace import TagTrace

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TroughPoint:
    tag_id: str
    index: int
    t: float
    value: float
    boundary: bool = False
    strict: bool = True


def splice_values(theta) -> np.ndarray:
    """Remove 2*pi wraps in a single left-to-right pass.

    Each sample is compared with its already-corrected predecessor. A jump
    above pi is pulled down by the smallest multiple of 2*pi that brings it
    back within pi, and symmetrically for drops below -pi. For raw phases in
    [0, 2*pi) the multiple is always one.
    """
    theta = np.asarray(theta, dtype=float)
    out = theta.copy()
    if len(out) < 2:
        return out
    prev = out[0]
    raw = theta.tolist()
    for i in range(1, len(raw)):
        cur = raw[i]
        diff = cur - prev
        if diff > math.pi:
            cur -= math.ceil((diff - math.pi) / TWO_PI) * TWO_PI
        elif diff < -math.pi:
            cur += math.ceil((-diff - math.pi) / TWO_PI) * TWO_PI
        out[i] = cur
        prev = cur
    return out


def splice(trace: TagTrace) -> TagTrace:
    return trace.with_phase(splice_values(trace.phase))


class ComparisonCounter:
    """Counts element comparisons made by the trough search."""

    def __init__(self):
        self.count = 0


def find_trough_lowest(spliced: TagTrace, guard: int = 5, counter: ComparisonCounter | None = None) -> TroughPoint:
    """Locate the lowest point of the trough in one pass.

    A running minimum is carried through the profile; a candidate is only
    replaced by a strictly lower sample, so ties resolve to the earliest
    index. The winner is then checked against its ``guard`` neighbours on
    each side. A winner that is not strictly below all of them, or that sits
    within ``guard`` samples of either end, is still returned but marked
    (``strict=False`` / ``boundary=True``).
    """
    y = spliced.phase.tolist()
    n = len(y)
    if guard < 1:
        raise ValueError("guard must be at least 1")
    if n < 2 * guard + 1:
        raise InsufficientDataError(f"trough search needs {2 * guard + 1} samples, got {n}")
    comparisons = 0
    best, best_val = 0, y[0]
    for i in range(1, n):
        comparisons += 1
        if y[i] < best_val:
            best, best_val = i, y[i]
    strict = True
    for j in range(max(0, best - guard), min(n, best + guard + 1)):
        if j == best:
            continue
        comparisons += 1
        if not y[j] > best_val:
            strict = False
            break
    if counter is not None:
        counter.count += comparisons
    boundary = best < guard or best > n - 1 - guard
    return TroughPoint(spliced.tag_id, best, float(spliced.t[best]), best_val, boundary, strict)


def brute_force_min(spliced: TagTrace) -> int:
    """Index of the smallest value by exhaustive scan; earliest index on ties."""
    y = spliced.phase
    if len(y) == 0:
        raise InsufficientDataError("empty trace")
    return int(np.argmin(y))
