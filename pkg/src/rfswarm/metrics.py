"""Ordering accuracy against simulator ground truth."""

from __future__ import annotations

import itertools

from .errors import UndefinedMetricError
from .locator import AxisOrder, SwarmGeometry, true_ranks
from .sim import axis_index


def pairwise_accuracy(predicted: AxisOrder, truth: dict, axis: str | None = None) -> float:
    """Fraction of drone pairs whose predicted order matches the true order.

    Pairs with identical true coordinates carry no order and are skipped.
    Equivalent to one minus the normalised Kendall distance.
    """
    axis = axis or predicted.axis
    a = axis_index(axis)
    ranks = predicted.ranks()
    if set(ranks) != set(truth):
        raise UndefinedMetricError("prediction and ground truth cover different drones")
    if len(ranks) < 2:
        raise UndefinedMetricError("pairwise accuracy needs at least two drones")
    concordant = total = 0
    for i, j in itertools.combinations(sorted(ranks), 2):
        ci, cj = truth[i][a], truth[j][a]
        if ci == cj:
            continue
        total += 1
        # direction +1: larger coordinate should get the smaller rank
        true_first = i if (ci - cj) * predicted.direction > 0 else j
        pred_first = i if ranks[i] < ranks[j] else j
        concordant += true_first == pred_first
    if total == 0:
        raise UndefinedMetricError("all drones share the same coordinate on this axis")
    return concordant / total


def geometry_accuracy(predicted: SwarmGeometry, truth: dict) -> float:
    """Fraction of drones whose whole (x, y, z) rank triple is right."""
    if set(predicted.ranks) != set(truth):
        raise UndefinedMetricError("prediction and ground truth cover different drones")
    if not truth:
        raise UndefinedMetricError("empty swarm")
    expected = true_ranks(truth, predicted.directions)
    hits = sum(predicted.ranks[d] == expected[d] for d in truth)
    return hits / len(truth)
