"""Per-tag phase time series."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class PhaseSample(NamedTuple):
    round: int
    t: float
    tag: str
    phase: float


@dataclass(eq=False)
class TagTrace:
    """Phase readings of one tag, indexed by sample position.

    Samples keep the inventory round and timestamp they were read at. Dropped
    reads leave gaps in ``rounds``; nothing downstream interpolates them.
    """

    tag_id: str
    rounds: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    phase: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.rounds = np.asarray(self.rounds, dtype=np.int64)
        self.t = np.asarray(self.t, dtype=float)
        self.phase = np.asarray(self.phase, dtype=float)
        if not (len(self.rounds) == len(self.t) == len(self.phase)):
            raise ValueError("rounds, t and phase must have equal length")

    def __len__(self):
        return len(self.phase)

    def __eq__(self, other):
        if not isinstance(other, TagTrace):
            return NotImplemented
        return (
            self.tag_id == other.tag_id
            and np.array_equal(self.rounds, other.rounds)
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.phase, other.phase)
        )

    def with_phase(self, phase) -> TagTrace:
        """Copy of this trace with the same rounds and timestamps."""
        phase = np.asarray(phase, dtype=float)
        if phase.shape != self.phase.shape:
            raise ValueError("replacement phase must keep the trace length")
        return TagTrace(self.tag_id, self.rounds.copy(), self.t.copy(), phase)

    def samples(self):
        for r, t, p in zip(self.rounds.tolist(), self.t.tolist(), self.phase.tolist()):
            yield PhaseSample(r, t, self.tag_id, p)
