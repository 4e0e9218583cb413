"""Eligibility matrices: which (slot, client) pairs can host a training task.

A client is eligible at a slot when its predicted-available run from that
slot covers its expected response duration plus a constant buffer of slots
for communication variability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rifles.core import AvailabilityMatrix, slots_per_day, write_matrix_csv
from rifles.predictors import ResponseTracker


@dataclass(frozen=True, eq=False)
class EligibilityMatrix:
    """S x N binary eligibility grid plus the cached run lengths behind it."""

    day: int
    cells: np.ndarray        # uint8, E[s-1, i-1]
    run_lengths: np.ndarray  # int32, predicted-available run per cell
    slots_needed: np.ndarray  # int32 per client, response slots incl. buffer

    def __post_init__(self):
        cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def num_slots(self) -> int:
        return self.cells.shape[0]

    @property
    def num_clients(self) -> int:
        return self.cells.shape[1]

    def eligible_clients(self, slot: int) -> list[int]:
        """Ids of clients eligible at a 1-indexed slot."""
        return [int(i) + 1 for i in np.flatnonzero(self.cells[slot - 1])]

    def __eq__(self, other):
        if not isinstance(other, EligibilityMatrix):
            return NotImplemented
        return self.day == other.day and np.array_equal(self.cells, other.cells)


def slots_needed(tracker: ResponseTracker, client: int, buffer_slots: int,
                 slot_minutes: int) -> int:
    """Slots an eligible window must cover: ceil(expected / slot) + buffer,
    at least one slot."""
    if buffer_slots < 0:
        raise ValueError("buffer_slots must be >= 0")
    slots_per_day(slot_minutes)
    return max(1, math.ceil(tracker.expected(client) / slot_minutes) + buffer_slots)


def build_eligibility(pa: AvailabilityMatrix, tracker: ResponseTracker,
                      slot_minutes: int, buffer_slots: int = 2) -> EligibilityMatrix:
    """Eligibility for one predicted day.

    Run lengths come from one reverse pass per client; a per-cell scan oracle
    must agree exactly (see the acceptance suite).
    """
    if tracker.num_clients != pa.num_clients:
        raise ValueError(
            f"tracker covers {tracker.num_clients} clients, matrix has {pa.num_clients}"
        )
    runs = pa.run_lengths()
    needed = np.array(
        [slots_needed(tracker, i, buffer_slots, slot_minutes)
         for i in range(1, pa.num_clients + 1)],
        dtype=np.int32,
    )
    cells = (runs >= needed[None, :]).astype(np.uint8)
    return EligibilityMatrix(day=pa.day, cells=cells, run_lengths=runs,
                             slots_needed=needed)


def eligibility_filename(day: int) -> str:
    return f"eligibility_day_{day}.csv"


def write_eligibility_csv(matrix: EligibilityMatrix, path: str | Path):
    write_matrix_csv(AvailabilityMatrix(day=matrix.day, cells=matrix.cells), path)
