"""Core time/matrix types shared by every other module.

Conventions used throughout the package:

* slots are 1-indexed, ``1 <= s <= S`` with ``S = 1440 / slot_minutes``;
* client ids are 1-indexed, ``1 <= i <= N``, stable across all days;
* a daily matrix stores one row per slot and one column per client,
  cell values are 0 (unavailable) or 1 (available);
* availability runs never wrap across midnight - a run is truncated at
  slot S.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rifles import _kernels

MINUTES_PER_DAY = 1440

MATRIX_FILE_RE = re.compile(r"day_(\d+)\.csv$")


def slots_per_day(slot_minutes: int) -> int:
    """Number of slots S in one day; ``slot_minutes`` must divide 1440."""
    if slot_minutes <= 0 or MINUTES_PER_DAY % slot_minutes != 0:
        raise ValueError(
            f"slot_minutes must be a positive divisor of {MINUTES_PER_DAY}, "
            f"got {slot_minutes}"
        )
    return MINUTES_PER_DAY // slot_minutes


def slot_of_timestamp(t_min: float, slot_minutes: int) -> int:
    """Map a minutes-of-day timestamp in (0, 1440] to its 1-indexed slot.

    A timestamp on a slot boundary belongs to the slot it closes, e.g.
    t=120 with 2-minute slots falls in slot 60.
    """
    num_slots = slots_per_day(slot_minutes)
    if not 0 < t_min <= MINUTES_PER_DAY:
        raise ValueError(f"timestamp must be in (0, {MINUTES_PER_DAY}], got {t_min}")
    slot = math.ceil(t_min / slot_minutes)
    return min(slot, num_slots)


def substream_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic per-stage RNG: one root seed, integer stream keys."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *stream]))


@dataclass(frozen=True, eq=False)
class AvailabilityMatrix:
    """One day's S x N binary availability grid (observed or predicted).

    ``cells[s-1, i-1]`` is the status of client ``i`` at slot ``s``.
    Instances are immutable after construction and safe to share.
    """

    day: int
    cells: np.ndarray

    def __post_init__(self):
        if self.day < 1:
            raise ValueError(f"day must be >= 1, got {self.day}")
        cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError(f"cells must be a non-empty 2-D grid, got shape {np.shape(self.cells)}")
        if not np.isin(cells, (0, 1)).all():
            raise ValueError("cells must be binary")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def num_slots(self) -> int:
        return self.cells.shape[0]

    @property
    def num_clients(self) -> int:
        return self.cells.shape[1]

    def status(self, slot: int, client: int) -> int:
        """Cell value at 1-indexed (slot, client)."""
        self._check_indices(slot, client)
        return int(self.cells[slot - 1, client - 1])

    def run_lengths(self) -> np.ndarray:
        """S x N grid of consecutive-available run lengths starting per cell."""
        return _kernels.run_lengths(self.cells)

    def _check_indices(self, slot: int, client: int):
        if not 1 <= slot <= self.num_slots:
            raise ValueError(f"slot {slot} out of range [1, {self.num_slots}]")
        if not 1 <= client <= self.num_clients:
            raise ValueError(f"client {client} out of range [1, {self.num_clients}]")

    def __eq__(self, other):
        if not isinstance(other, AvailabilityMatrix):
            return NotImplemented
        return self.day == other.day and np.array_equal(self.cells, other.cells)


def consecutive_run_length(matrix: AvailabilityMatrix, client: int, start: int) -> int:
    """Count consecutive available slots for ``client`` from ``start`` inclusive.

    Stops at the first unavailable slot or at the end of the day (no
    wraparound). Deliberately a plain per-cell scan: it is the reference
    the vectorized kernels are checked against.
    """
    matrix._check_indices(start, client)
    col = matrix.cells[:, client - 1]
    run = 0
    for s in range(start - 1, matrix.num_slots):
        if col[s] == 0:
            break
        run += 1
    return run


def matrix_filename(day: int) -> str:
    return f"day_{day}.csv"


def write_matrix_csv(matrix: AvailabilityMatrix, path: str | Path):
    """Write a daily matrix in the shared CSV contract.

    Header ``slot,c1..cN``, one row per slot, cells 0/1.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot"] + [f"c{i}" for i in range(1, matrix.num_clients + 1)])
        for s in range(matrix.num_slots):
            writer.writerow([s + 1] + matrix.cells[s].tolist())


def read_matrix_csv(path: str | Path, day: int | None = None) -> AvailabilityMatrix:
    """Read a daily matrix CSV; the day is taken from ``day_<d>.csv`` unless given."""
    path = Path(path)
    if day is None:
        m = MATRIX_FILE_RE.search(path.name)
        if not m:
            raise ValueError(
                f"cannot infer day from filename {path.name!r}; pass day= explicitly"
            )
        day = int(m.group(1))
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "slot":
            raise ValueError(f"{path}: expected header starting with 'slot'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            rows.append([int(v) for v in row[1:]])
    if not rows:
        raise ValueError(f"{path}: no slot rows")
    return AvailabilityMatrix(day=day, cells=np.array(rows, dtype=np.uint8))
