"""Heartbeat streams and their ingestion into daily availability matrices.

A heartbeat reports a client's binary status at a minutes-of-day timestamp.
Its status stays in force for the client's validity window (W slots beyond
its own), and a later heartbeat overrides earlier ones from its own slot
onward. Slots covered by no valid heartbeat default to unavailable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from rifles import _kernels
from rifles.core import AvailabilityMatrix, MINUTES_PER_DAY, slot_of_timestamp, slots_per_day


@dataclass(frozen=True)
class Heartbeat:
    day: int
    client: int
    t_min: float
    status: int

    def __post_init__(self):
        if self.status not in (0, 1):
            raise ValueError(f"status must be 0 or 1, got {self.status}")
        if not 0 < self.t_min <= MINUTES_PER_DAY:
            raise ValueError(f"t_min must be in (0, {MINUTES_PER_DAY}], got {self.t_min}")
        if self.day < 1 or self.client < 1:
            raise ValueError("day and client must be >= 1")


@dataclass
class IngestConfig:
    slot_minutes: int = 2
    validity_window: int = 5
    loss_fraction: float = 0.02
    per_client_windows: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        slots_per_day(self.slot_minutes)
        if self.validity_window < 1:
            raise ValueError("validity_window must be >= 1")
        if not 0.0 <= self.loss_fraction < 1.0:
            raise ValueError("loss_fraction must be in [0, 1)")
        for client, window in self.per_client_windows.items():
            if window < 1:
                raise ValueError(f"validity window for client {client} must be >= 1")

    def windows_array(self, num_clients: int) -> np.ndarray:
        windows = np.full(num_clients, self.validity_window, dtype=np.int64)
        for client, window in self.per_client_windows.items():
            if 1 <= client <= num_clients:
                windows[client - 1] = window
        return windows

    @property
    def max_window(self) -> int:
        return max([self.validity_window, *self.per_client_windows.values()])


@dataclass
class IngestResult:
    matrix: AvailabilityMatrix
    rejected: int


def build_daily_matrix(heartbeats: list[Heartbeat], cfg: IngestConfig,
                       num_clients: int, day: int | None = None) -> IngestResult:
    """Replay one day's heartbeat stream into an availability matrix.

    Heartbeats are replayed in slot order (stable for duplicates, so the
    last one in stream order wins); beats for unknown clients are rejected
    and counted.
    """
    num_slots = slots_per_day(cfg.slot_minutes)
    if day is None:
        day = heartbeats[0].day if heartbeats else 1
    accepted = []
    rejected = 0
    for hb in heartbeats:
        if hb.day != day:
            raise ValueError(f"heartbeat for day {hb.day} in day-{day} stream")
        if not 1 <= hb.client <= num_clients:
            rejected += 1
            continue
        accepted.append(hb)

    cells = np.zeros((num_slots, num_clients), dtype=np.uint8)
    if accepted:
        slots = np.array(
            [slot_of_timestamp(hb.t_min, cfg.slot_minutes) - 1 for hb in accepted],
            dtype=np.int64,
        )
        order = np.argsort(slots, kind="stable")
        clients = np.array([hb.client - 1 for hb in accepted], dtype=np.int64)
        statuses = np.array([hb.status for hb in accepted], dtype=np.uint8)
        _kernels.apply_heartbeats(
            cells, slots[order], clients[order], statuses[order],
            cfg.windows_array(num_clients),
        )
    return IngestResult(matrix=AvailabilityMatrix(day=day, cells=cells), rejected=rejected)


def drop_heartbeats(stream: list[Heartbeat], loss_fraction: float,
                    rng: np.random.Generator) -> list[Heartbeat]:
    """Remove each heartbeat independently with probability ``loss_fraction``."""
    if not 0.0 <= loss_fraction < 1.0:
        raise ValueError("loss_fraction must be in [0, 1)")
    if loss_fraction == 0.0 or not stream:
        return list(stream)
    keep = rng.random(len(stream)) >= loss_fraction
    return [hb for hb, k in zip(stream, keep) if k]


def emit_heartbeats_from_trace(truth: AvailabilityMatrix, cadence: int,
                               slot_minutes: int) -> list[Heartbeat]:
    """Heartbeats a well-behaved client fleet would send for ``truth``.

    One beat per client every ``cadence`` slots, plus one at every status
    change, each carrying the truth cell of its slot. With cadence <= W and
    no loss, ingestion reproduces the truth exactly.
    """
    if cadence < 1:
        raise ValueError("cadence must be >= 1")
    num_slots, num_clients = truth.cells.shape
    beats = []
    for s in range(1, num_slots + 1):
        periodic = (s - 1) % cadence == 0
        for c in range(1, num_clients + 1):
            status = int(truth.cells[s - 1, c - 1])
            changed = s > 1 and status != int(truth.cells[s - 2, c - 1])
            if periodic or changed:
                beats.append(Heartbeat(day=truth.day, client=c,
                                       t_min=s * slot_minutes, status=status))
    return beats


def write_heartbeats(beats: list[Heartbeat], path: str | Path):
    """JSON-lines stream: one ``{day, client, t_min, status}`` object per beat."""
    with Path(path).open("w") as fh:
        for hb in beats:
            fh.write(json.dumps({"day": hb.day, "client": hb.client,
                                 "t_min": hb.t_min, "status": hb.status}) + "\n")


def read_heartbeats(path: str | Path) -> list[Heartbeat]:
    beats = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            beats.append(Heartbeat(day=obj["day"], client=obj["client"],
                                   t_min=obj["t_min"], status=obj["status"]))
    return beats
