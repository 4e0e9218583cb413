"""Shared scheduling machinery: config, slot selection, schedule records.

Slot selection is common to both policies: rank slots by eligible-client
count (descending, ties by ascending slot index) and greedily accept slots
that keep a minimum gap to every already-accepted slot and carry at least
the participation floor, stopping at the per-day round budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rifles.eligibility import EligibilityMatrix
from rifles.predictors import ResponseTracker


@dataclass
class ScheduleConfig:
    rounds_per_day: int = 24
    min_gap: int = 2
    min_clients: int = 10
    unique_threshold: float | None = None  # default: num_slots / 10
    max_relaxations: int = 5
    selection_rate: float | None = None  # per-round cap of ceil(rate * N) when set

    def __post_init__(self):
        if self.rounds_per_day < 1:
            raise ValueError("rounds_per_day must be >= 1")
        if self.min_gap < 0:
            raise ValueError("min_gap must be >= 0")
        if self.min_clients < 1:
            raise ValueError("min_clients must be >= 1")
        if self.max_relaxations < 0:
            raise ValueError("max_relaxations must be >= 0")
        if self.selection_rate is not None and not 0 < self.selection_rate <= 1:
            raise ValueError("selection_rate must be in (0, 1] when set")

    def effective_unique_threshold(self, num_slots: int) -> float:
        if self.unique_threshold is not None:
            return self.unique_threshold
        return num_slots / 10

    def per_round_cap(self, num_clients: int) -> int | None:
        if self.selection_rate is None:
            return None
        return math.ceil(self.selection_rate * num_clients)


@dataclass(frozen=True)
class ScheduledRound:
    slot: int
    participants: tuple[int, ...]
    agg_minutes: float
    short: bool = False  # fewer eligible participants than the floor


@dataclass
class Schedule:
    policy: str
    day: int
    rounds: list[ScheduledRound]  # chronological
    effective_min_clients: int
    effective_min_gap: int
    relaxations_used: int = 0
    uncovered_unique: tuple[int, ...] = ()
    cache_final: tuple[int, ...] | None = None

    @property
    def selected_slots(self) -> list[int]:
        return [r.slot for r in self.rounds]

    def participants_by_slot(self) -> dict[int, tuple[int, ...]]:
        return {r.slot: r.participants for r in self.rounds}


def eligible_count_per_slot(matrix: EligibilityMatrix) -> np.ndarray:
    """Per-slot count of eligible clients (column sums)."""
    return matrix.cells.sum(axis=1, dtype=np.int64)


def select_slots(counts: np.ndarray, rounds_per_day: int, min_gap: int,
                 min_clients: int) -> list[int]:
    """Greedy slot acceptance in count order; returns slots in acceptance order.

    The gap constraint is enforced against every accepted slot, not only the
    adjacent one.
    """
    ranked = sorted(range(1, len(counts) + 1), key=lambda s: (-int(counts[s - 1]), s))
    accepted: list[int] = []
    for slot in ranked:
        if int(counts[slot - 1]) < min_clients:
            break  # counts only decrease from here
        if all(abs(slot - other) >= min_gap for other in accepted):
            accepted.append(slot)
            if len(accepted) == rounds_per_day:
                break
    return accepted


def aggregation_time(participants, tracker: ResponseTracker) -> float:
    """Round aggregation wait: the slowest participant's expected duration."""
    participants = list(participants)
    if not participants:
        raise ValueError("aggregation time is undefined for an empty round")
    return max(tracker.expected(i) for i in participants)


def schedule_filename(day: int, policy: str | None = None) -> str:
    if policy:
        return f"schedule_{policy}_day_{day}.json"
    return f"schedule_day_{day}.json"


def write_schedule_json(schedule: Schedule, path: str | Path):
    data = {
        "policy": schedule.policy,
        "day": schedule.day,
        "relaxations_used": schedule.relaxations_used,
        "slots": [
            {
                "slot": r.slot,
                "participants": list(r.participants),
                "agg_minutes": r.agg_minutes,
                "effective_Kmin": schedule.effective_min_clients,
                "effective_G": schedule.effective_min_gap,
                "short": r.short,
            }
            for r in schedule.rounds
        ],
        "uncovered_unique": list(schedule.uncovered_unique),
    }
    if schedule.cache_final is not None:
        data["cache_final"] = list(schedule.cache_final)
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def read_schedule_json(path: str | Path) -> Schedule:
    data = json.loads(Path(path).read_text())
    slots = data["slots"]
    eff_kmin = slots[0]["effective_Kmin"] if slots else data.get("effective_Kmin", 0)
    eff_gap = slots[0]["effective_G"] if slots else data.get("effective_G", 0)
    rounds = [
        ScheduledRound(
            slot=entry["slot"],
            participants=tuple(entry["participants"]),
            agg_minutes=entry["agg_minutes"],
            short=entry.get("short", False),
        )
        for entry in slots
    ]
    cache_final = data.get("cache_final")
    return Schedule(
        policy=data.get("policy", ""),
        day=data.get("day", 1),
        rounds=rounds,
        effective_min_clients=eff_kmin,
        effective_min_gap=eff_gap,
        relaxations_used=data.get("relaxations_used", 0),
        uncovered_unique=tuple(data.get("uncovered_unique", ())),
        cache_final=tuple(cache_final) if cache_final is not None else None,
    )
