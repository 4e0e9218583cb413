"""Least-recently-used participant selection over the shared slot selection.

A deque of client ids tracks recency (front = least recently used). Each
round filters the cache order down to the slot's eligible clients, takes the
first ``min_clients`` of them, and moves the selected clients to the back.
"""

from __future__ import annotations

from collections import deque

from rifles.eligibility import EligibilityMatrix
from rifles.policies.base import (
    Schedule,
    ScheduleConfig,
    ScheduledRound,
    aggregation_time,
    eligible_count_per_slot,
    select_slots,
)
from rifles.predictors import ResponseTracker


class LruCache:
    """Recency order over client ids; least recently used at the front."""

    def __init__(self, num_clients: int):
        if num_clients < 1:
            raise ValueError("num_clients must be >= 1")
        self.num_clients = num_clients
        self._queue = deque(range(1, num_clients + 1), maxlen=num_clients)

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(self._queue)

    def select(self, eligible: set[int], count: int) -> list[int]:
        """Pick up to ``count`` eligible clients in recency order and mark
        them as used (moved to the back in selection order)."""
        if count < 0:
            raise ValueError("count must be >= 0")
        filtered = [i for i in self._queue if i in eligible]
        selected = filtered[:count]
        for client in selected:
            self._queue.remove(client)
            self._queue.append(client)
        self._check()
        return selected

    def _check(self):
        if len(self._queue) != self.num_clients or len(set(self._queue)) != self.num_clients:
            raise AssertionError("LRU cache corrupted: not a permutation of clients")


def lru_schedule(matrix: EligibilityMatrix, cfg: ScheduleConfig,
                 tracker: ResponseTracker, cache: LruCache | None = None) -> Schedule:
    """Slot selection as in the greedy heuristic; participants by recency.

    Participants are committed in chronological slot order so the cache
    state evolves in time order. Rounds with fewer eligible clients than the
    floor still run, flagged as short.
    """
    if cache is None:
        cache = LruCache(matrix.num_clients)
    counts = eligible_count_per_slot(matrix)
    slots = select_slots(counts, cfg.rounds_per_day, cfg.min_gap, cfg.min_clients)
    rounds = []
    for slot in sorted(slots):
        eligible = set(matrix.eligible_clients(slot))
        members = cache.select(eligible, cfg.min_clients)
        if not members:
            continue
        rounds.append(ScheduledRound(
            slot=slot,
            participants=tuple(members),
            agg_minutes=aggregation_time(members, tracker),
            short=len(members) < cfg.min_clients,
        ))
    return Schedule(
        policy="lru",
        day=matrix.day,
        rounds=rounds,
        effective_min_clients=cfg.min_clients,
        effective_min_gap=cfg.min_gap,
        cache_final=cache.order,
    )
