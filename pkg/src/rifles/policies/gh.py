"""Greedy-heuristic scheduling: count-ranked slots, unique-client coverage.

Rounds are placed on the slots with the most eligible clients, subject to a
minimum inter-round gap and a participation floor. Participant sets first
take every still-uncovered sporadic ("unique") client eligible at the slot,
then fill to the floor rarest-first. If sporadic clients remain uncovered,
the floor and then the gap are relaxed step by step within a bounded budget
and the whole pass is re-run; the best-coverage pass wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

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


def unique_clients(matrix: EligibilityMatrix, threshold: float) -> set[int]:
    """Clients whose eligible-slot count falls strictly below ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    per_client = matrix.cells.sum(axis=0, dtype=np.int64)
    return {int(i) + 1 for i in np.flatnonzero(per_client < threshold)}


@dataclass
class _Pass:
    rounds: list[tuple[int, tuple[int, ...]]]  # (slot, participants) in acceptance order
    covered: set[int]
    min_clients: int
    min_gap: int
    attempt: int


def _run_pass(matrix: EligibilityMatrix, counts, unique: set[int],
              covered_seed: frozenset, rarity: np.ndarray, cap: int | None,
              rounds_per_day: int, min_gap: int, min_clients: int,
              attempt: int) -> _Pass:
    slots = select_slots(counts, rounds_per_day, min_gap, min_clients)
    covered = set(covered_seed)
    rounds = []
    for slot in slots:
        eligible = matrix.eligible_clients(slot)
        order = sorted(eligible, key=lambda i: (int(rarity[i - 1]), i))  # rarest-first
        members = [i for i in order if i in unique and i not in covered]
        if len(members) < min_clients:
            chosen = set(members)
            fill = [i for i in order if i not in chosen]
            members.extend(fill[: min_clients - len(members)])
        if cap is not None:
            members = members[:cap]
        covered.update(i for i in members if i in unique)
        rounds.append((slot, tuple(members)))
    return _Pass(rounds=rounds, covered=covered, min_clients=min_clients,
                 min_gap=min_gap, attempt=attempt)


def gh_schedule(matrix: EligibilityMatrix, cfg: ScheduleConfig,
                tracker: ResponseTracker) -> Schedule:
    counts = eligible_count_per_slot(matrix)
    threshold = cfg.effective_unique_threshold(matrix.num_slots)
    unique = unique_clients(matrix, threshold)
    rarity = matrix.cells.sum(axis=0, dtype=np.int64)
    # clients eligible nowhere cannot be covered by any schedule; they are
    # reported as uncovered but do not drive relaxation
    coverable = {i for i in unique if rarity[i - 1] > 0}
    cap = cfg.per_round_cap(matrix.num_clients)

    min_clients, min_gap = cfg.min_clients, cfg.min_gap
    best: _Pass | None = None
    best_key = None
    for attempt in range(cfg.max_relaxations + 1):
        run = _run_pass(matrix, counts, unique, frozenset(), rarity, cap,
                        cfg.rounds_per_day, min_gap, min_clients, attempt)
        key = (len(run.covered & coverable), -attempt)
        if best is None or key > best_key:
            best, best_key = run, key
        if coverable <= run.covered:
            break
        if min_clients > 1:
            min_clients -= 1
        elif min_gap > 0:
            min_gap -= 1
        else:
            break  # both thresholds at their floors; nothing left to relax

    rounds = [
        ScheduledRound(slot=slot, participants=members,
                       agg_minutes=aggregation_time(members, tracker))
        for slot, members in sorted(best.rounds)
    ]
    return Schedule(
        policy="gh",
        day=matrix.day,
        rounds=rounds,
        effective_min_clients=best.min_clients,
        effective_min_gap=best.min_gap,
        relaxations_used=best.attempt,
        uncovered_unique=tuple(sorted(unique - best.covered)),
    )
