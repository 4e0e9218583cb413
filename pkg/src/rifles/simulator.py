"""Replay schedules against ground-truth traces and collect round metrics.

A selected client completes its round iff the truth trace shows it available
for every slot of its own execution window (download + compute + upload,
ceiling-converted to slots); otherwise it drops at the first unavailable
slot. Completed work counts toward used time, aborted work toward lost time.
Rounds are synchronous: a completer that finishes after the round's
aggregation wait is still a completion but not a success.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from rifles.core import AvailabilityMatrix, substream_rng
from rifles.eligibility import build_eligibility
from rifles.heartbeats import (
    IngestConfig,
    build_daily_matrix,
    drop_heartbeats,
    emit_heartbeats_from_trace,
)
from rifles.policies import LruCache, Schedule, ScheduledRound, gh_schedule, lru_schedule
from rifles.predictors import (
    ExternalPredictor,
    OraclePredictor,
    PersistencePredictor,
    Predictor,
    ResponseTracker,
)
from rifles.tracegen import HardwareProfile, TraceConfig, assign_profiles, generate_week

_STREAM_HEARTBEAT_LOSS = 201
_STREAM_BASELINE = 202

POLICIES = ("gh", "lru", "random", "capability")


@dataclass
class RoundOutcome:
    day: int
    slot: int
    selected: tuple[int, ...]
    completed: frozenset[int]
    dropped: frozenset[int]
    successful: frozenset[int]
    agg_minutes: float
    round_duration_minutes: float
    used_minutes: float
    lost_minutes: float
    elapsed_minutes: dict[int, float]

    @property
    def completion_rate(self) -> float | None:
        return len(self.completed) / len(self.selected) if self.selected else None

    @property
    def dropout_rate(self) -> float | None:
        return len(self.dropped) / len(self.selected) if self.selected else None

    @property
    def successful_rate(self) -> float | None:
        return len(self.successful) / len(self.selected) if self.selected else None


def response_slots(profile: HardwareProfile, slot_minutes: int) -> int:
    """Slots a client's full response (download + compute + upload) occupies."""
    return max(1, math.ceil(profile.total_minutes / slot_minutes))


def execute_round(day: int, slot: int, participants, truth_runs: np.ndarray,
                  profiles: list[HardwareProfile], slot_minutes: int,
                  agg_minutes: float) -> RoundOutcome:
    """Run one round at ``slot`` against precomputed truth run lengths."""
    completed, dropped, successful = set(), set(), set()
    elapsed: dict[int, float] = {}
    used = lost = 0.0
    max_completer = 0.0
    for client in participants:
        profile = profiles[client - 1]
        needed = response_slots(profile, slot_minutes)
        run = int(truth_runs[slot - 1, client - 1])
        if run >= needed:
            completed.add(client)
            elapsed[client] = profile.total_minutes
            used += profile.total_minutes
            max_completer = max(max_completer, profile.total_minutes)
            if profile.total_minutes <= agg_minutes + 1e-9:
                successful.add(client)
        else:
            dropped.add(client)
            elapsed[client] = min(run, needed) * slot_minutes
            lost += elapsed[client]
    duration = min(agg_minutes, max_completer) if completed else 0.0
    return RoundOutcome(
        day=day, slot=slot, selected=tuple(participants),
        completed=frozenset(completed), dropped=frozenset(dropped),
        successful=frozenset(successful), agg_minutes=agg_minutes,
        round_duration_minutes=duration, used_minutes=used, lost_minutes=lost,
        elapsed_minutes=elapsed,
    )


def unique_participation(participant_sets: list, lookback: int = 3) -> list[int]:
    """Per round, how many participants were absent from the previous
    ``lookback`` rounds."""
    if lookback < 1:
        raise ValueError("lookback must be >= 1")
    counts = []
    for idx, participants in enumerate(participant_sets):
        window: set[int] = set()
        for prev in participant_sets[max(0, idx - lookback):idx]:
            window.update(prev)
        counts.append(sum(1 for c in participants if c not in window))
    return counts


def evenly_spaced_slots(num_slots: int, rounds: int) -> list[int]:
    """Fixed baseline round placement: ``rounds`` slots at uniform spacing."""
    if rounds < 1 or rounds > num_slots:
        raise ValueError("rounds must be in [1, num_slots]")
    spacing = num_slots // rounds
    return [1 + j * spacing for j in range(rounds)]


@dataclass
class SimulationOptions:
    """Knobs of the replay loop beyond trace/ingest/schedule configs."""

    predictor: str = "persistence"  # persistence | oracle | external:<dir>
    persistence_decay: float = 0.7
    history_window: int = 7
    use_heartbeats: bool = True
    heartbeat_cadence_slots: int = 5
    buffer_slots: int = 2
    tracker_initial_minutes: float = 10.0
    tracker_warm_start: bool = True
    response_window: int | None = None
    unique_lookback: int = 3
    selection_rate: float = 0.1
    capability_deadline_minutes: float = 15.0
    capability_pool_factor: int = 2

    def __post_init__(self):
        if self.history_window < 1:
            raise ValueError("history_window must be >= 1")
        if self.heartbeat_cadence_slots < 1:
            raise ValueError("heartbeat_cadence_slots must be >= 1")
        if not 0 < self.selection_rate <= 1:
            raise ValueError("selection_rate must be in (0, 1]")
        if self.capability_pool_factor < 1:
            raise ValueError("capability_pool_factor must be >= 1")


@dataclass
class ScenarioResult:
    policy: str
    seed: int
    outcomes: list[RoundOutcome]
    schedules: list[Schedule]
    unique_counts: list[int]
    participation: np.ndarray  # per-client selection counts
    observed_heartbeat_loss: float

    @property
    def num_rounds(self) -> int:
        return len(self.outcomes)

    def _mean_rate(self, attr: str) -> float:
        rates = [getattr(o, attr) for o in self.outcomes if o.selected]
        return float(np.mean(rates)) if rates else float("nan")

    @property
    def mean_completion_rate(self) -> float:
        return self._mean_rate("completion_rate")

    @property
    def mean_dropout_rate(self) -> float:
        return self._mean_rate("dropout_rate")

    @property
    def mean_successful_rate(self) -> float:
        return self._mean_rate("successful_rate")

    @property
    def total_used_minutes(self) -> float:
        return sum(o.used_minutes for o in self.outcomes)

    @property
    def total_lost_minutes(self) -> float:
        return sum(o.lost_minutes for o in self.outcomes)

    def summary(self) -> dict:
        rounds = self.num_rounds
        return {
            "policy": self.policy,
            "seed": self.seed,
            "num_rounds": rounds,
            "mean_completion_rate": self.mean_completion_rate,
            "mean_dropout_rate": self.mean_dropout_rate,
            "mean_successful_rate": self.mean_successful_rate,
            "mean_selected_per_round": float(np.mean([len(o.selected) for o in self.outcomes]))
            if rounds else 0.0,
            "mean_unique_count": float(np.mean(self.unique_counts)) if rounds else 0.0,
            "total_used_minutes": self.total_used_minutes,
            "total_lost_minutes": self.total_lost_minutes,
            "observed_heartbeat_loss": self.observed_heartbeat_loss,
            "participation_rate": [
                round(float(c) / rounds, 6) if rounds else 0.0 for c in self.participation
            ],
        }


def make_predictor(options: SimulationOptions,
                   truth: list[AvailabilityMatrix]) -> Predictor:
    name = options.predictor
    if name == "persistence":
        return PersistencePredictor(decay=options.persistence_decay)
    if name == "oracle":
        return OraclePredictor(truth)
    if name.startswith("external:"):
        return ExternalPredictor(name.split(":", 1)[1])
    raise ValueError(f"unknown predictor {name!r}; "
                     "expected persistence, oracle, or external:<dir>")


def observe_days(truth: list[AvailabilityMatrix], ingest: IngestConfig,
                 cadence: int, seed: int) -> tuple[list[AvailabilityMatrix], float]:
    """Simulate the heartbeat layer for every day; returns observed matrices
    and the realized loss fraction."""
    rng = substream_rng(seed, _STREAM_HEARTBEAT_LOSS)
    observed = []
    sent = received = 0
    for day_matrix in truth:
        beats = emit_heartbeats_from_trace(day_matrix, cadence, ingest.slot_minutes)
        kept = drop_heartbeats(beats, ingest.loss_fraction, rng)
        sent += len(beats)
        received += len(kept)
        observed.append(
            build_daily_matrix(kept, ingest, day_matrix.num_clients,
                               day=day_matrix.day).matrix
        )
    loss = 1.0 - received / sent if sent else 0.0
    return observed, loss


def _baseline_rounds(policy: str, day: int, num_slots: int, num_clients: int,
                     rounds_per_day: int, options: SimulationOptions,
                     profiles: list[HardwareProfile], tracker: ResponseTracker,
                     rng: np.random.Generator) -> list[ScheduledRound]:
    target = math.ceil(options.selection_rate * num_clients)
    rounds = []
    for slot in evenly_spaced_slots(num_slots, rounds_per_day):
        if policy == "random":
            picks = rng.choice(num_clients, size=target, replace=False) + 1
            members = tuple(int(i) for i in picks)
        else:  # capability filter against a fixed response-time deadline
            pool_size = min(num_clients, options.capability_pool_factor * target)
            pool = rng.choice(num_clients, size=pool_size, replace=False) + 1
            capable = [int(i) for i in pool
                       if profiles[i - 1].total_minutes <= options.capability_deadline_minutes]
            members = tuple(capable[:target])
        if not members:
            rounds.append(ScheduledRound(slot=slot, participants=(),
                                         agg_minutes=0.0, short=True))
            continue
        agg = max(tracker.expected(i) for i in members)
        rounds.append(ScheduledRound(slot=slot, participants=members,
                                     agg_minutes=agg, short=len(members) < target))
    return rounds


def run_scenario(trace_cfg: TraceConfig, ingest_cfg: IngestConfig,
                 schedule_cfg, options: SimulationOptions,
                 policy: str, seed: int,
                 truth: list[AvailabilityMatrix] | None = None,
                 profiles: list[HardwareProfile] | None = None) -> ScenarioResult:
    """Full replay of one (policy, seed) arm.

    Day 1 is warm-up history; every later day is predicted from the days
    before it, scheduled, and executed against the ground truth. Completed
    rounds feed response times back into the tracker.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if trace_cfg.num_days < 2:
        raise ValueError("scenarios need at least two days (one history, one scheduled)")
    if ingest_cfg.slot_minutes != trace_cfg.slot_minutes:
        raise ValueError("trace and ingest configs disagree on slot_minutes")

    trace_cfg = replace(trace_cfg, rng_seed=seed)
    if truth is None:
        truth = generate_week(trace_cfg)
    if profiles is None:
        profiles = assign_profiles(trace_cfg)

    num_clients = trace_cfg.num_clients
    num_slots = trace_cfg.num_slots
    tracker = ResponseTracker(num_clients, options.tracker_initial_minutes,
                              window=options.response_window)
    if options.tracker_warm_start:
        for client in range(1, num_clients + 1):
            tracker.record(client, profiles[client - 1].total_minutes)

    observed_loss = 0.0
    if policy in ("gh", "lru"):
        if options.use_heartbeats:
            observed, observed_loss = observe_days(truth, ingest_cfg,
                                                   options.heartbeat_cadence_slots, seed)
        else:
            observed = truth
        predictor = make_predictor(options, truth)
    baseline_rng = substream_rng(seed, _STREAM_BASELINE)

    cache = LruCache(num_clients) if policy == "lru" else None
    truth_by_day = {m.day: m for m in truth}
    outcomes: list[RoundOutcome] = []
    schedules: list[Schedule] = []
    participation = np.zeros(num_clients, dtype=np.int64)

    for day in range(2, trace_cfg.num_days + 1):
        if policy in ("gh", "lru"):
            history = observed[max(0, day - 1 - options.history_window):day - 1]
            predictor.fit(history)
            pa = predictor.predict_next_day()
            matrix = build_eligibility(pa, tracker, trace_cfg.slot_minutes,
                                       options.buffer_slots)
            if policy == "gh":
                schedule = gh_schedule(matrix, schedule_cfg, tracker)
            else:
                schedule = lru_schedule(matrix, schedule_cfg, tracker, cache)
        else:
            rounds = _baseline_rounds(policy, day, num_slots, num_clients,
                                      schedule_cfg.rounds_per_day, options,
                                      profiles, tracker, baseline_rng)
            schedule = Schedule(policy=policy, day=day, rounds=rounds,
                                effective_min_clients=schedule_cfg.min_clients,
                                effective_min_gap=schedule_cfg.min_gap)
        schedules.append(schedule)

        truth_runs = truth_by_day[day].run_lengths()
        for rnd in schedule.rounds:
            outcome = execute_round(day, rnd.slot, rnd.participants, truth_runs,
                                    profiles, trace_cfg.slot_minutes, rnd.agg_minutes)
            outcomes.append(outcome)
            for client in rnd.participants:
                participation[client - 1] += 1
            for client in outcome.completed:
                tracker.record(client, profiles[client - 1].total_minutes)

    unique_counts = unique_participation([o.selected for o in outcomes],
                                         options.unique_lookback)
    return ScenarioResult(policy=policy, seed=seed, outcomes=outcomes,
                          schedules=schedules, unique_counts=unique_counts,
                          participation=participation,
                          observed_heartbeat_loss=observed_loss)
