"""Formal schedule decision problem: verification and a tiny exact oracle.

An instance fixes n clients, K unit-length tasks per job (job i is pinned to
client i), a per-slot active-client proportion alpha, a per-job execution
proportion beta, and a deadline of p slots. A candidate schedule is accepted
iff (i) every execution lands in a slot <= p, (ii) no slot has more than
alpha*n active clients, (iii) every job executes at least beta*K distinct
tasks, and (iv) every task runs on its own client. Proportion bounds are
compared with exact rational arithmetic.

Verification is linear in the schedule size plus p + n. The brute-force
solver exhaustively decides tiny instances only; the general problem is
NP-complete and no attempt is made to solve it at scale.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

BRUTE_FORCE_BOUND = 24  # max n * K * p the oracle will enumerate

CONDITIONS = ("i", "ii", "iii", "iv")


class MalformedScheduleError(ValueError):
    """Structurally invalid candidate (distinct from a condition rejection)."""


def as_fraction(value) -> Fraction:
    """Exact proportion from int, Fraction, or a string like '1/3'.

    Floats are converted exactly from their binary value; prefer strings or
    fractions for "thirds"-like proportions.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact proportion")


@dataclass(frozen=True)
class RiflesInstance:
    num_clients: int          # n
    tasks_per_job: int        # K
    selection_proportion: Fraction   # alpha, share of clients active per slot
    execution_proportion: Fraction   # beta, share of each job that must run
    deadline: int             # p, in slots

    def __post_init__(self):
        if self.num_clients < 1 or self.tasks_per_job < 1 or self.deadline < 1:
            raise ValueError("num_clients, tasks_per_job and deadline must be >= 1")
        alpha = as_fraction(self.selection_proportion)
        beta = as_fraction(self.execution_proportion)
        if not 0 < alpha <= 1 or not 0 < beta <= 1:
            raise ValueError("proportions must lie in (0, 1]")
        object.__setattr__(self, "selection_proportion", alpha)
        object.__setattr__(self, "execution_proportion", beta)

    @property
    def active_bound(self) -> Fraction:
        return self.selection_proportion * self.num_clients

    @property
    def min_tasks_per_job(self) -> int:
        required = self.execution_proportion * self.tasks_per_job
        return math.ceil(required)

    def to_json(self) -> dict:
        return {
            "num_clients": self.num_clients,
            "tasks_per_job": self.tasks_per_job,
            "alpha": str(self.selection_proportion),
            "beta": str(self.execution_proportion),
            "deadline": self.deadline,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RiflesInstance":
        return cls(
            num_clients=data["num_clients"],
            tasks_per_job=data["tasks_per_job"],
            selection_proportion=as_fraction(data["alpha"]),
            execution_proportion=as_fraction(data["beta"]),
            deadline=data["deadline"],
        )


@dataclass(frozen=True)
class TaskPlacement:
    slot: int
    client: int  # executing client
    job: int     # owning job
    task: int    # task index within the job


@dataclass(frozen=True)
class CandidateSchedule:
    placements: tuple[TaskPlacement, ...]

    def to_json(self) -> dict:
        return {
            "placements": [
                {"slot": pl.slot, "client": pl.client, "job": pl.job, "task": pl.task}
                for pl in self.placements
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "CandidateSchedule":
        return cls(placements=tuple(
            TaskPlacement(slot=e["slot"], client=e["client"],
                          job=e["job"], task=e["task"])
            for e in data["placements"]
        ))


@dataclass
class Verdict:
    accepted: bool
    condition: str | None = None   # first violated condition, "i".."iv"
    witness: dict | None = None
    checks: dict[str, bool] | None = None

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "condition": self.condition,
            "witness": self.witness,
            "checks": self.checks,
        }


def _validate_structure(instance: RiflesInstance, candidate: CandidateSchedule):
    seen = set()
    busy = set()
    for pl in candidate.placements:
        if pl.slot < 1:
            raise MalformedScheduleError(f"slot {pl.slot} is not a positive slot index")
        if not 1 <= pl.client <= instance.num_clients:
            raise MalformedScheduleError(f"client {pl.client} outside [1, {instance.num_clients}]")
        if not 1 <= pl.job <= instance.num_clients:
            raise MalformedScheduleError(f"job {pl.job} outside [1, {instance.num_clients}]")
        if not 1 <= pl.task <= instance.tasks_per_job:
            raise MalformedScheduleError(f"task {pl.task} outside [1, {instance.tasks_per_job}]")
        if pl in seen:
            raise MalformedScheduleError(f"duplicate placement {pl}")
        seen.add(pl)
        if (pl.slot, pl.client) in busy:
            raise MalformedScheduleError(
                f"client {pl.client} executes two tasks in slot {pl.slot}"
            )
        busy.add((pl.slot, pl.client))


def verify(instance: RiflesInstance, candidate: CandidateSchedule) -> Verdict:
    """Check conditions (i)-(iv); rejection names the first violation."""
    _validate_structure(instance, candidate)

    checks = {}
    witnesses = {}

    late = [pl for pl in candidate.placements if pl.slot > instance.deadline]
    checks["i"] = not late
    if late:
        witnesses["i"] = {"slot": late[0].slot, "deadline": instance.deadline}

    active_per_slot: dict[int, set[int]] = {}
    for pl in candidate.placements:
        active_per_slot.setdefault(pl.slot, set()).add(pl.client)
    bound = instance.active_bound
    checks["ii"] = True
    for slot in sorted(active_per_slot):
        active = len(active_per_slot[slot])
        if Fraction(active) > bound:
            checks["ii"] = False
            witnesses["ii"] = {"slot": slot, "active": active, "bound": str(bound)}
            break

    executed: dict[int, set[int]] = {job: set() for job in range(1, instance.num_clients + 1)}
    for pl in candidate.placements:
        executed[pl.job].add(pl.task)
    required = instance.execution_proportion * instance.tasks_per_job
    checks["iii"] = True
    for job in range(1, instance.num_clients + 1):
        if Fraction(len(executed[job])) < required:
            checks["iii"] = False
            witnesses["iii"] = {"job": job, "executed": len(executed[job]),
                                "required": str(required)}
            break

    wrong = [pl for pl in candidate.placements if pl.client != pl.job]
    checks["iv"] = not wrong
    if wrong:
        witnesses["iv"] = {"slot": wrong[0].slot, "client": wrong[0].client,
                           "job": wrong[0].job, "task": wrong[0].task}

    for cond in CONDITIONS:
        if not checks[cond]:
            return Verdict(accepted=False, condition=cond,
                           witness=witnesses[cond], checks=checks)
    return Verdict(accepted=True, checks=checks)


def brute_force_schedule(instance: RiflesInstance) -> CandidateSchedule | None:
    """Exhaustively decide feasibility of a tiny instance.

    Enumerates, per client, the slot subsets where it runs exactly the
    minimum required number of tasks; running extra tasks only consumes slot
    capacity and never turns an infeasible instance feasible, so exact-size
    subsets decide the problem. Returns an accepting schedule or None.
    """
    n, k, p = instance.num_clients, instance.tasks_per_job, instance.deadline
    if n * k * p > BRUTE_FORCE_BOUND:
        raise ValueError(
            f"instance size n*K*p = {n * k * p} exceeds enumeration bound {BRUTE_FORCE_BOUND}"
        )
    need = instance.min_tasks_per_job
    if need > p:
        return None  # a client cannot run that many unit tasks before the deadline
    cap_fraction = instance.active_bound
    capacity = int(cap_fraction)  # floor: per-slot active clients must stay <= alpha*n
    if capacity < 1:
        return None

    slot_sets = list(itertools.combinations(range(1, p + 1), need))
    load = [0] * (p + 1)
    chosen: list[tuple[int, ...]] = []

    def place(client: int) -> bool:
        if client > n:
            return True
        for subset in slot_sets:
            if all(load[s] < capacity for s in subset):
                for s in subset:
                    load[s] += 1
                chosen.append(subset)
                if place(client + 1):
                    return True
                chosen.pop()
                for s in subset:
                    load[s] -= 1
        return False

    if not place(1):
        return None
    placements = []
    for client, subset in enumerate(chosen, start=1):
        for task, slot in enumerate(sorted(subset), start=1):
            placements.append(TaskPlacement(slot=slot, client=client,
                                            job=client, task=task))
    return CandidateSchedule(placements=tuple(placements))


def schedule_to_candidate(schedule, instance: RiflesInstance,
                          truth=None) -> CandidateSchedule:
    """Bridge a heuristic day schedule into the formal candidate encoding.

    Each (round slot, participant) pair becomes one unit-task placement on
    the participant's own job, task indices counting that client's rounds in
    slot order. When ``truth`` is given, participants that are unavailable at
    the round's slot never start and are omitted.
    """
    occurrences: dict[int, int] = {}
    placements = []
    for rnd in sorted(schedule.rounds, key=lambda r: r.slot):
        for client in rnd.participants:
            if truth is not None and truth.status(rnd.slot, client) == 0:
                continue
            occurrences[client] = occurrences.get(client, 0) + 1
            if occurrences[client] > instance.tasks_per_job:
                raise MalformedScheduleError(
                    f"client {client} runs {occurrences[client]} rounds but the "
                    f"instance allows {instance.tasks_per_job} tasks per job"
                )
            placements.append(TaskPlacement(slot=rnd.slot, client=client,
                                            job=client, task=occurrences[client]))
    return CandidateSchedule(placements=tuple(placements))


def achieved_execution_proportions(candidate: CandidateSchedule,
                                   instance: RiflesInstance) -> dict[int, Fraction]:
    """Per-job share of tasks actually executed (the realized beta)."""
    executed: dict[int, set[int]] = {job: set() for job in range(1, instance.num_clients + 1)}
    for pl in candidate.placements:
        executed[pl.job].add(pl.task)
    return {job: Fraction(len(tasks), instance.tasks_per_job)
            for job, tasks in executed.items()}


def read_instance(path: str | Path) -> RiflesInstance:
    return RiflesInstance.from_json(json.loads(Path(path).read_text()))


def read_candidate(path: str | Path) -> CandidateSchedule:
    return CandidateSchedule.from_json(json.loads(Path(path).read_text()))


def write_candidate(candidate: CandidateSchedule, path: str | Path):
    Path(path).write_text(json.dumps(candidate.to_json(), indent=2) + "\n")


def write_instance(instance: RiflesInstance, path: str | Path):
    Path(path).write_text(json.dumps(instance.to_json(), indent=2) + "\n")
