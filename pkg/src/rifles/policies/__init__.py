"""Round scheduling policies over eligibility matrices."""

from rifles.policies.base import (
    Schedule,
    ScheduleConfig,
    ScheduledRound,
    aggregation_time,
    eligible_count_per_slot,
    read_schedule_json,
    schedule_filename,
    select_slots,
    write_schedule_json,
)
from rifles.policies.gh import gh_schedule, unique_clients
from rifles.policies.lru import LruCache, lru_schedule

__all__ = [
    "LruCache",
    "Schedule",
    "ScheduleConfig",
    "ScheduledRound",
    "aggregation_time",
    "eligible_count_per_slot",
    "gh_schedule",
    "lru_schedule",
    "read_schedule_json",
    "schedule_filename",
    "select_slots",
    "unique_clients",
    "write_schedule_json",
]
