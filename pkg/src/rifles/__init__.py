"""Availability-driven client scheduling for federated learning.

The package covers the full loop: synthetic availability traces, heartbeat
ingestion into daily availability matrices, next-day availability prediction,
eligibility computation, greedy-heuristic and LRU round scheduling, a formal
schedule verifier with a brute-force oracle, and a round-replay simulator
that produces resource-efficiency metrics.
"""

from rifles._kernels import KERNEL_BACKEND
from rifles.core import AvailabilityMatrix, consecutive_run_length, slot_of_timestamp

__version__ = "0.1.0"

__all__ = [
    "AvailabilityMatrix",
    "KERNEL_BACKEND",
    "consecutive_run_length",
    "slot_of_timestamp",
    "__version__",
]
