"""Synthetic week-long availability traces and per-client hardware profiles.

Availability is hour-block structured: a client's status is constant within
each hour and drawn per hour, with a boosted probability during nighttime.
Later days evolve from the previous day by inverting each hour block with a
fixed probability, and short offline blips are overlaid per day. Hardware
heterogeneity uses a 3-tier compute-time distribution plus lognormal
communication times (the measurement datasets behind the original recipe are
not available, so the parameters are config-exposed instead).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rifles.core import AvailabilityMatrix, slots_per_day, substream_rng

# substream keys so stages draw from independent deterministic streams
_STREAM_REFERENCE = 101
_STREAM_EVOLVE = 102
_STREAM_BLIPS = 103
_STREAM_PROFILES = 104

HOURS_PER_DAY = 24


@dataclass
class TraceConfig:
    num_clients: int = 100
    num_days: int = 7
    slot_minutes: int = 2
    rng_seed: int = 0
    night_start_hour: int = 22
    night_end_hour: int = 6
    night_factor: float = 1.5
    hourly_flip_prob: float = 0.20
    blip_online_seconds: float = 30.0  # sub-slot; only the offline span marks the grid
    blip_offline_minutes: float = 10.0
    mean_blips_per_day: float = 2.0
    base_availability_prob: float = 0.3
    compute_tier_minutes: tuple[float, float, float] = (4.0, 8.0, 16.0)
    compute_tier_probs: tuple[float, float, float] = (0.4, 0.4, 0.2)
    comm_median_minutes: float = 2.0
    comm_sigma: float = 0.5
    comm_clamp_minutes: tuple[float, float] = (0.5, 30.0)

    def __post_init__(self):
        if self.num_clients < 1 or self.num_days < 1:
            raise ValueError("num_clients and num_days must be >= 1")
        if 60 % self.slot_minutes != 0:
            raise ValueError("slot_minutes must divide 60 for hour-block traces")
        slots_per_day(self.slot_minutes)
        if not 0.0 <= self.base_availability_prob <= 1.0:
            raise ValueError("base_availability_prob must be in [0, 1]")
        if not 0.0 <= self.hourly_flip_prob <= 1.0:
            raise ValueError("hourly_flip_prob must be in [0, 1]")
        if self.night_factor < 1.0:
            raise ValueError("night_factor must be >= 1")
        if self.mean_blips_per_day < 0.0:
            raise ValueError("mean_blips_per_day must be >= 0")
        if not math.isclose(sum(self.compute_tier_probs), 1.0, abs_tol=1e-9):
            raise ValueError("compute_tier_probs must sum to 1")

    @property
    def num_slots(self) -> int:
        return slots_per_day(self.slot_minutes)

    @property
    def slots_per_hour(self) -> int:
        return 60 // self.slot_minutes

    def is_night_hour(self, hour: int) -> bool:
        start, end = self.night_start_hour, self.night_end_hour
        if start <= end:
            return start <= hour < end
        return hour >= start or hour < end


@dataclass(frozen=True)
class HardwareProfile:
    """Fixed per-client response-time decomposition, in minutes."""

    compute_minutes: float
    upload_minutes: float
    download_minutes: float

    def __post_init__(self):
        if self.compute_minutes <= 0:
            raise ValueError("compute_minutes must be > 0")
        if self.upload_minutes < 0 or self.download_minutes < 0:
            raise ValueError("communication times must be >= 0")

    @property
    def total_minutes(self) -> float:
        return self.download_minutes + self.compute_minutes + self.upload_minutes


def _hourly_probs(cfg: TraceConfig) -> np.ndarray:
    probs = np.full(HOURS_PER_DAY, cfg.base_availability_prob)
    for hour in range(HOURS_PER_DAY):
        if cfg.is_night_hour(hour):
            # effective probability clamps at 1 rather than rejecting the config
            probs[hour] = min(1.0, cfg.base_availability_prob * cfg.night_factor)
    return probs


def generate_reference_day(cfg: TraceConfig, rng: np.random.Generator | None = None) -> AvailabilityMatrix:
    """Day-1 availability: one status draw per (client, hour block)."""
    rng = rng if rng is not None else substream_rng(cfg.rng_seed, _STREAM_REFERENCE)
    probs = _hourly_probs(cfg)
    hour_status = rng.random((HOURS_PER_DAY, cfg.num_clients)) < probs[:, None]
    cells = np.repeat(hour_status, cfg.slots_per_hour, axis=0).astype(np.uint8)
    return AvailabilityMatrix(day=1, cells=cells)


def evolve_day(prev: AvailabilityMatrix, cfg: TraceConfig,
               rng: np.random.Generator) -> AvailabilityMatrix:
    """Next day's availability: each (client, hour block) is inverted with
    probability ``hourly_flip_prob`` relative to ``prev``, otherwise copied."""
    if prev.num_slots != cfg.num_slots or prev.num_clients != cfg.num_clients:
        raise ValueError("previous day's shape does not match the config")
    flips = rng.random((HOURS_PER_DAY, cfg.num_clients)) < cfg.hourly_flip_prob
    flip_cells = np.repeat(flips, cfg.slots_per_hour, axis=0)
    cells = np.where(flip_cells, 1 - prev.cells, prev.cells).astype(np.uint8)
    return AvailabilityMatrix(day=prev.day + 1, cells=cells)


def inject_blips(matrix: AvailabilityMatrix, cfg: TraceConfig,
                 rng: np.random.Generator) -> AvailabilityMatrix:
    """Overlay short offline blips: per client, a Poisson number of random
    online positions each forcing the following ceil(offline/slot) slots to 0."""
    blip_slots = math.ceil(cfg.blip_offline_minutes / cfg.slot_minutes)
    cells = np.array(matrix.cells, dtype=np.uint8)
    num_slots = cells.shape[0]
    for col in range(cfg.num_clients):
        count = rng.poisson(cfg.mean_blips_per_day)
        if count == 0:
            continue
        online = np.flatnonzero(matrix.cells[:, col])
        if online.size == 0:
            continue
        starts = rng.choice(online, size=count, replace=True)
        for start in starts:
            cells[start:min(start + blip_slots, num_slots), col] = 0
    return AvailabilityMatrix(day=matrix.day, cells=cells)


def assign_profiles(cfg: TraceConfig,
                    rng: np.random.Generator | None = None) -> list[HardwareProfile]:
    """Draw one hardware profile per client (3-tier compute + lognormal comm)."""
    rng = rng if rng is not None else substream_rng(cfg.rng_seed, _STREAM_PROFILES)
    n = cfg.num_clients
    compute = rng.choice(cfg.compute_tier_minutes, size=n, p=cfg.compute_tier_probs)
    lo, hi = cfg.comm_clamp_minutes
    mu = math.log(cfg.comm_median_minutes)
    upload = np.clip(rng.lognormal(mu, cfg.comm_sigma, size=n), lo, hi)
    download = np.clip(rng.lognormal(mu, cfg.comm_sigma, size=n), lo, hi)
    return [
        HardwareProfile(
            compute_minutes=float(compute[i]),
            upload_minutes=float(upload[i]),
            download_minutes=float(download[i]),
        )
        for i in range(n)
    ]


def generate_week(cfg: TraceConfig) -> list[AvailabilityMatrix]:
    """Ground-truth trace for all days of the scenario.

    Days evolve as a chain over the blip-free base pattern; blips are
    transient per-day noise and do not propagate to later days.
    """
    ref_rng = substream_rng(cfg.rng_seed, _STREAM_REFERENCE)
    evolve_rng = substream_rng(cfg.rng_seed, _STREAM_EVOLVE)
    blip_rng = substream_rng(cfg.rng_seed, _STREAM_BLIPS)
    base = generate_reference_day(cfg, ref_rng)
    days = [inject_blips(base, cfg, blip_rng)]
    for _ in range(2, cfg.num_days + 1):
        base = evolve_day(base, cfg, evolve_rng)
        days.append(inject_blips(base, cfg, blip_rng))
    return days


def write_profiles(profiles: list[HardwareProfile], path: str | Path):
    data = {
        str(i + 1): {
            "compute_minutes": p.compute_minutes,
            "upload_minutes": p.upload_minutes,
            "download_minutes": p.download_minutes,
        }
        for i, p in enumerate(profiles)
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_profiles(path: str | Path) -> list[HardwareProfile]:
    data = json.loads(Path(path).read_text())
    profiles = []
    for i in range(1, len(data) + 1):
        entry = data[str(i)]
        profiles.append(HardwareProfile(
            compute_minutes=entry["compute_minutes"],
            upload_minutes=entry["upload_minutes"],
            download_minutes=entry["download_minutes"],
        ))
    return profiles
