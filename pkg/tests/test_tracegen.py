import json

import numpy as np
import pytest

from rifles.core import substream_rng
from rifles.tracegen import (
    HardwareProfile,
    TraceConfig,
    assign_profiles,
    evolve_day,
    generate_reference_day,
    generate_week,
    inject_blips,
    read_profiles,
    write_profiles,
)


def _night_mask(cfg):
    mask = np.zeros(cfg.num_slots, dtype=bool)
    for hour in range(24):
        if cfg.is_night_hour(hour):
            mask[hour * cfg.slots_per_hour:(hour + 1) * cfg.slots_per_hour] = True
    return mask


class TestReferenceDay:
    def test_night_boost_rates(self):
        cfg = TraceConfig(num_clients=100, rng_seed=7)
        day = generate_reference_day(cfg)
        night = _night_mask(cfg)
        night_rate = day.cells[night].mean()
        day_rate = day.cells[~night].mean()
        assert abs(night_rate - 0.45) <= 0.03
        assert abs(day_rate - 0.30) <= 0.03

    def test_zero_base_gives_empty_day(self):
        cfg = TraceConfig(num_clients=20, base_availability_prob=0.0)
        assert generate_reference_day(cfg).cells.sum() == 0

    def test_full_base_clamps_night_factor(self):
        cfg = TraceConfig(num_clients=20, base_availability_prob=1.0)
        assert generate_reference_day(cfg).cells.all()

    def test_status_constant_within_hour_blocks(self):
        cfg = TraceConfig(num_clients=10, rng_seed=3)
        day = generate_reference_day(cfg)
        blocks = day.cells.reshape(24, cfg.slots_per_hour, cfg.num_clients)
        assert (blocks == blocks[:, :1, :]).all()


class TestEvolveDay:
    def test_zero_flip_prob_is_identity(self, rng):
        cfg = TraceConfig(num_clients=10, hourly_flip_prob=0.0)
        prev = generate_reference_day(cfg)
        nxt = evolve_day(prev, cfg, rng)
        assert np.array_equal(nxt.cells, prev.cells)
        assert nxt.day == prev.day + 1

    def test_full_flip_prob_inverts_everything(self, rng):
        cfg = TraceConfig(num_clients=10, hourly_flip_prob=1.0)
        prev = generate_reference_day(cfg)
        nxt = evolve_day(prev, cfg, rng)
        assert np.array_equal(nxt.cells, 1 - prev.cells)

    def test_default_flip_prob_hamming_distance(self):
        cfg = TraceConfig(num_clients=100, hourly_flip_prob=0.2, rng_seed=11)
        prev = generate_reference_day(cfg)
        nxt = evolve_day(prev, cfg, substream_rng(11, 55))
        hamming = np.sum(prev.cells != nxt.cells)
        expected = 0.2 * cfg.num_slots * cfg.num_clients
        assert abs(hamming - expected) <= 0.05 * expected

    def test_changes_only_whole_hour_blocks(self, rng):
        cfg = TraceConfig(num_clients=5, hourly_flip_prob=0.5)
        prev = generate_reference_day(cfg)
        nxt = evolve_day(prev, cfg, rng)
        diff = (prev.cells != nxt.cells).reshape(24, cfg.slots_per_hour, 5)
        # within any hour block a client is either fully copied or fully inverted
        assert ((diff.sum(axis=1) == 0) | (diff.sum(axis=1) == cfg.slots_per_hour)).all()

    def test_shape_mismatch_rejected(self, rng):
        cfg = TraceConfig(num_clients=5)
        other = generate_reference_day(TraceConfig(num_clients=6))
        with pytest.raises(ValueError):
            evolve_day(other, cfg, rng)


class TestInjectBlips:
    def test_zero_mean_is_identity(self, rng):
        cfg = TraceConfig(num_clients=10, mean_blips_per_day=0.0)
        day = generate_reference_day(cfg)
        assert np.array_equal(inject_blips(day, cfg, rng).cells, day.cells)

    def test_blip_span_is_offline_minutes_over_slot(self):
        # single blip on a fully available day knocks out exactly
        # ceil(10 / 2) = 5 consecutive slots
        cfg = TraceConfig(num_clients=1, mean_blips_per_day=1.0)
        from rifles.core import AvailabilityMatrix
        full = AvailabilityMatrix(day=1, cells=np.ones((720, 1), dtype=np.uint8))
        for seed in range(200):
            rng = np.random.default_rng(seed)
            out = inject_blips(full, cfg, rng)
            zeros = np.flatnonzero(out.cells[:, 0] == 0)
            if len(zeros) == 5:
                assert np.array_equal(zeros, np.arange(zeros[0], zeros[0] + 5))
                return
        pytest.fail("no seed produced a single interior blip")

    def test_blips_only_remove_availability(self, rng):
        cfg = TraceConfig(num_clients=10, mean_blips_per_day=3.0)
        day = generate_reference_day(cfg)
        out = inject_blips(day, cfg, rng)
        assert (out.cells <= day.cells).all()


class TestProfiles:
    def test_degenerate_tier_distribution(self):
        cfg = TraceConfig(num_clients=16, compute_tier_probs=(1.0, 0.0, 0.0))
        profiles = assign_profiles(cfg)
        assert all(p.compute_minutes == 4.0 for p in profiles)

    def test_default_median_total_response(self):
        cfg = TraceConfig(num_clients=100, rng_seed=5)
        profiles = assign_profiles(cfg)
        median = float(np.median([p.total_minutes for p in profiles]))
        assert 5.0 <= median <= 15.0

    def test_comm_times_clamped(self):
        cfg = TraceConfig(num_clients=500, comm_sigma=3.0, rng_seed=9)
        for p in assign_profiles(cfg):
            assert 0.5 <= p.upload_minutes <= 30.0
            assert 0.5 <= p.download_minutes <= 30.0

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            HardwareProfile(compute_minutes=0, upload_minutes=1, download_minutes=1)
        with pytest.raises(ValueError):
            HardwareProfile(compute_minutes=1, upload_minutes=-1, download_minutes=1)

    def test_json_round_trip(self, tmp_path):
        cfg = TraceConfig(num_clients=7, rng_seed=2)
        profiles = assign_profiles(cfg)
        path = tmp_path / "profiles.json"
        write_profiles(profiles, path)
        assert read_profiles(path) == profiles
        assert set(json.loads(path.read_text())["1"]) == {
            "compute_minutes", "upload_minutes", "download_minutes"}


class TestDeterminism:
    def test_same_seed_same_week_and_profiles(self):
        cfg = TraceConfig(num_clients=30, num_days=4, rng_seed=77)
        week1, week2 = generate_week(cfg), generate_week(cfg)
        assert all(np.array_equal(a.cells, b.cells) for a, b in zip(week1, week2))
        assert assign_profiles(cfg) == assign_profiles(cfg)
        assert [m.day for m in week1] == [1, 2, 3, 4]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TraceConfig(base_availability_prob=1.5)
        with pytest.raises(ValueError):
            TraceConfig(night_factor=0.5)
        with pytest.raises(ValueError):
            TraceConfig(slot_minutes=7)
        with pytest.raises(ValueError):
            TraceConfig(compute_tier_probs=(0.5, 0.2, 0.2))
