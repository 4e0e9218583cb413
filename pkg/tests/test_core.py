import numpy as np
import pytest
from hypothesis import given, strategies as st

from rifles.core import (
    AvailabilityMatrix,
    consecutive_run_length,
    matrix_filename,
    read_matrix_csv,
    slot_of_timestamp,
    slots_per_day,
    write_matrix_csv,
)


class TestSlotOfTimestamp:
    def test_two_hour_mark_lands_in_slot_60(self):
        assert slot_of_timestamp(120, 2) == 60

    def test_first_minute_is_slot_one(self):
        assert slot_of_timestamp(1, 2) == 1

    def test_midnight_boundary_is_last_slot(self):
        assert slot_of_timestamp(1440, 2) == 720
        assert slots_per_day(2) == 720

    @pytest.mark.parametrize("t", [0, -5, 1441])
    def test_out_of_range_timestamp_rejected(self, t):
        with pytest.raises(ValueError):
            slot_of_timestamp(t, 2)

    @pytest.mark.parametrize("dt", [0, -2, 7, 11])
    def test_non_divisor_slot_length_rejected(self, dt):
        with pytest.raises(ValueError):
            slot_of_timestamp(100, dt)

    @given(st.integers(min_value=1, max_value=1440))
    def test_monotone_and_in_range(self, t):
        s = slot_of_timestamp(t, 2)
        assert 1 <= s <= 720
        if t > 1:
            assert slot_of_timestamp(t - 1, 2) <= s

    def test_surjective_on_slot_grid(self):
        hits = {slot_of_timestamp(t, 10) for t in range(10, 1441, 10)}
        assert hits == set(range(1, 145))


class TestConsecutiveRunLength:
    def test_counts_until_first_zero(self):
        cells = np.zeros((8, 1), dtype=np.uint8)
        cells[0:3, 0] = 1
        m = AvailabilityMatrix(day=1, cells=cells)
        assert consecutive_run_length(m, 1, 1) == 3

    def test_all_zero_row(self):
        m = AvailabilityMatrix(day=1, cells=np.zeros((10, 2), dtype=np.uint8))
        for start in (1, 5, 10):
            assert consecutive_run_length(m, 1, start) == 0

    def test_all_ones_truncates_at_day_end(self):
        # slots 700..720 of a fully available day: 21 cells, counted by hand
        m = AvailabilityMatrix(day=1, cells=np.ones((720, 1), dtype=np.uint8))
        assert consecutive_run_length(m, 1, 700) == 21

    def test_zero_iff_cell_zero_and_recurrence(self, rng):
        cells = (rng.random((30, 3)) < 0.5).astype(np.uint8)
        m = AvailabilityMatrix(day=1, cells=cells)
        for client in (1, 2, 3):
            for s in range(1, 31):
                run = consecutive_run_length(m, client, s)
                assert (run == 0) == (cells[s - 1, client - 1] == 0)
                if cells[s - 1, client - 1] == 1 and s < 30:
                    assert run == 1 + consecutive_run_length(m, client, s + 1)

    def test_index_validation(self):
        m = AvailabilityMatrix(day=1, cells=np.ones((5, 2), dtype=np.uint8))
        with pytest.raises(ValueError):
            consecutive_run_length(m, 3, 1)
        with pytest.raises(ValueError):
            consecutive_run_length(m, 1, 6)


class TestAvailabilityMatrix:
    def test_rejects_non_binary_cells(self):
        with pytest.raises(ValueError):
            AvailabilityMatrix(day=1, cells=np.full((3, 3), 2))

    def test_rejects_bad_day(self):
        with pytest.raises(ValueError):
            AvailabilityMatrix(day=0, cells=np.zeros((2, 2)))

    def test_cells_are_immutable(self):
        m = AvailabilityMatrix(day=1, cells=np.zeros((3, 3)))
        with pytest.raises(ValueError):
            m.cells[0, 0] = 1

    def test_status_accessor_is_one_indexed(self):
        cells = np.zeros((4, 2), dtype=np.uint8)
        cells[2, 1] = 1
        m = AvailabilityMatrix(day=1, cells=cells)
        assert m.status(3, 2) == 1 and m.status(1, 1) == 0


class TestMatrixCsv:
    def test_round_trip(self, tmp_path, rng):
        cells = (rng.random((48, 5)) < 0.4).astype(np.uint8)
        m = AvailabilityMatrix(day=3, cells=cells)
        path = tmp_path / matrix_filename(3)
        write_matrix_csv(m, path)
        back = read_matrix_csv(path)
        assert back == m
        assert path.read_text().splitlines()[0] == "slot,c1,c2,c3,c4,c5"

    def test_day_inferred_from_filename(self, tmp_path):
        m = AvailabilityMatrix(day=7, cells=np.ones((4, 1), dtype=np.uint8))
        path = tmp_path / "day_7.csv"
        write_matrix_csv(m, path)
        assert read_matrix_csv(path).day == 7

    def test_unparseable_filename_needs_day(self, tmp_path):
        m = AvailabilityMatrix(day=1, cells=np.ones((4, 1), dtype=np.uint8))
        path = tmp_path / "other.csv"
        write_matrix_csv(m, path)
        with pytest.raises(ValueError):
            read_matrix_csv(path)
        assert read_matrix_csv(path, day=2).day == 2
