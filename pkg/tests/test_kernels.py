"""Both kernel backends must agree with each other and with the per-cell scan."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rifles import _kernels
from rifles._kernels import pure
from rifles.core import AvailabilityMatrix, consecutive_run_length

compiled = pytest.importorskip("rifles._kernels._corekern") \
    if _kernels.KERNEL_BACKEND == "compiled" else None


def _random_cells(rng, s, n, p):
    return (rng.random((s, n)) < p).astype(np.uint8)


def test_run_lengths_matches_scan_reference(rng):
    cells = _random_cells(rng, 40, 7, 0.6)
    matrix = AvailabilityMatrix(day=1, cells=cells)
    runs = pure.run_lengths(cells)
    for client in range(1, 8):
        for start in range(1, 41):
            assert runs[start - 1, client - 1] == consecutive_run_length(matrix, client, start)


@pytest.mark.skipif(_kernels.KERNEL_BACKEND != "compiled",
                    reason="compiled kernels unavailable")
def test_backends_identical(rng):
    for p in (0.0, 0.3, 0.7, 1.0):
        cells = _random_cells(rng, 720, 50, p)
        assert np.array_equal(compiled.run_lengths(cells), pure.run_lengths(cells))


@pytest.mark.skipif(_kernels.KERNEL_BACKEND != "compiled",
                    reason="compiled kernels unavailable")
def test_heartbeat_fold_backends_identical(rng):
    num_slots, num_clients, beats = 144, 12, 400
    slots = rng.integers(0, num_slots, beats)
    clients = rng.integers(0, num_clients, beats)
    statuses = rng.integers(0, 2, beats).astype(np.uint8)
    windows = rng.integers(1, 8, num_clients)
    order = np.argsort(slots, kind="stable")
    a = np.zeros((num_slots, num_clients), dtype=np.uint8)
    b = np.zeros((num_slots, num_clients), dtype=np.uint8)
    compiled.apply_heartbeats(a, slots[order], clients[order], statuses[order], windows)
    pure.apply_heartbeats(b, slots[order], clients[order], statuses[order], windows)
    assert np.array_equal(a, b)


def test_run_lengths_truncates_at_day_end():
    cells = np.ones((10, 2), dtype=np.uint8)
    runs = _kernels.run_lengths(cells)
    assert runs[0, 0] == 10 and runs[9, 1] == 1


@pytest.mark.skipif(_kernels.KERNEL_BACKEND != "compiled",
                    reason="compiled kernels unavailable")
@given(
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=1, max_value=9),
    st.integers(min_value=0, max_value=2 ** 31 - 1),
)
@settings(max_examples=60, deadline=None)
def test_backends_identical_any_shape(num_slots, num_clients, seed):
    cells = (np.random.default_rng(seed).random((num_slots, num_clients))
             < 0.5).astype(np.uint8)
    assert np.array_equal(compiled.run_lengths(cells), pure.run_lengths(cells))
