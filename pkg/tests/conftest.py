import numpy as np
import pytest

from rifles.core import AvailabilityMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, num_slots, num_clients, p=0.5, day=1) -> AvailabilityMatrix:
    cells = (rng.random((num_slots, num_clients)) < p).astype(np.uint8)
    return AvailabilityMatrix(day=day, cells=cells)
