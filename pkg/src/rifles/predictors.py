"""Next-day availability predictors and per-client response-time tracking.

Every predictor implements the same fit-then-predict contract and returns a
binary matrix shaped like its history, which is what the eligibility stage
consumes. The persistence baseline keeps the primary stack self-contained;
the neural forecaster plugs in through the external-file predictor.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from rifles.core import AvailabilityMatrix, read_matrix_csv

TIE_EPS = 1e-9


class ResponseTracker:
    """Append-only per-client response-duration history.

    The expected duration is the running mean of recorded durations, or the
    configured initial estimate while a client has no history. An optional
    sliding window (off by default) restricts the mean to the most recent
    entries.
    """

    def __init__(self, num_clients: int, initial_minutes: float = 10.0,
                 window: int | None = None):
        if num_clients < 1:
            raise ValueError("num_clients must be >= 1")
        if initial_minutes <= 0:
            raise ValueError("initial_minutes must be > 0")
        if window is not None and window < 1:
            raise ValueError("window must be >= 1 when set")
        self.num_clients = num_clients
        self.initial_minutes = float(initial_minutes)
        self.window = window
        self._history: list[list[float]] = [[] for _ in range(num_clients)]

    def _check_client(self, client: int):
        if not 1 <= client <= self.num_clients:
            raise ValueError(f"client {client} out of range [1, {self.num_clients}]")

    def record(self, client: int, minutes: float):
        self._check_client(client)
        if minutes <= 0:
            raise ValueError(f"response duration must be > 0, got {minutes}")
        self._history[client - 1].append(float(minutes))

    def expected(self, client: int) -> float:
        self._check_client(client)
        history = self._history[client - 1]
        if self.window is not None:
            history = history[-self.window:]
        if not history:
            return self.initial_minutes
        return sum(history) / len(history)

    def rounds_recorded(self, client: int) -> int:
        self._check_client(client)
        return len(self._history[client - 1])


class Predictor(ABC):
    """Fit on past daily matrices, then predict the next day's matrix."""

    @abstractmethod
    def fit(self, history: list[AvailabilityMatrix]):
        ...

    @abstractmethod
    def predict_next_day(self) -> AvailabilityMatrix:
        ...


def persistence_predict(history: list[AvailabilityMatrix],
                        decay: float = 0.7) -> AvailabilityMatrix:
    """Decay-weighted per-cell vote over the history (most recent day weight 1).

    A cell is predicted available when its weighted availability frequency
    exceeds 0.5; exact ties resolve to the most recent day's value.
    """
    if not history:
        raise ValueError("history must contain at least one day")
    if not 0 < decay <= 1:
        raise ValueError("decay must be in (0, 1]")
    shape = history[0].cells.shape
    for m in history:
        if m.cells.shape != shape:
            raise ValueError("all history days must share one (S, N) shape")
    stack = np.stack([m.cells for m in history]).astype(np.float64)
    weights = decay ** np.arange(len(history) - 1, -1, -1, dtype=np.float64)
    freq = np.tensordot(weights, stack, axes=1) / weights.sum()
    cells = np.where(
        np.abs(freq - 0.5) <= TIE_EPS,
        history[-1].cells,
        (freq > 0.5).astype(np.uint8),
    ).astype(np.uint8)
    return AvailabilityMatrix(day=history[-1].day + 1, cells=cells)


class PersistencePredictor(Predictor):
    def __init__(self, decay: float = 0.7):
        self.decay = decay
        self._history: list[AvailabilityMatrix] = []

    def fit(self, history: list[AvailabilityMatrix]):
        if not history:
            raise ValueError("history must contain at least one day")
        self._history = list(history)

    def predict_next_day(self) -> AvailabilityMatrix:
        return persistence_predict(self._history, self.decay)


class OraclePredictor(Predictor):
    """Upper-bound predictor: returns the ground-truth next day."""

    def __init__(self, truth_days: list[AvailabilityMatrix]):
        self._by_day = {m.day: m for m in truth_days}
        self._next_day: int | None = None

    def fit(self, history: list[AvailabilityMatrix]):
        if not history:
            raise ValueError("history must contain at least one day")
        self._next_day = history[-1].day + 1

    def predict_next_day(self) -> AvailabilityMatrix:
        if self._next_day is None:
            raise RuntimeError("fit() must be called before predict_next_day()")
        if self._next_day not in self._by_day:
            raise ValueError(f"no ground truth for day {self._next_day}")
        truth = self._by_day[self._next_day]
        return AvailabilityMatrix(day=truth.day, cells=truth.cells)


class ExternalPredictor(Predictor):
    """Loads predicted matrices produced by any external tool.

    Expects ``pa_day_<d>.csv`` files in the shared matrix CSV format.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._next_day: int | None = None
        self._shape: tuple[int, int] | None = None

    def fit(self, history: list[AvailabilityMatrix]):
        if not history:
            raise ValueError("history must contain at least one day")
        self._next_day = history[-1].day + 1
        self._shape = history[0].cells.shape

    def predict_next_day(self) -> AvailabilityMatrix:
        if self._next_day is None:
            raise RuntimeError("fit() must be called before predict_next_day()")
        path = self.directory / f"pa_day_{self._next_day}.csv"
        if not path.exists():
            raise FileNotFoundError(f"external prediction file missing: {path}")
        matrix = read_matrix_csv(path, day=self._next_day)
        if self._shape is not None and matrix.cells.shape != self._shape:
            raise ValueError(
                f"{path}: shape {matrix.cells.shape} does not match history {self._shape}"
            )
        return matrix


def pa_filename(day: int) -> str:
    return f"pa_day_{day}.csv"
