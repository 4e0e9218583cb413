"""Pure-numpy implementations of the hot-loop kernels."""

import numpy as np


def run_lengths(cells: np.ndarray) -> np.ndarray:
    """Consecutive-ones run length starting at every cell, truncated at the
    last slot (one reverse pass over the rows)."""
    cells = np.ascontiguousarray(cells, dtype=np.uint8)
    num_slots, num_clients = cells.shape
    out = np.zeros((num_slots, num_clients), dtype=np.int32)
    run = np.zeros(num_clients, dtype=np.int32)
    for s in range(num_slots - 1, -1, -1):
        run = (run + 1) * cells[s]
        out[s] = run
    return out


def apply_heartbeats(
    cells: np.ndarray,
    slots: np.ndarray,
    clients: np.ndarray,
    statuses: np.ndarray,
    windows: np.ndarray,
) -> None:
    """Fold heartbeats into ``cells`` in stream order (in place).

    All index arrays are 0-based; a beat at slot ``s`` with validity window
    ``w`` writes its status to slots ``s .. min(s+w, S-1)`` of its client's
    column, so a later beat overrides earlier ones from its own slot onward.
    """
    num_slots = cells.shape[0]
    for k in range(len(slots)):
        s = int(slots[k])
        c = int(clients[k])
        end = min(s + int(windows[c]) + 1, num_slots)
        cells[s:end, c] = statuses[k]
