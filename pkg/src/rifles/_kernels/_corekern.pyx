# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot-loop kernels.

Semantics must stay bit-identical to rifles._kernels.pure.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def run_lengths(cells):
    """Consecutive-ones run length starting at every cell (per column)."""
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(cells, dtype=np.uint8)
    cdef Py_ssize_t num_slots = m.shape[0]
    cdef Py_ssize_t num_clients = m.shape[1]
    out_arr = np.zeros((num_slots, num_clients), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] out = out_arr
    cdef Py_ssize_t s, i
    cdef cnp.int32_t run
    for i in range(num_clients):
        run = 0
        for s in range(num_slots - 1, -1, -1):
            if m[s, i]:
                run += 1
            else:
                run = 0
            out[s, i] = run
    return out_arr


def apply_heartbeats(cells, slots, clients, statuses, windows):
    """Fold heartbeats into ``cells`` in stream order (in place)."""
    cdef cnp.uint8_t[:, ::1] grid = cells
    cdef const cnp.int64_t[::1] ss = np.ascontiguousarray(slots, dtype=np.int64)
    cdef const cnp.int64_t[::1] cc = np.ascontiguousarray(clients, dtype=np.int64)
    cdef const cnp.uint8_t[::1] bb = np.ascontiguousarray(statuses, dtype=np.uint8)
    cdef const cnp.int64_t[::1] ww = np.ascontiguousarray(windows, dtype=np.int64)
    cdef Py_ssize_t num_slots = grid.shape[0]
    cdef Py_ssize_t k, s, c, end, t
    cdef cnp.uint8_t b
    for k in range(ss.shape[0]):
        s = ss[k]
        c = cc[k]
        b = bb[k]
        end = s + ww[c] + 1
        if end > num_slots:
            end = num_slots
        for t in range(s, end):
            grid[t, c] = b
