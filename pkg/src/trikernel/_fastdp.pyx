# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled layer update for the lattice-walk count (64-bit counts)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def walk_layers_int64(cnp.int64_t[:, :] steps, cnp.uint8_t[:, :] mask,
                      Py_ssize_t si, Py_ssize_t sj, Py_ssize_t n_max):
    """All layers of the forward count, shape (n_max + 1, M, M).

    The caller guarantees that no count can exceed 2**63 - 1.
    """
    cdef Py_ssize_t M = mask.shape[0]
    cdef Py_ssize_t n, a, b, k, na, nb
    cdef Py_ssize_t ns = steps.shape[0]
    cdef cnp.int64_t v
    out = np.zeros((n_max + 1, M, M), dtype=np.int64)
    cdef cnp.int64_t[:, :, :] L = out
    L[0, si, sj] = 1
    for n in range(1, n_max + 1):
        # the support at step n-1 lies in a box of radius n-1 around the start
        for a in range(max(si - n + 1, 0), min(si + n, M)):
            for b in range(max(sj - n + 1, 0), min(sj + n, M)):
                v = L[n - 1, a, b]
                if v == 0:
                    continue
                for k in range(ns):
                    na = a + steps[k, 0]
                    nb = b + steps[k, 1]
                    if 0 <= na < M and 0 <= nb < M and mask[na, nb]:
                        L[n, na, nb] += v
    return out
