# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled iterative proportional fitting kernel.

Mirrors ``_ipf_py.ipf_fit`` exactly; see that module for the contract.
"""

import numpy as np

from libc.math cimport fabs


cdef double _residual(double[::1] q, const long[:, ::1] maps,
                      const double[::1] targets, const long[::1] offsets,
                      double[::1] marg) noexcept nogil:
    cdef Py_ssize_t m = maps.shape[0]
    cdef Py_ssize_t ncell = maps.shape[1]
    cdef Py_ssize_t k, c, j
    cdef double worst = 0.0, dev
    for j in range(offsets[m]):
        marg[j] = 0.0
    for k in range(m):
        for c in range(ncell):
            marg[offsets[k] + maps[k, c]] += q[c]
    for j in range(offsets[m]):
        dev = fabs(marg[j] - targets[j])
        if dev > worst:
            worst = dev
    return worst


def ipf_fit(double[::1] q, const long[:, ::1] maps, const double[::1] targets,
            const long[::1] offsets, double tol, long max_sweeps):
    cdef Py_ssize_t m = maps.shape[0]
    cdef Py_ssize_t ncell = maps.shape[1]
    cdef Py_ssize_t k, c, j, lo, hi
    cdef long sweeps = 0
    cdef double residual
    cdef double[::1] marg = np.zeros(offsets[m], dtype=np.float64)

    with nogil:
        residual = _residual(q, maps, targets, offsets, marg)
        while residual >= tol and sweeps < max_sweeps:
            for k in range(m):
                lo = offsets[k]
                hi = offsets[k + 1]
                for j in range(lo, hi):
                    marg[j] = 0.0
                for c in range(ncell):
                    marg[lo + maps[k, c]] += q[c]
                for j in range(lo, hi):
                    if marg[j] > 0.0:
                        marg[j] = targets[j] / marg[j]
                    else:
                        marg[j] = 0.0
                for c in range(ncell):
                    q[c] *= marg[lo + maps[k, c]]
            sweeps += 1
            residual = _residual(q, maps, targets, offsets, marg)
    return sweeps, residual
