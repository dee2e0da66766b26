# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled row-wise kernels for the Euclidean projection onto the positive
sphere {w >= 0 : sum w = z}.

Two entry points, mirrored by the pure-numpy fallback in
``tailsimplex._kernels.python_backend``:

* ``lambda_from_sorted``  -- threshold/support-size scan over pre-sorted rows
  (the sort-based algorithm).
* ``project_rows_median`` -- randomized pivot-partition algorithm with
  expected O(d) work per row.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()


cdef inline unsigned long long _splitmix64(unsigned long long *state) noexcept nogil:
    cdef unsigned long long x
    state[0] = state[0] + <unsigned long long> 0x9E3779B97F4A7C15ULL
    x = state[0]
    x = (x ^ (x >> 30)) * <unsigned long long> 0xBF58476D1CE4E5B9ULL
    x = (x ^ (x >> 27)) * <unsigned long long> 0x94D049BB133111EBULL
    return x ^ (x >> 31)


def lambda_from_sorted(double[:, ::1] mu_asc, double z):
    """Per-row threshold and positive-coordinate count from ascending-sorted rows.

    For each row with descending order statistics mu_1 >= ... >= mu_d, finds
    rho = max{ j : mu_j - (sum_{r<=j} mu_r - z)/j > 0 } and the matching
    threshold lambda = (sum_{r<=rho} mu_r - z)/rho.

    Returns (lam, rho) as float64/int64 arrays of length n.
    """
    cdef Py_ssize_t n = mu_asc.shape[0]
    cdef Py_ssize_t d = mu_asc.shape[1]
    lam_arr = np.empty(n, dtype=np.float64)
    rho_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] lam = lam_arr
    cdef long long[::1] rho = rho_arr
    cdef Py_ssize_t i, j, r
    cdef double css, best_lam
    cdef long long best_rho

    with nogil:
        for i in range(n):
            css = 0.0
            best_rho = 1
            best_lam = mu_asc[i, d - 1] - z
            for j in range(d - 1, -1, -1):
                css += mu_asc[i, j]
                r = d - j
                if mu_asc[i, j] * r > css - z:
                    best_rho = r
                    best_lam = (css - z) / r
            lam[i] = best_lam
            rho[i] = best_rho
    return lam_arr, rho_arr


def project_rows_median(double[:, ::1] V, double z, unsigned long long[::1] seeds):
    """Project each row of V onto {w >= 0 : sum w = z} by pivot partitioning.

    Maintains the state (s, rho, U) of the randomized algorithm: U holds the
    still-undecided coordinates, s and rho the sum and count of coordinates
    already known to lie above the final threshold.  Pivots are drawn
    uniformly from U via a per-row splitmix64 stream seeded by ``seeds``.

    Returns (W, lam, rho) where W[i] = max(V[i] - lam[i], 0).
    """
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t d = V.shape[1]
    W_arr = np.empty((n, d), dtype=np.float64)
    lam_arr = np.empty(n, dtype=np.float64)
    rho_arr = np.empty(n, dtype=np.int64)
    cdef double[:, ::1] W = W_arr
    cdef double[::1] lam = lam_arr
    cdef long long[::1] rho = rho_arr

    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc(d * sizeof(Py_ssize_t))
    if idx == NULL:
        raise MemoryError()

    cdef Py_ssize_t i, t, g, start, m, q
    cdef long long racc, dr
    cdef double s, ds, pivot, eta, w
    cdef unsigned long long state
    cdef Py_ssize_t tmp

    try:
        with nogil:
            for i in range(n):
                for t in range(d):
                    idx[t] = t
                start = 0
                m = d
                s = 0.0
                racc = 0
                state = seeds[i]
                while m > 0:
                    pivot = V[i, idx[start + <Py_ssize_t> (_splitmix64(&state) % <unsigned long long> m)]]
                    # partition window [start, start+m): >= pivot to the front
                    g = 0
                    ds = 0.0
                    for t in range(m):
                        w = V[i, idx[start + t]]
                        if w >= pivot:
                            tmp = idx[start + t]
                            idx[start + t] = idx[start + g]
                            idx[start + g] = tmp
                            g += 1
                            ds += w
                    dr = <long long> g
                    if (s + ds) - (racc + dr) * pivot < z:
                        s += ds
                        racc += dr
                        start += g
                        m -= g
                    else:
                        # drop a single pivot-valued element, keep the rest of G
                        q = 0
                        while V[i, idx[start + q]] != pivot:
                            q += 1
                        tmp = idx[start + q]
                        idx[start + q] = idx[start + g - 1]
                        idx[start + g - 1] = tmp
                        m = g - 1
                eta = (s - z) / racc
                lam[i] = eta
                rho[i] = racc
                for t in range(d):
                    w = V[i, t] - eta
                    W[i, t] = w if w > 0.0 else 0.0
    finally:
        free(idx)
    return W_arr, lam_arr, rho_arr
