# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-scan kernel; the numpy twin lives in _split_py.py.

Both kernels use the same arithmetic expression order (and the build pins
-ffp-contract=off) so split choices are bit-identical across the two.
"""

from libc.math cimport log2, INFINITY


cdef inline double _imp(int criterion, long long n, long long n1) nogil:
    cdef double p0, p1
    if n1 == 0 or n1 == n:
        return 0.0
    p0 = (<double> (n - n1)) / (<double> n)
    p1 = (<double> n1) / (<double> n)
    if criterion == 0:
        return 2.0 * p0 * p1
    return -(p0 * log2(p0) + p1 * log2(p1))


def scan_split(const double[::1] values, const signed char[::1] labels,
               Py_ssize_t min_leaf, int criterion, double parent_impurity):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, best_pos = -1
    cdef long long n1_total = 0, n1L = 0, nL, nR, n1R
    cdef double nd, delta, hl, hr
    cdef double best = -INFINITY
    if n < 2:
        return -INFINITY, -1
    nd = <double> n
    with nogil:
        for i in range(n):
            n1_total += labels[i]
        for i in range(n - 1):
            n1L += labels[i]
            if values[i] == values[i + 1]:
                continue
            nL = i + 1
            nR = n - nL
            if nL < min_leaf or nR < min_leaf:
                continue
            n1R = n1_total - n1L
            hl = _imp(criterion, nL, n1L)
            hr = _imp(criterion, nR, n1R)
            delta = parent_impurity - ((<double> nL) / nd) * hl - ((<double> nR) / nd) * hr
            if delta > best:
                best = delta
                best_pos = i
    if best_pos < 0:
        return -INFINITY, -1
    return best, best_pos
