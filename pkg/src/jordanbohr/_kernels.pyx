# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled loops for truncated power series and majorant crossings."""
import numpy as np


def series_mul(double complex[:, ::1] a, double complex[:, ::1] b):
    """Row-wise Cauchy product truncated to the input length."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], i, j, k
    cdef double sr, si, ar, ai, br, bi
    out = np.zeros((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    # real arithmetic avoids the inf/nan-safe complex multiply helper
    with nogil:
        for i in range(m):
            for k in range(n):
                sr = 0.0
                si = 0.0
                for j in range(k + 1):
                    ar = a[i, j].real
                    ai = a[i, j].imag
                    br = b[i, k - j].real
                    bi = b[i, k - j].imag
                    sr = sr + ar * br - ai * bi
                    si = si + ar * bi + ai * br
                o[i, k] = sr + 1j * si
    return out


def series_recip(double complex[:, ::1] d):
    """Row-wise reciprocal series ``1/d``; requires ``d[:, 0] != 0``."""
    cdef Py_ssize_t m = d.shape[0], n = d.shape[1], i, j, k
    cdef double sr, si, ar, ai, br, bi, ir, ii, den
    out = np.zeros((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    with nogil:
        for i in range(m):
            den = d[i, 0].real * d[i, 0].real + d[i, 0].imag * d[i, 0].imag
            ir = d[i, 0].real / den
            ii = -d[i, 0].imag / den
            o[i, 0] = ir + 1j * ii
            for k in range(1, n):
                sr = 0.0
                si = 0.0
                for j in range(1, k + 1):
                    ar = d[i, j].real
                    ai = d[i, j].imag
                    br = o[i, k - j].real
                    bi = o[i, k - j].imag
                    sr = sr + ar * br - ai * bi
                    si = si + ar * bi + ai * br
                o[i, k] = -(ir * sr - ii * si) - 1j * (ir * si + ii * sr)
    return out


cdef inline double _horner(double[:, ::1] mags, Py_ssize_t i, double r) nogil:
    cdef Py_ssize_t k = mags.shape[1] - 1
    cdef double acc = mags[i, k]
    while k > 0:
        k -= 1
        acc = acc * r + mags[i, k]
    return acc


def majorant_crossings(double[:, ::1] mags, double[::1] tail, double[::1] r_grid):
    """First grid index where the partial majorant (resp. partial plus tail) exceeds one.

    ``r_grid`` must be increasing in ``[0, 1)``; the index equals ``len(r_grid)``
    when no crossing occurs. Both sums are nondecreasing in ``r``, so each row is a
    binary search.
    """
    cdef Py_ssize_t m = mags.shape[0], kp1 = mags.shape[1], nr = r_grid.shape[0]
    cdef Py_ssize_t i, lo, hi, mid
    cdef double r, val
    lower = np.empty(m, dtype=np.int64)
    upper = np.empty(m, dtype=np.int64)
    cdef long long[::1] lo_out = lower
    cdef long long[::1] up_out = upper
    with nogil:
        for i in range(m):
            lo = 0
            hi = nr
            while lo < hi:
                mid = (lo + hi) // 2
                if _horner(mags, i, r_grid[mid]) > 1.0:
                    hi = mid
                else:
                    lo = mid + 1
            lo_out[i] = lo
            lo = 0
            hi = nr
            while lo < hi:
                mid = (lo + hi) // 2
                r = r_grid[mid]
                val = _horner(mags, i, r) + tail[i] * r ** kp1 / (1.0 - r)
                if val > 1.0:
                    hi = mid
                else:
                    lo = mid + 1
            up_out[i] = lo
    return lower, upper
