# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled valid-mode window moments.

Accumulates the five weighted sums SSIM needs in a single pass over each
window. Summation runs over kernel offsets in row-major order, which is the
same order ``ssimlab._fallback`` uses, so both paths agree bit for bit.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def window_moments(const double[:, ::1] a, const double[:, ::1] b,
                   const double[:, ::1] w):
    cdef Py_ssize_t k = w.shape[0]
    cdef Py_ssize_t out_h = a.shape[0] - k + 1
    cdef Py_ssize_t out_w = a.shape[1] - k + 1
    cdef Py_ssize_t y, x, i, j
    cdef double sa, sb, saa, sbb, sab, wi, pa, pb

    res = np.empty((5, out_h, out_w), dtype=np.float64)
    cdef double[:, :, ::1] r = res

    for y in range(out_h):
        for x in range(out_w):
            sa = 0.0
            sb = 0.0
            saa = 0.0
            sbb = 0.0
            sab = 0.0
            for i in range(k):
                for j in range(k):
                    wi = w[i, j]
                    pa = a[y + i, x + j]
                    pb = b[y + i, x + j]
                    sa = sa + wi * pa
                    sb = sb + wi * pb
                    saa = saa + wi * (pa * pa)
                    sbb = sbb + wi * (pb * pb)
                    sab = sab + wi * (pa * pb)
            r[0, y, x] = sa
            r[1, y, x] = sb
            r[2, y, x] = saa
            r[3, y, x] = sbb
            r[4, y, x] = sab
    return res
