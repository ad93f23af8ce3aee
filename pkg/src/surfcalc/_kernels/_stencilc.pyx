# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil and reduction kernels.

Twin of ``_numpy_impl``: same formulas, same evaluation order, same
reduction tree.  Keep the two files in sync.
"""

import numpy as np


def diff1(f, int axis, double h, int order=2, bint periodic=False, bint sbp=False):
    f = np.ascontiguousarray(f, dtype=np.float64)
    if order != 2 and order != 4:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")
    if sbp and order != 2:
        raise ValueError("sbp closure is defined for order 2 only")
    n = f.shape[axis]
    if n < (5 if order == 4 else 3):
        raise ValueError(f"axis {axis} too short ({n}) for order-{order} stencil")
    out = np.empty_like(f)
    if axis == 0:
        _diff1_axis0(f, out, h, order, periodic, sbp)
    else:
        _diff1_axis1(f, out, h, order, periodic, sbp)
    return out


cdef void _diff1_axis0(double[:, ::1] f, double[:, ::1] out, double h,
                       int order, bint periodic, bint sbp) noexcept:
    cdef Py_ssize_t n = f.shape[0], m = f.shape[1]
    cdef Py_ssize_t i, j
    cdef double c
    if order == 2:
        c = 0.5 / h
        if periodic:
            for j in range(m):
                out[0, j] = (f[1, j] - f[n - 1, j]) * c
                out[n - 1, j] = (f[0, j] - f[n - 2, j]) * c
            for i in range(1, n - 1):
                for j in range(m):
                    out[i, j] = (f[i + 1, j] - f[i - 1, j]) * c
            return
        for i in range(1, n - 1):
            for j in range(m):
                out[i, j] = (f[i + 1, j] - f[i - 1, j]) * c
        if sbp:
            for j in range(m):
                out[0, j] = (f[1, j] - f[0, j]) * (1.0 / h)
                out[n - 1, j] = (f[n - 1, j] - f[n - 2, j]) * (1.0 / h)
        else:
            for j in range(m):
                out[0, j] = (-3.0 * f[0, j] + 4.0 * f[1, j] - 1.0 * f[2, j]) * c
                out[n - 1, j] = (3.0 * f[n - 1, j] - 4.0 * f[n - 2, j] + 1.0 * f[n - 3, j]) * c
        return
    # order 4
    c = 1.0 / (12.0 * h)
    if periodic:
        for j in range(m):
            out[0, j] = (f[n - 2, j] - 8.0 * f[n - 1, j] + 8.0 * f[1, j] - f[2, j]) * c
            out[1, j] = (f[n - 1, j] - 8.0 * f[0, j] + 8.0 * f[2, j] - f[3, j]) * c
            out[n - 2, j] = (f[n - 4, j] - 8.0 * f[n - 3, j] + 8.0 * f[n - 1, j] - f[0, j]) * c
            out[n - 1, j] = (f[n - 3, j] - 8.0 * f[n - 2, j] + 8.0 * f[0, j] - f[1, j]) * c
        for i in range(2, n - 2):
            for j in range(m):
                out[i, j] = (f[i - 2, j] - 8.0 * f[i - 1, j]
                             + 8.0 * f[i + 1, j] - f[i + 2, j]) * c
        return
    for i in range(2, n - 2):
        for j in range(m):
            out[i, j] = (f[i - 2, j] - 8.0 * f[i - 1, j]
                         + 8.0 * f[i + 1, j] - f[i + 2, j]) * c
    for j in range(m):
        out[0, j] = (-25.0 * f[0, j] + 48.0 * f[1, j] - 36.0 * f[2, j]
                     + 16.0 * f[3, j] - 3.0 * f[4, j]) * c
        out[1, j] = (-3.0 * f[0, j] - 10.0 * f[1, j] + 18.0 * f[2, j]
                     - 6.0 * f[3, j] + 1.0 * f[4, j]) * c
        out[n - 1, j] = -(-25.0 * f[n - 1, j] + 48.0 * f[n - 2, j] - 36.0 * f[n - 3, j]
                          + 16.0 * f[n - 4, j] - 3.0 * f[n - 5, j]) * c
        out[n - 2, j] = -(-3.0 * f[n - 1, j] - 10.0 * f[n - 2, j] + 18.0 * f[n - 3, j]
                          - 6.0 * f[n - 4, j] + 1.0 * f[n - 5, j]) * c


cdef void _diff1_axis1(double[:, ::1] f, double[:, ::1] out, double h,
                       int order, bint periodic, bint sbp) noexcept:
    cdef Py_ssize_t n = f.shape[1], m = f.shape[0]
    cdef Py_ssize_t i, j
    cdef double c
    if order == 2:
        c = 0.5 / h
        if periodic:
            for i in range(m):
                out[i, 0] = (f[i, 1] - f[i, n - 1]) * c
                for j in range(1, n - 1):
                    out[i, j] = (f[i, j + 1] - f[i, j - 1]) * c
                out[i, n - 1] = (f[i, 0] - f[i, n - 2]) * c
            return
        for i in range(m):
            for j in range(1, n - 1):
                out[i, j] = (f[i, j + 1] - f[i, j - 1]) * c
            if sbp:
                out[i, 0] = (f[i, 1] - f[i, 0]) * (1.0 / h)
                out[i, n - 1] = (f[i, n - 1] - f[i, n - 2]) * (1.0 / h)
            else:
                out[i, 0] = (-3.0 * f[i, 0] + 4.0 * f[i, 1] - 1.0 * f[i, 2]) * c
                out[i, n - 1] = (3.0 * f[i, n - 1] - 4.0 * f[i, n - 2] + 1.0 * f[i, n - 3]) * c
        return
    c = 1.0 / (12.0 * h)
    if periodic:
        for i in range(m):
            out[i, 0] = (f[i, n - 2] - 8.0 * f[i, n - 1] + 8.0 * f[i, 1] - f[i, 2]) * c
            out[i, 1] = (f[i, n - 1] - 8.0 * f[i, 0] + 8.0 * f[i, 2] - f[i, 3]) * c
            for j in range(2, n - 2):
                out[i, j] = (f[i, j - 2] - 8.0 * f[i, j - 1]
                             + 8.0 * f[i, j + 1] - f[i, j + 2]) * c
            out[i, n - 2] = (f[i, n - 4] - 8.0 * f[i, n - 3] + 8.0 * f[i, n - 1] - f[i, 0]) * c
            out[i, n - 1] = (f[i, n - 3] - 8.0 * f[i, n - 2] + 8.0 * f[i, 0] - f[i, 1]) * c
        return
    for i in range(m):
        for j in range(2, n - 2):
            out[i, j] = (f[i, j - 2] - 8.0 * f[i, j - 1]
                         + 8.0 * f[i, j + 1] - f[i, j + 2]) * c
        out[i, 0] = (-25.0 * f[i, 0] + 48.0 * f[i, 1] - 36.0 * f[i, 2]
                     + 16.0 * f[i, 3] - 3.0 * f[i, 4]) * c
        out[i, 1] = (-3.0 * f[i, 0] - 10.0 * f[i, 1] + 18.0 * f[i, 2]
                     - 6.0 * f[i, 3] + 1.0 * f[i, 4]) * c
        out[i, n - 1] = -(-25.0 * f[i, n - 1] + 48.0 * f[i, n - 2] - 36.0 * f[i, n - 3]
                          + 16.0 * f[i, n - 4] - 3.0 * f[i, n - 5]) * c
        out[i, n - 2] = -(-3.0 * f[i, n - 1] - 10.0 * f[i, n - 2] + 18.0 * f[i, n - 3]
                          - 6.0 * f[i, n - 4] + 1.0 * f[i, n - 5]) * c


def compact_flux_div(a, c, int axis, double h, bint periodic=False):
    a = np.ascontiguousarray(a, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    out = np.empty_like(c)
    if axis == 0:
        _flux_div_axis0(a, c, out, h, periodic)
    else:
        _flux_div_axis1(a, c, out, h, periodic)
    return out


cdef void _flux_div_axis0(double[:, ::1] a, double[:, ::1] c, double[:, ::1] out,
                          double h, bint periodic) noexcept:
    cdef Py_ssize_t n = c.shape[0], m = c.shape[1]
    cdef Py_ssize_t i, j
    cdef double inv_h2 = 1.0 / (h * h)
    cdef double f_up, f_dn
    if periodic:
        for j in range(m):
            f_up = 0.5 * (a[0, j] + a[1, j]) * (c[1, j] - c[0, j])
            f_dn = 0.5 * (a[n - 1, j] + a[0, j]) * (c[0, j] - c[n - 1, j])
            out[0, j] = (f_up - f_dn) * inv_h2
            f_up = 0.5 * (a[n - 1, j] + a[0, j]) * (c[0, j] - c[n - 1, j])
            f_dn = 0.5 * (a[n - 2, j] + a[n - 1, j]) * (c[n - 1, j] - c[n - 2, j])
            out[n - 1, j] = (f_up - f_dn) * inv_h2
        for i in range(1, n - 1):
            for j in range(m):
                f_up = 0.5 * (a[i, j] + a[i + 1, j]) * (c[i + 1, j] - c[i, j])
                f_dn = 0.5 * (a[i - 1, j] + a[i, j]) * (c[i, j] - c[i - 1, j])
                out[i, j] = (f_up - f_dn) * inv_h2
        return
    for j in range(m):
        out[0, j] = 2.0 * (0.5 * (a[1, j] + a[0, j]) * (c[1, j] - c[0, j])) * inv_h2
        out[n - 1, j] = -2.0 * (0.5 * (a[n - 1, j] + a[n - 2, j])
                                * (c[n - 1, j] - c[n - 2, j])) * inv_h2
    for i in range(1, n - 1):
        for j in range(m):
            f_up = 0.5 * (a[i + 1, j] + a[i, j]) * (c[i + 1, j] - c[i, j])
            f_dn = 0.5 * (a[i, j] + a[i - 1, j]) * (c[i, j] - c[i - 1, j])
            out[i, j] = (f_up - f_dn) * inv_h2


cdef void _flux_div_axis1(double[:, ::1] a, double[:, ::1] c, double[:, ::1] out,
                          double h, bint periodic) noexcept:
    cdef Py_ssize_t n = c.shape[1], m = c.shape[0]
    cdef Py_ssize_t i, j
    cdef double inv_h2 = 1.0 / (h * h)
    cdef double f_up, f_dn
    if periodic:
        for i in range(m):
            f_up = 0.5 * (a[i, 0] + a[i, 1]) * (c[i, 1] - c[i, 0])
            f_dn = 0.5 * (a[i, n - 1] + a[i, 0]) * (c[i, 0] - c[i, n - 1])
            out[i, 0] = (f_up - f_dn) * inv_h2
            for j in range(1, n - 1):
                f_up = 0.5 * (a[i, j] + a[i, j + 1]) * (c[i, j + 1] - c[i, j])
                f_dn = 0.5 * (a[i, j - 1] + a[i, j]) * (c[i, j] - c[i, j - 1])
                out[i, j] = (f_up - f_dn) * inv_h2
            f_up = 0.5 * (a[i, n - 1] + a[i, 0]) * (c[i, 0] - c[i, n - 1])
            f_dn = 0.5 * (a[i, n - 2] + a[i, n - 1]) * (c[i, n - 1] - c[i, n - 2])
            out[i, n - 1] = (f_up - f_dn) * inv_h2
        return
    for i in range(m):
        out[i, 0] = 2.0 * (0.5 * (a[i, 1] + a[i, 0]) * (c[i, 1] - c[i, 0])) * inv_h2
        out[i, n - 1] = -2.0 * (0.5 * (a[i, n - 1] + a[i, n - 2])
                                * (c[i, n - 1] - c[i, n - 2])) * inv_h2
        for j in range(1, n - 1):
            f_up = 0.5 * (a[i, j + 1] + a[i, j]) * (c[i, j + 1] - c[i, j])
            f_dn = 0.5 * (a[i, j] + a[i, j - 1]) * (c[i, j] - c[i, j - 1])
            out[i, j] = (f_up - f_dn) * inv_h2


def pairwise_sum(a):
    buf = np.array(a, dtype=np.float64).ravel().copy()
    cdef double[::1] b = buf
    cdef Py_ssize_t n = b.shape[0]
    if n == 0:
        return 0.0
    cdef Py_ssize_t m = 1, step, i
    while m < n:
        step = 2 * m
        i = 0
        while i < n - m:
            b[i] += b[i + m]
            i += step
        m = step
    return float(b[0])
