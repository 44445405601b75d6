# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hull and grid-sweep kernels (hot loops of the grid oracles)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def hull_indices(double[::1] x, double[::1] y):
    """Indices of the lower convex hull of (x, y), x strictly increasing."""
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] st = stack
    cdef Py_ssize_t top = 0, i
    cdef Py_ssize_t i0, i1
    for i in range(n):
        while top >= 2:
            i0 = st[top - 2]
            i1 = st[top - 1]
            if (x[i1] - x[i0]) * (y[i] - y[i0]) - (x[i] - x[i0]) * (y[i1] - y[i0]) <= 0.0:
                top -= 1
            else:
                break
        st[top] = i
        top += 1
    return stack[:top].copy()


cdef double _hull_line(double[::1] x, double[::1] v, double[::1] out,
                       cnp.int64_t[::1] st) nogil:
    """Hull of one line into `out`; returns max normalized decrease."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t top = 0, i, s, i0, i1
    cdef double w, val, resid = 0.0, r
    for i in range(n):
        while top >= 2:
            i0 = st[top - 2]
            i1 = st[top - 1]
            if (x[i1] - x[i0]) * (v[i] - v[i0]) - (x[i] - x[i0]) * (v[i1] - v[i0]) <= 0.0:
                top -= 1
            else:
                break
        st[top] = i
        top += 1
    s = 0
    for i in range(n):
        while s + 1 < top and x[st[s + 1]] <= x[i]:
            s += 1
        if s + 1 < top:
            i0 = st[s]
            i1 = st[s + 1]
            w = (x[i] - x[i0]) / (x[i1] - x[i0])
            val = (1.0 - w) * v[i0] + w * v[i1]
        else:
            val = v[st[s]]
        if val > v[i]:
            val = v[i]
        r = (v[i] - val) / (1.0 + (val if val >= 0 else -val))
        if r > resid:
            resid = r
        out[i] = val
    for i in range(n):
        v[i] = out[i]
    return resid


def hull_values(double[::1] x, double[::1] y):
    """Lower convex hull of (x, y) evaluated at every x."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(x.shape[0])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf = np.asarray(y, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] st = np.empty(x.shape[0], dtype=np.int64)
    _hull_line(x, buf, out, st)
    return out


def sweep_grid(double[:, ::1] values, double[::1] x, double[::1] y):
    """One in-place convexification sweep over rows then columns.

    Returns the largest per-node change normalized by 1 + |value|.
    """
    cdef Py_ssize_t nx = values.shape[0], ny = values.shape[1]
    cdef Py_ssize_t n = nx if nx > ny else ny
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf_arr = np.empty(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] st_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef double[::1] buf = buf_arr
    cdef cnp.int64_t[::1] st = st_arr
    cdef double resid = 0.0, r
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(nx):
            for j in range(ny):
                buf[j] = values[i, j]
            r = _hull_line(y, buf[:ny], out[:ny], st)
            if r > resid:
                resid = r
            for j in range(ny):
                values[i, j] = buf[j]
        for j in range(ny):
            for i in range(nx):
                buf[i] = values[i, j]
            r = _hull_line(x, buf[:nx], out[:nx], st)
            if r > resid:
                resid = r
            for i in range(nx):
                values[i, j] = buf[i]
    return resid
