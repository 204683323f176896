# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the lattice kernels in ``_pykernels``.

Same signatures and output order; see that module for semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor, fabs, INFINITY

cnp.import_array()

cdef double _SLACK = 1e-9


def box_points(G, offset, lo, hi, mlo, mhi):
    cdef const double[:, ::1] g = np.ascontiguousarray(G, dtype=np.float64)
    cdef const double[::1] off = np.ascontiguousarray(offset, dtype=np.float64)
    cdef const double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef long long[::1] mlov = np.ascontiguousarray(mlo, dtype=np.int64)
    cdef long long[::1] mhiv = np.ascontiguousarray(mhi, dtype=np.int64)
    cdef Py_ssize_t d = g.shape[0]
    cdef Py_ssize_t i, j, k
    cdef long long[::1] m = np.empty(d, dtype=np.int64)
    cdef double[::1] part = np.empty(d, dtype=np.float64)
    cdef double a, b, gj, low, high, t1, t2, tl, th, tol
    cdef long long first, last, c
    cdef bint alive, done

    for i in range(d - 1):
        if mlov[i] > mhiv[i]:
            return np.zeros((0, d), dtype=np.int64)

    cdef Py_ssize_t cap = 1024
    cdef Py_ssize_t n = 0
    buf = np.empty((cap, d), dtype=np.int64)
    cdef long long[:, ::1] out = buf

    for i in range(d - 1):
        m[i] = mlov[i]

    done = False
    while not done:
        for j in range(d):
            part[j] = off[j]
        for j in range(d):
            for k in range(d - 1):
                part[j] = part[j] + g[j, k] * m[k]
        a = <double>mlov[d - 1]
        b = <double>mhiv[d - 1]
        alive = True
        for j in range(d):
            gj = g[j, d - 1]
            low = lov[j] - part[j]
            high = hiv[j] - part[j]
            if gj == 0.0:
                tol = _SLACK * (1.0 + fabs(part[j]))
                if not (low <= tol and high >= -tol):
                    alive = False
                continue
            t1 = low / gj
            t2 = high / gj
            if t1 < t2:
                tl = t1
                th = t2
            else:
                tl = t2
                th = t1
            tl = tl - _SLACK * (1.0 + fabs(tl))
            th = th + _SLACK * (1.0 + fabs(th))
            if tl > a:
                a = tl
            if th < b:
                b = th
        if alive:
            first = <long long>ceil(a)
            last = <long long>floor(b)
            c = first
            while c <= last:
                if n == cap:
                    cap *= 2
                    buf = np.resize(buf, (cap, d))
                    out = buf
                for k in range(d - 1):
                    out[n, k] = m[k]
                out[n, d - 1] = c
                n += 1
                c += 1
        # odometer over the leading d-1 coordinates, last index fastest
        if d == 1:
            done = True
        else:
            i = d - 2
            while True:
                m[i] += 1
                if m[i] <= mhiv[i]:
                    break
                m[i] = mlov[i]
                if i == 0:
                    done = True
                    break
                i -= 1
    return np.array(buf[:n])


def min_abs_product(B, R):
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t d = b.shape[0]
    cdef long long r = int(R)
    cdef long long[::1] m = np.zeros(d, dtype=np.int64)
    cdef long long[::1] arg = np.zeros(d, dtype=np.int64)
    cdef double best = INFINITY
    cdef double prod, y
    cdef Py_ssize_t i, j, k
    cdef bint positive

    # walk the cube in lexicographic order, scoring only vectors whose first
    # nonzero entry is positive; same order as the numpy fallback
    if d == 1:
        for i in range(1, r + 1):
            prod = fabs(b[0, 0] * i)
            if prod < best:
                best = prod
                arg[0] = i
        return best, np.array(arg)

    m[0] = 0
    for i in range(1, d):
        m[i] = -r
    while True:
        positive = m[0] > 0
        if not positive:
            for i in range(1, d):
                if m[i] != 0:
                    positive = m[i] > 0
                    break
        if positive:
            prod = 1.0
            for j in range(d):
                y = 0.0
                for k in range(d):
                    y = y + b[j, k] * m[k]
                prod = prod * fabs(y)
            if prod < best:
                best = prod
                for k in range(d):
                    arg[k] = m[k]
        i = d - 1
        while True:
            m[i] += 1
            if m[i] <= r:
                break
            m[i] = -r
            i -= 1
            if i == 0:
                m[0] += 1
                break
        if m[0] > r:
            break
    return best, np.array(arg)
