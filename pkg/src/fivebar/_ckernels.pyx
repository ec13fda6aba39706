# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels``.

Same signatures and return conventions; results agree with the numpy
fallback to rounding of the platform ``sin``/``cos``.
"""
import numpy as np

from libc.math cimport NAN, cos, fabs, sin, sqrt

cdef double H_MIN = 1e-9


def fk_batch(double l0, double l1, double l2, theta1, theta2):
    cdef const double[::1] t1 = np.ascontiguousarray(theta1, dtype=np.float64)
    cdef const double[::1] t2 = np.ascontiguousarray(theta2, dtype=np.float64)
    cdef Py_ssize_t n = t1.shape[0], i
    if t2.shape[0] != n:
        raise ValueError("theta1 and theta2 must have the same length")
    x_arr = np.empty(n)
    z_arr = np.empty(n)
    ok_arr = np.empty(n, dtype=np.bool_)
    cdef double[::1] x = x_arr
    cdef double[::1] z = z_arr
    cdef unsigned char[::1] ok = ok_arr.view(np.uint8)
    cdef double c1, s1, c2, s2, dx, dz, h2, k, lim = 4.0 * l2 * l2
    for i in range(n):
        c1 = cos(t1[i]); s1 = sin(t1[i])
        c2 = cos(t2[i]); s2 = sin(t2[i])
        dx = l0 + l1 * (c2 - c1)
        dz = l1 * (s2 - s1)
        h2 = dx * dx + dz * dz
        if h2 < H_MIN * H_MIN or h2 > lim:
            x[i] = NAN; z[i] = NAN; ok[i] = 0
            continue
        k = sqrt(l2 * l2 / h2 - 0.25)
        x[i] = l1 * c1 + 0.5 * dx - dz * k
        z[i] = l1 * s1 + 0.5 * dz + dx * k
        ok[i] = 1
    return x_arr, z_arr, ok_arr


def tracking_terms(double l0, double l1, double l2,
                   double t1_start, double t1_end,
                   double t2_start, double t2_end, dx, dz):
    cdef const double[::1] px = np.ascontiguousarray(dx, dtype=np.float64)
    cdef const double[::1] pz = np.ascontiguousarray(dz, dtype=np.float64)
    cdef Py_ssize_t n = px.shape[0], i
    cdef double u, th1, th2, c1, s1, c2, s2, bx, bz, h2, h, k, cx, cz, e
    cdef double dist_sum = 0.0, excess_sq = 0.0, lim = 4.0 * l2 * l2
    cdef long n_bad = 0
    for i in range(n):
        u = 0.0 if n == 1 else i / (n - 1.0)
        th1 = t1_start + u * (t1_end - t1_start)
        th2 = t2_start + u * (t2_end - t2_start)
        c1 = cos(th1); s1 = sin(th1)
        c2 = cos(th2); s2 = sin(th2)
        bx = l0 + l1 * (c2 - c1)
        bz = l1 * (s2 - s1)
        h2 = bx * bx + bz * bz
        h = sqrt(h2)
        e = h / (2.0 * l2) - 1.0
        if e > 0.0:
            excess_sq += e * e
        if h2 < H_MIN * H_MIN or h2 > lim:
            n_bad += 1
            continue
        k = sqrt(l2 * l2 / h2 - 0.25)
        cx = l1 * c1 + 0.5 * bx - bz * k - px[i]
        cz = l1 * s1 + 0.5 * bz + bx * k - pz[i]
        dist_sum += sqrt(cx * cx + cz * cz)
    return dist_sum, n_bad, excess_sq


def reach_terms(double l0, double l1, double l2, dx, dz):
    cdef const double[::1] px = np.ascontiguousarray(dx, dtype=np.float64)
    cdef const double[::1] pz = np.ascontiguousarray(dz, dtype=np.float64)
    cdef Py_ssize_t n = px.shape[0], i
    cdef double den = 2.0 * l1 * l2, r1, r2, e
    cdef double e1 = 0.0, e2 = 0.0, m1 = 0.0, m2 = 0.0
    for i in range(n):
        r1 = (l1 * l1 + l2 * l2 - (px[i] * px[i] + pz[i] * pz[i])) / den
        r2 = (l2 * l2 + l1 * l1 - ((l0 - px[i]) * (l0 - px[i]) + pz[i] * pz[i])) / den
        if fabs(r1) > m1:
            m1 = fabs(r1)
        if fabs(r2) > m2:
            m2 = fabs(r2)
        e = fabs(r1) - 1.0
        if e > 0.0:
            e1 += e * e
        e = fabs(r2) - 1.0
        if e > 0.0:
            e2 += e * e
    return e1, e2, m1, m2
