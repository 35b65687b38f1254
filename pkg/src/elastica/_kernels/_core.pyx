# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pentadiagonal solve, orbit RK4, Hausdorff loop."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

BACKEND = "compiled"


def solve_pentadiagonal(l2, l1, d, u1, u2, rhs):
    """Solve a pentadiagonal system; same contract as the fallback."""
    # np.array (not ascontiguousarray): a1 is mutated by the elimination
    # and must never alias the caller's band
    cdef cnp.ndarray[double, ndim=1] a2 = np.array(l2, dtype=float)
    cdef cnp.ndarray[double, ndim=1] a1 = np.array(l1, dtype=float)
    cdef cnp.ndarray[double, ndim=1] dd = np.array(d, dtype=float)
    cdef cnp.ndarray[double, ndim=1] b1 = np.array(u1, dtype=float)
    cdef cnp.ndarray[double, ndim=1] b2 = np.array(u2, dtype=float)
    r = np.asarray(rhs, dtype=float)
    squeeze = r.ndim == 1
    cdef cnp.ndarray[double, ndim=2] x = np.array(
        r.reshape(r.shape[0], -1), dtype=float, order="C")
    cdef Py_ssize_t n = dd.shape[0]
    cdef Py_ssize_t m = x.shape[1]
    cdef cnp.ndarray[double, ndim=1] w1 = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] w2 = np.zeros(n)
    cdef Py_ssize_t i, j
    cdef double lam

    # forward elimination (no pivoting; rows are diagonally dominant here)
    for i in range(n - 1):
        lam = a1[i] / dd[i]
        dd[i + 1] -= lam * b1[i]
        if i + 2 < n:
            b1[i + 1] -= lam * b2[i]
        for j in range(m):
            x[i + 1, j] -= lam * x[i, j]
        if i + 2 < n:
            lam = a2[i] / dd[i]
            dd[i + 2] -= lam * b2[i]
            a1[i + 1] -= lam * b1[i]
            for j in range(m):
                x[i + 2, j] -= lam * x[i, j]

    # back substitution
    for j in range(m):
        x[n - 1, j] /= dd[n - 1]
    if n > 1:
        for j in range(m):
            x[n - 2, j] = (x[n - 2, j] - b1[n - 2] * x[n - 1, j]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        for j in range(m):
            x[i, j] = (x[i, j] - b1[i] * x[i + 1, j] - b2[i] * x[i + 2, j]) / dd[i]

    out = np.asarray(x)
    return out[:, 0] if squeeze else out


def integrate_orbit(double kappa0, double p0, double theta0, double lam,
                    double h, Py_ssize_t n_nodes, Py_ssize_t substeps):
    """RK4 for (kappa, kappa_s, theta, x, y); same contract as the fallback."""
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n_nodes + 1, 5))
    cdef double lam2 = lam * lam
    cdef double dt = h / substeps
    cdef double k = kappa0, p = p0, th = theta0, x = 0.0, y = 0.0
    cdef double k1k, k1p, k1t, k1x, k1y
    cdef double k2k, k2p, k2t, k2x, k2y
    cdef double k3k, k3p, k3t, k3x, k3y
    cdef double k4k, k4p, k4t, k4x, k4y
    cdef double kk, tt
    cdef Py_ssize_t i, s

    out[0, 0] = k; out[0, 1] = p; out[0, 2] = th; out[0, 3] = x; out[0, 4] = y
    for i in range(1, n_nodes + 1):
        for s in range(substeps):
            k1k = p
            k1p = 0.5 * (lam2 * k - k * k * k)
            k1t = k
            k1x = cos(th)
            k1y = sin(th)

            kk = k + 0.5 * dt * k1k
            k2p = 0.5 * (lam2 * kk - kk * kk * kk)
            k2k = p + 0.5 * dt * k1p
            k2t = kk
            tt = th + 0.5 * dt * k1t
            k2x = cos(tt)
            k2y = sin(tt)

            kk = k + 0.5 * dt * k2k
            k3p = 0.5 * (lam2 * kk - kk * kk * kk)
            k3k = p + 0.5 * dt * k2p
            k3t = kk
            tt = th + 0.5 * dt * k2t
            k3x = cos(tt)
            k3y = sin(tt)

            kk = k + dt * k3k
            k4p = 0.5 * (lam2 * kk - kk * kk * kk)
            k4k = p + dt * k3p
            k4t = kk
            tt = th + dt * k3t
            k4x = cos(tt)
            k4y = sin(tt)

            k += (dt / 6.0) * (k1k + 2.0 * k2k + 2.0 * k3k + k4k)
            p += (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            th += (dt / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            y += (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        out[i, 0] = k; out[i, 1] = p; out[i, 2] = th
        out[i, 3] = x; out[i, 4] = y
    return out


def directed_hausdorff(pts_in, poly_in):
    """sup over pts of the point-to-polyline distance; fallback contract."""
    cdef cnp.ndarray[double, ndim=2] pts = np.ascontiguousarray(pts_in, dtype=float)
    cdef cnp.ndarray[double, ndim=2] poly = np.ascontiguousarray(poly_in, dtype=float)
    cdef Py_ssize_t np_ = pts.shape[0]
    cdef Py_ssize_t ns = poly.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double best, d2, ax, ay, bx, by, px, py, abx, aby, ab2, t, cx, cy
    cdef double worst = 0.0

    for i in range(np_):
        px = pts[i, 0]; py = pts[i, 1]
        best = 1e300
        for j in range(ns):
            ax = poly[j, 0]; ay = poly[j, 1]
            bx = poly[j + 1, 0]; by = poly[j + 1, 1]
            abx = bx - ax; aby = by - ay
            ab2 = abx * abx + aby * aby
            if ab2 > 0.0:
                t = ((px - ax) * abx + (py - ay) * aby) / ab2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            cx = ax + t * abx; cy = ay + t * aby
            d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy)
            if d2 < best:
                best = d2
        if best > worst:
            worst = best
    return sqrt(worst)
