# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Argument conventions match ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND = "cython"


def polyline_nearest(px, py, vx, vy):
    cdef double[::1] qx = np.ascontiguousarray(px, dtype=np.float64).ravel()
    cdef double[::1] qy = np.ascontiguousarray(py, dtype=np.float64).ravel()
    cdef double[::1] ax = np.ascontiguousarray(vx, dtype=np.float64)
    cdef double[::1] ay = np.ascontiguousarray(vy, dtype=np.float64)
    cdef Py_ssize_t n = ax.shape[0], m = qx.shape[0]
    cdef Py_ssize_t i, k, kn, kbest
    cdef double ex, ey, ee, t, dx, dy, d2, best, tbest, wx, wy

    seg_arr = np.empty(m, dtype=np.int64)
    t_arr = np.empty(m, dtype=np.float64)
    d_arr = np.empty(m, dtype=np.float64)
    cdef long long[::1] seg = seg_arr
    cdef double[::1] tout = t_arr
    cdef double[::1] dout = d_arr

    for i in range(m):
        best = INFINITY
        kbest = 0
        tbest = 0.0
        for k in range(n):
            kn = k + 1
            if kn == n:
                kn = 0
            ex = ax[kn] - ax[k]
            ey = ay[kn] - ay[k]
            ee = ex * ex + ey * ey
            if ee <= 0.0:
                ee = 1.0
            wx = qx[i] - ax[k]
            wy = qy[i] - ay[k]
            t = (wx * ex + wy * ey) / ee
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            dx = wx - t * ex
            dy = wy - t * ey
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                kbest = k
                tbest = t
        seg[i] = kbest
        tout[i] = tbest
        dout[i] = best
    return seg_arr, t_arr, d_arr


def momentum_rhs(Up, Vp, Cp, Lp, Np, double h, double eps):
    cdef double[:, ::1] U = np.ascontiguousarray(Up, dtype=np.float64)
    cdef double[:, ::1] V = np.ascontiguousarray(Vp, dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(Cp, dtype=np.float64)
    cdef double[:, ::1] Lc = np.ascontiguousarray(Lp, dtype=np.float64)
    cdef double[:, ::1] Nu = np.ascontiguousarray(Np, dtype=np.float64)
    cdef Py_ssize_t ny = U.shape[0] - 2, nx = U.shape[1] - 2
    cdef Py_ssize_t j, i, a, b
    cdef double ih = 1.0 / h
    cdef double u, v, ucr, ucl, ut, ub, vt, vb, conv, sxx, tt, tb, cap
    cdef double vct, vcb, vr, vl, ur, ul, syy, tr, tl
    cdef double n00, n10, n01

    Fu_arr = np.empty((ny, nx), dtype=np.float64)
    Fv_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] Fu = Fu_arr
    cdef double[:, ::1] Fv = Fv_arr

    for j in range(ny):
        a = j + 1
        for i in range(nx):
            b = i + 1
            # corner viscosities: node (i, j), node (i, j+1), node (i+1, j)
            n00 = 0.25 * (Nu[a - 1, b - 1] + Nu[a - 1, b] + Nu[a, b - 1] + Nu[a, b])
            n10 = 0.25 * (Nu[a, b - 1] + Nu[a, b] + Nu[a + 1, b - 1] + Nu[a + 1, b])
            n01 = 0.25 * (Nu[a - 1, b] + Nu[a - 1, b + 1] + Nu[a, b] + Nu[a, b + 1])

            u = U[a, b]
            v = V[a, b]

            ucr = 0.5 * (u + U[a, b + 1])
            ucl = 0.5 * (U[a, b - 1] + u)
            ut = 0.5 * (u + U[a + 1, b])
            ub = 0.5 * (U[a - 1, b] + u)
            vt = 0.5 * (V[a + 1, b - 1] + V[a + 1, b])
            vb = 0.5 * (V[a, b - 1] + v)
            conv = (ucr * ucr - ucl * ucl + vt * ut - vb * ub) * ih
            sxx = 2.0 * (Nu[a, b] * (U[a, b + 1] - u) - Nu[a, b - 1] * (u - U[a, b - 1])) * ih * ih
            tt = n10 * ((U[a + 1, b] - u) + (V[a + 1, b] - V[a + 1, b - 1])) * ih
            tb = n00 * ((u - U[a - 1, b]) + (v - V[a, b - 1])) * ih
            cap = -eps * 0.5 * (Lc[a, b] + Lc[a, b - 1]) * (C[a, b] - C[a, b - 1]) * ih
            Fu[j, i] = -conv + sxx + (tt - tb) * ih + cap

            vct = 0.5 * (v + V[a + 1, b])
            vcb = 0.5 * (V[a - 1, b] + v)
            vr = 0.5 * (v + V[a, b + 1])
            vl = 0.5 * (V[a, b - 1] + v)
            ur = 0.5 * (U[a - 1, b + 1] + U[a, b + 1])
            ul = 0.5 * (U[a - 1, b] + u)
            conv = (vct * vct - vcb * vcb + ur * vr - ul * vl) * ih
            syy = 2.0 * (Nu[a, b] * (V[a + 1, b] - v) - Nu[a - 1, b] * (v - V[a - 1, b])) * ih * ih
            tr = n01 * ((V[a, b + 1] - v) + (U[a, b + 1] - U[a - 1, b + 1])) * ih
            tl = n00 * ((v - V[a, b - 1]) + (u - U[a - 1, b])) * ih
            cap = -eps * 0.5 * (Lc[a, b] + Lc[a - 1, b]) * (C[a, b] - C[a - 1, b]) * ih
            Fv[j, i] = -conv + syy + (tr - tl) * ih + cap
    return Fu_arr, Fv_arr


def flux_divergence(Cp, Up, Vp, double h):
    cdef double[:, ::1] C = np.ascontiguousarray(Cp, dtype=np.float64)
    cdef double[:, ::1] U = np.ascontiguousarray(Up, dtype=np.float64)
    cdef double[:, ::1] V = np.ascontiguousarray(Vp, dtype=np.float64)
    cdef Py_ssize_t ny = C.shape[0] - 2, nx = C.shape[1] - 2
    cdef Py_ssize_t j, i, a, b
    cdef double ih = 1.0 / h
    out_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for j in range(ny):
        a = j + 1
        for i in range(nx):
            b = i + 1
            out[j, i] = ((U[a, b + 1] * 0.5 * (C[a, b] + C[a, b + 1])
                          - U[a, b] * 0.5 * (C[a, b - 1] + C[a, b]))
                         + (V[a + 1, b] * 0.5 * (C[a, b] + C[a + 1, b])
                            - V[a, b] * 0.5 * (C[a - 1, b] + C[a, b]))) * ih
    return out_arr
