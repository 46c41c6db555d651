"""Pure-numpy reference versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same functions with the same argument conventions;
``nsac.kernels`` picks one at import time.
"""

import numpy as np

BACKEND = "python"


def polyline_nearest(px, py, vx, vy):
    """Nearest point on a closed polyline for each query point.

    Returns ``(segment, t, dist2)``: the segment index ``k`` (from vertex
    ``k`` to ``k+1 mod n``), the parameter ``t`` in [0, 1] along it and the
    squared distance.
    """
    px = np.ascontiguousarray(px, dtype=float).ravel()
    py = np.ascontiguousarray(py, dtype=float).ravel()
    ax = np.asarray(vx, dtype=float)
    ay = np.asarray(vy, dtype=float)
    bx = np.roll(ax, -1)
    by = np.roll(ay, -1)
    ex = bx - ax
    ey = by - ay
    ee = ex * ex + ey * ey
    ee = np.where(ee > 0.0, ee, 1.0)

    npts = px.size
    seg = np.empty(npts, dtype=np.int64)
    tpar = np.empty(npts)
    best = np.empty(npts)
    chunk = max(1, 2_000_000 // max(ax.size, 1))
    for lo in range(0, npts, chunk):
        hi = min(npts, lo + chunk)
        qx = px[lo:hi, None] - ax[None, :]
        qy = py[lo:hi, None] - ay[None, :]
        t = np.clip((qx * ex + qy * ey) / ee, 0.0, 1.0)
        dx = qx - t * ex
        dy = qy - t * ey
        d2 = dx * dx + dy * dy
        k = np.argmin(d2, axis=1)
        rows = np.arange(hi - lo)
        seg[lo:hi] = k
        tpar[lo:hi] = t[rows, k]
        best[lo:hi] = d2[rows, k]
    return seg, tpar, best


def momentum_rhs(Up, Vp, Cp, Lp, Np, h, eps):
    """Explicit momentum tendency on a MAC grid from padded arrays.

    All inputs carry one ghost layer: ``Up[j+1, i+1] = u[j, i]`` with ``u`` on
    x-faces, ``Vp`` likewise for y-faces, ``Cp``/``Lp``/``Np`` hold ``c``,
    ``Lap c`` and the viscosity at cell centres. Returns ``(Fu, Fv)`` of shape
    ``(ny, nx)``: ``-div(u u) + div(2 nu D u) - eps Lap(c) grad(c)``.
    """
    ny, nx = Up.shape[0] - 2, Up.shape[1] - 2
    inv_h = 1.0 / h
    J = slice(1, ny + 1)
    I = slice(1, nx + 1)

    def sh(a, dj, di):
        return a[1 + dj:ny + 1 + dj, 1 + di:nx + 1 + di]

    # viscosity at cell corners (i h, j h): mean of the four adjacent cells
    nu_node = 0.25 * (Np[0:ny + 1, 0:nx + 1] + Np[0:ny + 1, 1:nx + 2]
                      + Np[1:ny + 2, 0:nx + 1] + Np[1:ny + 2, 1:nx + 2])

    def node(dj, di):
        return nu_node[dj:ny + dj, di:nx + di]

    u = Up[J, I]
    v = Vp[J, I]

    # ---- x-momentum on u faces
    uc_r = 0.5 * (u + sh(Up, 0, 1))
    uc_l = 0.5 * (sh(Up, 0, -1) + u)
    ut = 0.5 * (u + sh(Up, 1, 0))
    ub = 0.5 * (sh(Up, -1, 0) + u)
    vt = 0.5 * (sh(Vp, 1, -1) + sh(Vp, 1, 0))
    vb = 0.5 * (sh(Vp, 0, -1) + v)
    conv_u = (uc_r * uc_r - uc_l * uc_l + vt * ut - vb * ub) * inv_h

    nu_r = Np[J, I]
    nu_l = sh(Np, 0, -1)
    sxx = 2.0 * (nu_r * (sh(Up, 0, 1) - u) - nu_l * (u - sh(Up, 0, -1))) * inv_h * inv_h
    tau_t = node(1, 0) * ((sh(Up, 1, 0) - u) + (sh(Vp, 1, 0) - sh(Vp, 1, -1))) * inv_h
    tau_b = node(0, 0) * ((u - sh(Up, -1, 0)) + (v - sh(Vp, 0, -1))) * inv_h
    visc_u = sxx + (tau_t - tau_b) * inv_h

    cap_u = -eps * 0.5 * (Lp[J, I] + sh(Lp, 0, -1)) * (Cp[J, I] - sh(Cp, 0, -1)) * inv_h
    Fu = -conv_u + visc_u + cap_u

    # ---- y-momentum on v faces
    vc_t = 0.5 * (v + sh(Vp, 1, 0))
    vc_b = 0.5 * (sh(Vp, -1, 0) + v)
    vr = 0.5 * (v + sh(Vp, 0, 1))
    vl = 0.5 * (sh(Vp, 0, -1) + v)
    ur = 0.5 * (sh(Up, -1, 1) + sh(Up, 0, 1))
    ul = 0.5 * (sh(Up, -1, 0) + u)
    conv_v = (vc_t * vc_t - vc_b * vc_b + ur * vr - ul * vl) * inv_h

    nu_t = Np[J, I]
    nu_b = sh(Np, -1, 0)
    syy = 2.0 * (nu_t * (sh(Vp, 1, 0) - v) - nu_b * (v - sh(Vp, -1, 0))) * inv_h * inv_h
    tau_r = node(0, 1) * ((sh(Vp, 0, 1) - v) + (sh(Up, 0, 1) - sh(Up, -1, 1))) * inv_h
    tau_l = node(0, 0) * ((v - sh(Vp, 0, -1)) + (u - sh(Up, -1, 0))) * inv_h
    visc_v = syy + (tau_r - tau_l) * inv_h

    cap_v = -eps * 0.5 * (Lp[J, I] + sh(Lp, -1, 0)) * (Cp[J, I] - sh(Cp, -1, 0)) * inv_h
    Fv = -conv_v + visc_v + cap_v
    return Fu, Fv


def flux_divergence(Cp, Up, Vp, h):
    """Conservative ``div(c u)`` at cell centres with centred face values."""
    ny, nx = Cp.shape[0] - 2, Cp.shape[1] - 2
    c = Cp[1:ny + 1, 1:nx + 1]
    fx = Up[1:ny + 1, 1:nx + 2] * 0.5 * (Cp[1:ny + 1, 0:nx + 1] + Cp[1:ny + 1, 1:nx + 2])
    fy = Vp[1:ny + 2, 1:nx + 1] * 0.5 * (Cp[0:ny + 1, 1:nx + 1] + Cp[1:ny + 2, 1:nx + 1])
    del c
    return ((fx[:, 1:] - fx[:, :-1]) + (fy[1:, :] - fy[:-1, :])) / h
