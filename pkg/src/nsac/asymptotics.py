"""Approximate solution ``c_A`` at orders eps^0 and eps^1 and its residual.

Inputs are sharp-interface data (curves, an optional velocity field) and a
:class:`~nsac.profiles.ProfileTable`. The mass multiplier uses

    lambda0 = (sigma / 2) (Hbar - mean_Gamma(n . v)),

the value fixed by the order-eps solvability condition (``int theta0' = 2``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffuse_solver import GridSpec, _Spectral, layer_field
from .errors import BracketNotVanishing, MissingMotion, ValidationError
from .geometry import Curve, signed_distance_and_project, tube_halfwidth
from .profiles import ProfileTable


def _curves(curve):
    return [curve] if isinstance(curve, Curve) else list(curve)


def _normal_velocity(curves, v):
    if v is None:
        return [np.zeros(c.n) for c in curves]
    out = []
    for c in curves:
        vx, vy = v(c.x, c.y)
        out.append(c.normal[:, 0] * np.asarray(vx) + c.normal[:, 1] * np.asarray(vy))
    return out


def _global_mean(curves, values):
    num = sum(c.integral(val) for c, val in zip(curves, values))
    den = sum(c.length for c in curves)
    return float(num / den)


def compute_lambda0(curve, v=None, sigma: float = 2.0 / 3.0) -> float:
    """``(sigma/2) (Hbar - mean(n.v))`` with length-weighted means over all components."""
    curves = _curves(curve)
    hbar = _global_mean(curves, [c.kappa for c in curves])
    nv = _global_mean(curves, _normal_velocity(curves, v))
    return 0.5 * sigma * (hbar - nv)


def normal_velocity_law(curve, v=None):
    """``V = n.v + kappa - Hbar`` on each component (list of arrays)."""
    curves = _curves(curve)
    hbar = _global_mean(curves, [c.kappa for c in curves])
    return [nv + c.kappa - hbar for c, nv in zip(curves, _normal_velocity(curves, v))]


@dataclass(frozen=True)
class G0Field:
    values: np.ndarray
    d: np.ndarray
    s: np.ndarray
    on_gamma: list
    bracket_on_gamma: float
    band: float


def _interp_periodic(values, s):
    grid = np.arange(values.size + 1) / values.size
    return np.interp(np.mod(s, 1.0), grid, np.append(values, values[0]))


def compute_g0(curve, v, lambda0: float, points, sigma: float = 2.0 / 3.0, band: float | None = None,
               V=None, delta: float | None = None, fd_step: float | None = None) -> G0Field:
    """``g0 = -(1/d)(d_t d + v.grad d - Lap d - (2/sigma) lambda0)`` on tube points.

    In 2D the bracket splits exactly as ``B = B_Gamma(s) + [v(x) - v(P x)].n +
    d kappa^2 / (1 - d kappa)``, with ``B_Gamma`` its value on the curve.
    Off the band ``|d| < band`` the raw quotient is used; inside the band the
    split form is divided through analytically, and the velocity part is a
    centred normal derivative when ``|d|`` is below ``fd_step``.
    ``points`` has shape ``(..., 2)``; only one curve component is supported.
    """
    curves = _curves(curve)
    if len(curves) != 1:
        raise ValidationError("compute_g0 handles one component at a time")
    cv = curves[0]
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    q = pts.reshape(-1, 2)
    delta = tube_halfwidth(cv) if delta is None else delta
    band = 0.05 * delta if band is None else band
    fd_step = 1e-4 * cv.length if fd_step is None else fd_step

    Vn = normal_velocity_law(cv, v)[0] if V is None else np.asarray(V, dtype=float)
    nv = _normal_velocity([cv], v)[0]
    b_gamma = -Vn + nv + cv.kappa - (2.0 / sigma) * lambda0
    bracket_max = float(np.abs(b_gamma).max())
    if bracket_max > 1e-4:
        raise BracketNotVanishing(f"bracket on Gamma is {bracket_max:.2e}")

    # normal derivative of v.n on the curve, for the on-Gamma value
    if v is None:
        dvn = np.zeros(cv.n)
    else:
        plus = cv.points + fd_step * cv.normal
        minus = cv.points - fd_step * cv.normal
        vp = np.column_stack(v(plus[:, 0], plus[:, 1]))
        vm = np.column_stack(v(minus[:, 0], minus[:, 1]))
        dvn = np.einsum("ij,ij->i", vp - vm, cv.normal) / (2.0 * fd_step)
    on_gamma = -(dvn + cv.kappa**2)

    tc = signed_distance_and_project(cv, q, delta=delta)
    d, s = tc.r, tc.s
    kap = _interp_periodic(cv.kappa, s)
    bg = _interp_periodic(b_gamma, s)
    if v is None:
        vdiff = np.zeros_like(d)
    else:
        vx, vy = v(q[:, 0], q[:, 1])
        vf = np.column_stack([vx, vy])
        vfoot = np.column_stack(v(tc.foot[:, 0], tc.foot[:, 1]))
        vdiff = np.einsum("ij,ij->i", vf - vfoot, tc.normal)
    geom = d * kap**2 / (1.0 - d * kap)
    bracket = bg + vdiff + geom

    values = np.empty_like(d)
    outer = np.abs(d) >= band
    values[outer] = -bracket[outer] / d[outer]
    inner = ~outer
    if np.any(inner):
        di = d[inner]
        vel = np.empty_like(di)
        tiny = np.abs(di) < fd_step
        vel[~tiny] = vdiff[inner][~tiny] / di[~tiny]
        if np.any(tiny):
            vel[tiny] = _interp_periodic(dvn, s[inner][tiny])
        values[inner] = -(vel + kap[inner] ** 2 / (1.0 - di * kap[inner]))
    return G0Field(values.reshape(shape), d.reshape(shape), s.reshape(shape), [on_gamma],
                   bracket_max, band)


@dataclass(frozen=True)
class ApproxSolution:
    c_A: np.ndarray
    order: int
    lambda0: float
    g0_on_gamma: list
    h_used: object
    components: dict
    grid: GridSpec
    eps: float
    d: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    zeta: np.ndarray = field(repr=False)
    delta: float = 0.0
    curves: tuple = ()

    @property
    def tube_mask(self) -> np.ndarray:
        """Cells inside ``Gamma(2 delta)``."""
        return self.zeta > 0.0


def build_approx_solution(grid: GridSpec, curve, eps: float, table: ProfileTable, order: int = 1,
                          h=None, lambda0: float | None = None, v=None,
                          delta: float | None = None) -> ApproxSolution:
    """``c_A`` blended by the cutoff; ``h`` shifts the stretched variable."""
    curves = _curves(curve)
    lam0 = compute_lambda0(curves, v, table.sigma) if lambda0 is None else float(lambda0)
    if delta is None:
        delta = tube_halfwidth(curves, None if grid.periodic else (grid.lx, grid.ly))
    c, d, s, zeta, _ = layer_field(grid, curves, eps, table, order, lam0, h, delta)
    g0 = [-(c_.kappa**2) for c_ in curves] if v is None else [
        compute_g0(c_, v, lam0, c_.points, table.sigma, delta=delta).on_gamma[0] for c_ in curves
    ]
    comps = {"theta0": True, "theta1": order == 1, "h_shift": h is not None, "lambda1": 0.0}
    return ApproxSolution(c, order, lam0, g0, h, comps, grid, float(eps), d, s, zeta, float(delta),
                          tuple(curves))


def residual_field(approx: ApproxSolution, table: ProfileTable, v_A=None, dt_fd: float = 1e-4,
                   motion=None, lambda1: float = 0.0, laplacian: str = "spectral"):
    """``S = d_t c_A + v_A.grad c_A - Lap c_A + f'(c_A)/eps^2 - lambda_A/eps`` on the grid.

    ``motion`` is ``"stationary"`` or a callable ``t -> curves`` giving the
    interface at times ``t +- dt_fd`` relative to the current one (``t = 0``).
    """
    grid, eps = approx.grid, approx.eps
    pot = table.potential
    c = approx.c_A
    if motion is None:
        raise MissingMotion("time derivative needs a motion (or 'stationary')")
    if isinstance(motion, str):
        if motion != "stationary":
            raise MissingMotion(f"unknown motion {motion!r}")
        dtc = np.zeros_like(c)
    else:
        def at(t):
            return build_approx_solution(grid, motion(t), eps, table, approx.order, approx.h_used,
                                         approx.lambda0, delta=approx.delta).c_A
        dtc = (at(dt_fd) - at(-dt_fd)) / (2.0 * dt_fd)
    lap = _Spectral(grid, laplacian).laplacian(c)
    res = dtc - lap + pot.df(c) / eps**2 - (approx.lambda0 + eps * lambda1) / eps
    if v_A is not None:
        X, Y = grid.cell_centers()
        vx, vy = v_A(X, Y)
        P = np.pad(c, 1, mode="wrap" if grid.periodic else "edge")
        gx = (P[1:-1, 2:] - P[1:-1, :-2]) / (2.0 * grid.h)
        gy = (P[2:, 1:-1] - P[:-2, 1:-1]) / (2.0 * grid.h)
        res = res + vx * gx + vy * gy
    return res


def residual_norms(approx: ApproxSolution, v_A, eps: float, dt_fd: float = 1e-4, motion=None,
                   table: ProfileTable | None = None, lambda1: float = 0.0) -> dict:
    """``L2(Omega)``, ``L1(Gamma(2 delta))`` and ``L2(Omega minus Gamma(2 delta))`` norms of ``S``."""
    if table is None:
        raise ValidationError("profile table required")
    if abs(eps - approx.eps) > 1e-15:
        raise ValidationError("eps does not match the approximate solution")
    res = residual_field(approx, table, v_A, dt_fd, motion, lambda1)
    h2 = approx.grid.h**2
    tube = approx.tube_mask
    return {
        "L2": float(np.sqrt(h2 * np.sum(res**2))),
        "L1_tube": float(h2 * np.sum(np.abs(res[tube]))),
        "L2_outside": float(np.sqrt(h2 * np.sum(res[~tube] ** 2))),
        "max": float(np.abs(res).max()),
    }
