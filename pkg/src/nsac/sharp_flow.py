"""Sharp-interface dynamics.

* front tracking for ``V - n.v = H - Hbar`` (volume-preserving mean curvature
  flow with convection) on one or several closed curves sharing one ``Hbar``;
* the exact ODE reduction for disjoint circles;
* the linear height-function equation on the unit circle ``T^1`` with the
  nonlocal multiplier fixed by the discrete constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    CFLViolation,
    CircleVanished,
    DegenerateCurve,
    NonPeriodicInput,
    StepTooLarge,
    ValidationError,
)
from .geometry import Curve, _spectral_derivative, is_simple, resample_arclength

VelocityField = Callable[[np.ndarray, np.ndarray, float], tuple]


@dataclass(frozen=True)
class SharpState:
    curves: tuple
    t: float = 0.0
    velocity: VelocityField | None = None
    plain_mcf: bool = False

    @classmethod
    def from_curves(cls, curves, t: float = 0.0, velocity=None, plain_mcf: bool = False) -> "SharpState":
        if isinstance(curves, Curve):
            curves = [curves]
        return cls(tuple(curves), float(t), velocity, bool(plain_mcf))

    @property
    def curve(self) -> Curve:
        return self.curves[0]

    @property
    def enclosed_area(self) -> float:
        return float(sum(c.area for c in self.curves))

    @property
    def length(self) -> float:
        return float(sum(c.length for c in self.curves))

    @property
    def mean_curvature(self) -> float:
        return global_mean_curvature(self.curves)


def global_mean_curvature(curves: Sequence[Curve]) -> float:
    """Length-weighted mean of the curvature over all components."""
    num = sum(c.integral(c.kappa) for c in curves)
    den = sum(c.integral(np.ones(c.n)) for c in curves)
    return float(num / den)


def _curve_terms(pts: np.ndarray):
    d1 = _spectral_derivative(pts, 1)
    d2 = _spectral_derivative(pts, 2)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    if np.any(speed <= 0.0) or not np.all(np.isfinite(speed)):
        raise DegenerateCurve("vanishing tangent during the step")
    normal = np.column_stack([-d1[:, 1], d1[:, 0]]) / speed[:, None]
    kappa = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    return normal, kappa, speed


def _velocity(points: list, t: float, velocity, plain: bool):
    terms = [_curve_terms(p) for p in points]
    if plain:
        hbar = 0.0
    else:
        num = sum(np.mean(k * sp) for _, k, sp in terms)
        den = sum(np.mean(sp) for _, _, sp in terms)
        hbar = num / den
    out = []
    for p, (nrm, kap, _) in zip(points, terms):
        vn = kap - hbar
        if velocity is not None:
            vx, vy = velocity(p[:, 0], p[:, 1], t)
            vn = vn + nrm[:, 0] * np.asarray(vx) + nrm[:, 1] * np.asarray(vy)
        out.append(vn[:, None] * nrm)
    return out


def stable_dt(curves: Sequence[Curve], factor: float = 0.4) -> float:
    """``factor * min(ds)^2`` over components, ``ds = length / N``."""
    return factor * min((c.length / c.n) ** 2 for c in curves)


def vpmcf_step(state: SharpState, dt: float) -> SharpState:
    """One RK4 step of the normal motion followed by equal-arclength resampling.

    The step must satisfy ``dt <= 0.4 ds^2``. Internally the step is split so
    each RK4 stage stays inside the spectral stability region (about
    ``0.25 ds^2`` for the curvature term).
    """
    if dt <= 0.0:
        raise ValidationError("dt must be positive")
    if dt > stable_dt(state.curves, 0.4) * (1.0 + 1e-12):
        raise CFLViolation(f"dt={dt:.3e} exceeds 0.4 ds^2 = {stable_dt(state.curves):.3e}")
    nsub = int(np.ceil(dt / stable_dt(state.curves, 0.25) - 1e-12))
    h = dt / nsub
    pts = [c.points.copy() for c in state.curves]
    t = state.t
    vel, plain = state.velocity, state.plain_mcf
    for _ in range(nsub):
        k1 = _velocity(pts, t, vel, plain)
        k2 = _velocity([p + 0.5 * h * k for p, k in zip(pts, k1)], t + 0.5 * h, vel, plain)
        k3 = _velocity([p + 0.5 * h * k for p, k in zip(pts, k2)], t + 0.5 * h, vel, plain)
        k4 = _velocity([p + h * k for p, k in zip(pts, k3)], t + h, vel, plain)
        pts = [p + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d) for p, a, b, c, d in zip(pts, k1, k2, k3, k4)]
        t += h
    new_curves = []
    for p in pts:
        if not np.all(np.isfinite(p)):
            raise StepTooLarge("non-finite positions after the step")
        if not is_simple(p):
            raise StepTooLarge("curve self-intersects after the step")
        try:
            new_curves.append(resample_arclength(p, p.shape[0], method="fourier"))
        except DegenerateCurve as exc:
            raise StepTooLarge(str(exc)) from exc
    return replace(state, curves=tuple(new_curves), t=state.t + dt)


def evolve(state: SharpState, t_end: float, dt: float, callback=None) -> SharpState:
    """Step to ``t_end`` (last step shortened); ``callback(state)`` after every step."""
    nsteps = int(np.ceil((t_end - state.t) / dt - 1e-9))
    for k in range(nsteps):
        step = min(dt, t_end - state.t)
        if step <= 1e-15:
            break
        state = vpmcf_step(state, step)
        if callback is not None:
            callback(state)
    return state


def circle_oracle(radii, t_end: float, t_eval=None, rtol: float = 1e-12, atol: float = 1e-14):
    """Radii of disjoint circles under ``V = H - Hbar`` with zero velocity.

    ``dR_i/dt = -1/R_i + k / sum_j R_j`` with ``k`` the number of circles.
    Returns the radii at ``t_end`` or, with ``t_eval``, an array of shape
    ``(len(t_eval), k)``.
    """
    r0 = np.asarray(radii, dtype=float)
    if r0.ndim != 1 or r0.size == 0 or np.any(r0 <= 0.0):
        raise ValidationError("radii must be positive")
    k = r0.size

    def rhs(_t, r):
        return -1.0 / r + k / np.sum(r)

    def vanish(_t, r):
        return np.min(r) - 1e-9 * r0.max()

    vanish.terminal = True
    sol = solve_ivp(rhs, (0.0, t_end), r0, method="DOP853", rtol=rtol, atol=atol,
                    t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float),
                    events=vanish, dense_output=False)
    if sol.status == 1 or (sol.t_events[0].size and sol.t_events[0][0] < t_end):
        raise CircleVanished(f"a circle vanished at t={sol.t_events[0][0]:.6g}")
    if not sol.success:
        raise CircleVanished(sol.message)
    if t_eval is None:
        return sol.y[:, -1]
    return sol.y.T


def circle_oracle_rates(radii) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    return -1.0 / r + r.size / r.sum()


# ---------------------------------------------------------------------------
# height-function equation


@dataclass(frozen=True)
class HFieldState:
    """Height function ``h`` on the uniform grid ``s_i = i/N`` and the current multiplier.

    Coefficients (all on the same grid): ``drift`` is the tangential transport
    velocity in length units, ``g0`` the reaction coefficient, ``vkappa`` the
    product ``V kappa`` and ``length`` the curve length that scales ``d/ds``.
    """

    h: np.ndarray
    lam: float = 0.0
    t: float = 0.0
    drift: np.ndarray | float = 0.0
    g0: np.ndarray | float = 0.0
    vkappa: np.ndarray | float = 0.0
    length: float = 1.0
    constraint_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.h.size

    @property
    def ds(self) -> float:
        return 1.0 / self.h.size


@dataclass
class HTrajectory:
    states: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([s.lam for s in self.states])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.constraint_residual for s in self.states])

    @property
    def final(self) -> HFieldState:
        return self.states[-1]


def _grid_values(value, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise NonPeriodicInput(f"{name} must have {n} periodic samples (no repeated endpoint), got {arr.shape}")
    return arr


def _fd_laplacian_symbol(n: int, ds: float) -> np.ndarray:
    k = np.arange(n)
    return -(4.0 / ds**2) * np.sin(np.pi * k / n) ** 2


def _central_diff(h: np.ndarray, ds: float) -> np.ndarray:
    return (np.roll(h, -1) - np.roll(h, 1)) / (2.0 * ds)


def h_equation_solve(init: HFieldState, t_end: float, forcing, dt: float, sigma: float = 2.0 / 3.0,
                     coefficients: Callable | None = None, record_every: int = 1) -> HTrajectory:
    """Semi-implicit stepping of

    ``D_t h + a h_s/L - h_ss/L^2 + g0 h = -F + (2/sigma) lam``

    on the periodic grid. The Laplacian is implicit (second-order differences,
    diagonalized by FFT); transport, reaction and the forcing ``F = u.n`` are
    explicit. ``lam`` is set each step so that the discrete constraint
    ``mean(V kappa h^n) = mean((h^{n+1} - h^n)/dt)`` holds exactly.

    ``forcing(s, t)`` returns ``F`` on the grid; ``coefficients(t)``, when
    given, returns a dict overriding ``drift``, ``g0``, ``vkappa``, ``length``.
    """
    n = init.n
    if n < 8:
        raise ValidationError("need at least 8 grid points")
    ds = 1.0 / n
    s = np.arange(n) * ds
    state = init
    traj = HTrajectory([state])
    nsteps = int(np.ceil((t_end - state.t) / dt - 1e-9))
    lap = _fd_laplacian_symbol(n, ds)

    def coeffs_at(t, st):
        base = {"drift": st.drift, "g0": st.g0, "vkappa": st.vkappa, "length": st.length}
        if coefficients is not None:
            base.update(coefficients(t))
        return (_grid_values(base["drift"], n, "drift"), _grid_values(base["g0"], n, "g0"),
                _grid_values(base["vkappa"], n, "vkappa"), float(base["length"]))

    for k in range(nsteps):
        step = min(dt, t_end - state.t)
        if step <= 1e-15:
            break
        a, g, vk, L = coeffs_at(state.t, state)
        if step * np.abs(a).max() / (L * ds) > 1.0 or step * np.abs(g).max() > 1.0:
            raise CFLViolation("explicit transport/reaction step too large")
        F = _grid_values(forcing(s, state.t) if callable(forcing) else forcing, n, "forcing")
        h = state.h
        explicit = -a * _central_diff(h, ds) / L - g * h - F
        lam = 0.5 * sigma * (np.mean(vk * h) - np.mean(explicit))
        rhs = h + step * (explicit + (2.0 / sigma) * lam)
        h_new = np.real(np.fft.ifft(np.fft.fft(rhs) / (1.0 - step * lap / L**2)))
        residual = abs(np.mean(vk * h) - np.mean((h_new - h) / step))
        state = replace(state, h=h_new, lam=float(lam), t=state.t + step,
                        drift=a, g0=g, vkappa=vk, length=L, constraint_residual=float(residual))
        if (k + 1) % record_every == 0 or k == nsteps - 1:
            traj.states.append(state)
    return traj


def mean_mode_oracle(gamma: float, forcing: float, vkappa: float, sigma: float = 2.0 / 3.0):
    """Steady mean mode ``(hbar, lam)`` for constant coefficients and zero drift.

    Solves the 2x2 system ``0 = -gamma hbar - F + (2/sigma) lam`` and the
    constraint ``vkappa hbar = 0``.
    """
    A = np.array([[-gamma, 2.0 / sigma], [vkappa, 0.0]])
    b = np.array([forcing, 0.0])
    return np.linalg.solve(A, b)
