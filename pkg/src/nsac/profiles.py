"""Transversal layer structure: optimal profile, first-order corrector, solvability.

All profiles live on a symmetric uniform grid ``rho = drho * k``,
``k = -K..K``, so that ``rho = 0`` is a grid node and parity is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded

from .errors import NoHeteroclinic, ShapeMismatch, SingularSystem, ValidationError
from .potential import Potential, sigma_from_potential


@dataclass(frozen=True)
class ProfileTable:
    rho: np.ndarray
    theta0: np.ndarray
    theta0_prime: np.ndarray
    L: float
    drho: float
    alpha: float
    sigma: float
    potential: Potential
    theta1: np.ndarray | None = None
    c1: np.ndarray | None = None
    lambda0: float | None = None
    residuals: dict | None = None

    @property
    def mid(self) -> int:
        return self.rho.size // 2

    def interp(self, name: str, rho):
        """Evaluate a tabulated column at arbitrary ``rho``; constant beyond ``+-L``."""
        values = getattr(self, name)
        if values is None:
            raise ValidationError(f"profile column {name!r} not computed")
        return np.interp(rho, self.rho, values)

    def integrate(self, values, tail_rate: float | None = None) -> float:
        """Trapezoid over the table, plus an exponential tail estimate when
        ``values`` is known to decay like ``exp(-tail_rate |rho|)``."""
        values = np.asarray(values, dtype=float)
        total = np.trapezoid(values, dx=self.drho)
        if tail_rate is not None:
            total += (values[0] + values[-1]) / tail_rate
        return float(total)


def _second_difference(v, h):
    return (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)


def _fourth_order_second_difference(v, h):
    return (-v[4:] + 16.0 * v[3:-1] - 30.0 * v[2:-2] + 16.0 * v[1:-3] - v[:-4]) / (12.0 * h * h)


def _symmetric_grid(L: float, drho: float) -> np.ndarray:
    K = int(round(L / drho))
    if not np.isclose(K * drho, L, rtol=0, atol=1e-12 * max(L, 1.0)):
        raise ValidationError("L must be an integer multiple of drho")
    return drho * np.arange(-K, K + 1, dtype=float)


def solve_theta0(pot: Potential | None = None, L: float = 20.0, drho: float = 0.01) -> ProfileTable:
    """Optimal profile ``theta0'' = f'(theta0)``, ``theta0(0) = 0``, ``theta0(+-inf) = +-1``."""
    pot = pot or Potential.standard()
    if L < 10.0 or drho > 0.05:
        raise ValidationError("need L >= 10 and drho <= 0.05")
    rho = _symmetric_grid(L, drho)
    s = np.linspace(-1.0, 1.0, 4001)[1:-1]
    if np.any(pot.f(s) <= 0.0):
        raise NoHeteroclinic("f must be positive strictly between the wells")

    if pot.kind == "standard":
        theta0 = np.tanh(rho / 2.0)
        theta0_prime = 0.5 * (1.0 - theta0**2)
    else:
        # first integral theta0' = sqrt(2 f(theta0)), written for the gap g = 1 - theta0
        # with f expanded about the well so that f stays accurate as g -> 0
        well = _well_expansion(pot)

        def two_f(g):
            return 2.0 * np.maximum(P.polyval(g, well), 0.0)

        right = rho[rho.size // 2:]
        sol = solve_ivp(lambda _r, g: -np.sqrt(two_f(g)), (0.0, L), [1.0], t_eval=right,
                        method="DOP853", rtol=1e-13, atol=1e-300)
        if not sol.success:
            raise NoHeteroclinic(sol.message)
        gap = np.clip(sol.y[0], 0.0, 1.0)
        half, half_prime = 1.0 - gap, np.sqrt(two_f(gap))
        theta0 = np.concatenate([-half[:0:-1], half])
        theta0_prime = np.concatenate([half_prime[:0:-1], half_prime])

    sigma = sigma_from_potential(pot)
    table = ProfileTable(
        rho=rho, theta0=theta0, theta0_prime=theta0_prime, L=float(L), drho=float(drho),
        alpha=pot.alpha, sigma=sigma, potential=pot,
    )
    res = float(np.abs(theta0_residual(table, order=4)).max())
    return replace(table, residuals={"theta0": res})


def theta0_residual(table: ProfileTable, order: int = 4) -> np.ndarray:
    """Interior residual ``-theta0'' + f'(theta0)`` with a 2nd or 4th order stencil."""
    pot = table.potential
    if order == 2:
        return -_second_difference(table.theta0, table.drho) + pot.df(table.theta0[1:-1])
    return -_fourth_order_second_difference(table.theta0, table.drho) + pot.df(table.theta0[2:-2])


def _well_expansion(pot: Potential) -> np.ndarray:
    """Coefficients of ``f(1 - g)`` in powers of ``g`` (exact Taylor expansion)."""
    coeffs = np.asarray(pot.coefficients)
    return np.array([
        (-1.0) ** k * P.polyval(1.0, P.polyder(coeffs, k)) / math.factorial(k)
        for k in range(coeffs.size)
    ])


def _theta1_rhs(table: ProfileTable, theta0, theta0_prime):
    return 1.0 - (2.0 / table.sigma) * theta0_prime


def _dirichlet_solve(q, g, h, left, right):
    n = q.size
    ab = np.empty((3, n))
    ab[0, :] = -1.0 / (h * h)
    ab[1, :] = 2.0 / (h * h) + q
    ab[2, :] = -1.0 / (h * h)
    rhs = g.copy()
    ab[1, 0] = 1.0
    ab[0, 1] = 0.0
    rhs[0] = left
    ab[1, -1] = 1.0
    ab[2, -2] = 0.0
    rhs[-1] = right
    try:
        y = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(y)):
        raise SingularSystem("non-finite solution of the corrector system")
    return y


def solve_theta1(pot: Potential | None, table: ProfileTable) -> ProfileTable:
    """First-order corrector ``-theta1'' + f''(theta0) theta1 = 1 - (2/sigma) theta0'``.

    The far-field Dirichlet problem is solved on the table grid and on a
    grid refined by two, Richardson-combined, then pinned to ``theta1(0) = 0``
    by subtracting the matching multiple of the kernel direction ``theta0'``.
    """
    pot = pot or table.potential
    h = table.drho
    left, right = 1.0 / pot.d2f(-1.0), 1.0 / pot.d2f(1.0)

    coarse = _dirichlet_solve(pot.d2f(table.theta0), _theta1_rhs(table, table.theta0, table.theta0_prime),
                              h, left, right)
    fine_tab = solve_theta0(pot, table.L, h / 2.0) if pot.kind != "standard" else None
    if fine_tab is None:
        rho_f = _symmetric_grid(table.L, h / 2.0)
        t0f = np.tanh(rho_f / 2.0)
        t0pf = 0.5 * (1.0 - t0f**2)
    else:
        t0f, t0pf = fine_tab.theta0, fine_tab.theta0_prime
    fine = _dirichlet_solve(pot.d2f(t0f), _theta1_rhs(table, t0f, t0pf), h / 2.0, left, right)
    bounded = (4.0 * fine[::2] - coarse) / 3.0

    m = table.mid
    theta1 = bounded - (bounded[m] / table.theta0_prime[m]) * table.theta0_prime
    theta1[m] = 0.0
    out = replace(table, theta1=theta1)
    residuals = dict(table.residuals or {})
    residuals["theta1"] = float(np.abs(theta1_residual(out, order=4)).max())
    return replace(out, residuals=residuals)


def theta1_residual(table: ProfileTable, order: int = 4) -> np.ndarray:
    pot = table.potential
    g = _theta1_rhs(table, table.theta0, table.theta0_prime)
    y = table.theta1
    if order == 2:
        return -_second_difference(y, table.drho) + pot.d2f(table.theta0[1:-1]) * y[1:-1] - g[1:-1]
    return -_fourth_order_second_difference(y, table.drho) + pot.d2f(table.theta0[2:-2]) * y[2:-2] - g[2:-2]


def apply_linearized(table: ProfileTable, v) -> np.ndarray:
    """``L v = -v'' + f''(theta0) v``; central differences, one-sided at the ends."""
    v = np.asarray(v, dtype=float)
    if v.shape != table.rho.shape:
        raise ShapeMismatch(f"expected shape {table.rho.shape}, got {v.shape}")
    h = table.drho
    d2 = np.empty_like(v)
    d2[1:-1] = _second_difference(v, h)
    d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    d2[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return -d2 + table.potential.d2f(table.theta0) * v


def check_solvability(table: ProfileTable, h) -> float:
    """``int h theta0' drho``; the caller compares against its tolerance.

    ``h`` tends to constants at both ends, so ``h theta0'`` carries an
    exponential tail of rate ``alpha`` that is added to the trapezoid sum.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != table.rho.shape:
        raise ShapeMismatch(f"expected shape {table.rho.shape}, got {h.shape}")
    return table.integrate(h * table.theta0_prime, tail_rate=table.alpha)


def sigma_from_profile(table: ProfileTable) -> float:
    """rho-side surface tension ``int theta0'^2``."""
    return table.integrate(table.theta0_prime**2, tail_rate=2.0 * table.alpha)


def solve_c1(table: ProfileTable, lambda0: float) -> ProfileTable:
    """``c1 = lambda0 theta1``; the residual of the c1 equation guards the identity."""
    if table.theta1 is None:
        raise ValidationError("theta1 must be computed before c1")
    c1 = lambda0 * table.theta1
    g = -(1.0 - (2.0 / table.sigma) * table.theta0_prime) * lambda0
    res = _fourth_order_second_difference(c1, table.drho) - table.potential.d2f(table.theta0[2:-2]) * c1[2:-2] - g[2:-2]
    residuals = dict(table.residuals or {})
    residuals["c1"] = float(np.abs(res).max())
    residuals["c1_identity"] = "c1 = lambda0 * theta1"
    if residuals["c1"] > 1e-6 * max(1.0, abs(lambda0)):
        raise SingularSystem(f"c1 residual {residuals['c1']:.2e} exceeds 1e-6")
    return replace(table, c1=c1, lambda0=float(lambda0), residuals=residuals)


def build_profiles(pot: Potential | None = None, L: float = 20.0, drho: float = 0.01,
                   lambda0: float = 0.0) -> ProfileTable:
    """theta0, theta1 and c1 in one call."""
    pot = pot or Potential.standard()
    table = solve_theta0(pot, L, drho)
    table = solve_theta1(pot, table)
    return solve_c1(table, lambda0)


def tail_fit_rate(table: ProfileTable, rmin: float = 5.0, rmax: float | None = None) -> float:
    """Fitted exponential decay rate of ``|theta0 - 1|`` on ``[rmin, rmax]``."""
    rmax = rmax if rmax is not None else table.L - 1.0
    mask = (table.rho >= rmin) & (table.rho <= rmax)
    gap = 1.0 - table.theta0[mask]
    keep = gap > 1e-14
    slope, _ = np.polyfit(table.rho[mask][keep], np.log(gap[keep]), 1)
    return float(-slope)
