"""Numerical probe of the lower spectral bound for ``-Lap + f''(c_A)/eps^2``.

The probe works on the flat cross-section: ``r in [-2 delta, 2 delta]``,
cell-centred grid, homogeneous Neumann ends. The tube-mode decomposition
projects a field near a curve onto ``theta0'`` per cross-section.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import splu

from .errors import NoConvergence, OutsideTube, ResolutionTooCoarse, TubeTooWide, ValidationError
from .geometry import Curve, _periodic_values, tube_halfwidth
from .profiles import ProfileTable


def profile_values(table: ProfileTable, name: str, rho):
    """``theta0``/``theta0_prime``/``theta1`` at arbitrary ``rho``.

    The standard quartic uses its closed form for ``theta0``; everything else
    is a cubic spline through the table, held constant beyond ``+-L``.
    """
    rho = np.asarray(rho, dtype=float)
    if table.potential.kind == "standard" and name in ("theta0", "theta0_prime"):
        t = np.tanh(rho / 2.0)
        return t if name == "theta0" else 0.5 * (1.0 - t * t)
    values = getattr(table, name)
    if values is None:
        raise ValidationError(f"profile column {name!r} not computed")
    spl = _spline_cache(table, name)
    return spl(np.clip(rho, table.rho[0], table.rho[-1]))


_SPLINES: dict = {}


def _spline_cache(table: ProfileTable, name: str):
    key = (id(table), name)
    hit = _SPLINES.get(key)
    if hit is None or hit[0] is not table:
        hit = (table, CubicSpline(table.rho, getattr(table, name)))
        _SPLINES[key] = hit
    return hit[1]


@dataclass(frozen=True)
class LinearizedOperator1D:
    """Tridiagonal ``-d^2/dr^2 + potential`` with Neumann ends."""

    r: np.ndarray
    hx: float
    potential: np.ndarray
    eps: float
    delta: float

    @property
    def size(self) -> int:
        return self.r.size

    def bands(self):
        h2 = self.hx**2
        diag = 2.0 / h2 + self.potential
        diag = diag.copy()
        diag[0] -= 1.0 / h2
        diag[-1] -= 1.0 / h2
        off = np.full(self.size - 1, -1.0 / h2)
        return diag, off

    def matrix(self):
        diag, off = self.bands()
        return sp.diags([off, diag, off], [-1, 0, 1], format="csc")

    def apply(self, u):
        u = np.asarray(u, dtype=float)
        diag, off = self.bands()
        out = diag * u
        out[:-1] += off * u[1:]
        out[1:] += off * u[:-1]
        return out

    def inner(self, u, v) -> float:
        return float(self.hx * np.dot(u, v))


def assemble_linearized_1d(table: ProfileTable, eps: float, hx: float, order: int = 1,
                           lambda0: float = 0.0, delta: float = 0.5) -> LinearizedOperator1D:
    """Potential ``f''(c_A(r))/eps^2`` with ``c_A = theta0(r/eps) + eps lambda0 theta1(r/eps)``."""
    if hx > eps / 4.0 * (1.0 + 1e-12):
        raise ResolutionTooCoarse(f"hx = {hx:.3g} > eps/4")
    if order not in (0, 1):
        raise ValidationError("order must be 0 or 1")
    m = int(round(4.0 * delta / hx))
    r = -2.0 * delta + (np.arange(m) + 0.5) * (4.0 * delta / m)
    rho = r / eps
    c = profile_values(table, "theta0", rho)
    if order == 1:
        c = c + eps * lambda0 * profile_values(table, "theta1", rho)
    pot = table.potential.d2f(c) / eps**2
    return LinearizedOperator1D(r, 4.0 * delta / m, pot, float(eps), float(delta))


def constant_operator(value: float, eps: float, hx: float, delta: float = 0.5) -> LinearizedOperator1D:
    m = int(round(4.0 * delta / hx))
    r = -2.0 * delta + (np.arange(m) + 0.5) * (4.0 * delta / m)
    return LinearizedOperator1D(r, 4.0 * delta / m, np.full(m, float(value)), float(eps), float(delta))


def smallest_eigenpair(op: LinearizedOperator1D, tol: float = 1e-8, max_iter: int = 500,
                       cross_check: bool = True):
    """Inverse iteration with a shift below the spectrum (``min potential - 1``).

    Converges when the Rayleigh quotient changes by less than ``tol`` relative.
    The eigenvector is normalized in the discrete L2 norm with a positive
    centre value. With ``cross_check`` the result is compared to a dense
    tridiagonal solver.
    """
    shift = float(op.potential.min()) - 1.0
    A = op.matrix() - shift * sp.identity(op.size, format="csc")
    lu = splu(A.tocsc())
    rng = np.random.default_rng(0)
    x = np.exp(-(op.r / (4.0 * op.eps)) ** 2) + 1e-3 * rng.standard_normal(op.size)
    x /= np.sqrt(op.inner(x, x))
    lam_old = op.inner(x, op.apply(x))
    converged = False
    for _ in range(max_iter):
        y = lu.solve(x)
        x = y / np.sqrt(op.inner(y, y))
        lam = op.inner(x, op.apply(x))
        if abs(lam - lam_old) <= tol * max(abs(lam), 1.0):
            converged = True
            break
        lam_old = lam
    if not converged:
        raise NoConvergence(f"inverse iteration did not converge in {max_iter} iterations")
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    if cross_check:
        diag, off = op.bands()
        ref = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0), eigvals_only=True)[0]
        if abs(ref - lam) > 1e-6 * max(1.0, abs(ref)):
            raise NoConvergence(f"inverse iteration {lam:.10g} disagrees with dense {ref:.10g}")
    return float(lam), x


def overlap_with_theta0_prime(op: LinearizedOperator1D, vec, table: ProfileTable) -> float:
    """``|<vec, m>|`` with ``m = theta0'(r/eps)`` normalized in discrete L2."""
    m = profile_values(table, "theta0_prime", op.r / op.eps)
    m = m / np.sqrt(op.inner(m, m))
    v = vec / np.sqrt(op.inner(vec, vec))
    return abs(op.inner(v, m))


def default_spacing(eps: float) -> float:
    """``min(eps/20, eps^2/8)``: the second-difference error on the layer
    scales like ``hx^2/eps^4``, so ``hx ~ eps^2`` keeps it uniform in ``eps``."""
    return min(eps / 20.0, eps * eps / 8.0)


def spectral_sweep(table: ProfileTable, eps_list, order: int = 1, lambda0: float = 1.0 / 3.0,
                   delta: float = 0.5, spacing=None):
    """``(eps, min eigenvalue, overlap)`` rows for each ``eps``."""
    spacing = spacing or default_spacing
    rows = []
    for eps in eps_list:
        op = assemble_linearized_1d(table, eps, spacing(eps), order, lambda0, delta)
        lam, vec = smallest_eigenpair(op)
        rows.append((float(eps), lam, overlap_with_theta0_prime(op, vec, table)))
    return rows


# ---------------------------------------------------------------------------
# tube-mode decomposition


@dataclass(frozen=True)
class TubeGrid:
    """Tensor grid ``r_i x s_j`` in ``Gamma(delta)`` with quadrature weights including ``J``."""

    curve: Curve
    delta: float
    r: np.ndarray
    wr: np.ndarray

    @classmethod
    def build(cls, curve: Curve, delta: float | None = None, nr: int = 96) -> "TubeGrid":
        delta = tube_halfwidth(curve) if delta is None else float(delta)
        if delta * curve.max_kappa >= 1.0:
            raise TubeTooWide("tube exceeds the reach of the curve")
        x, w = np.polynomial.legendre.leggauss(nr)
        return cls(curve, delta, delta * x, delta * w)

    @property
    def s(self) -> np.ndarray:
        return self.curve.s

    @property
    def jacobian(self) -> np.ndarray:
        return 1.0 - self.r[:, None] * self.curve.kappa[None, :]

    def points(self) -> np.ndarray:
        X = self.curve.points
        n = self.curve.normal
        return X[None, :, :] + self.r[:, None, None] * n[None, :, :]

    def inner(self, a, b, weighted: bool = True) -> float:
        w = self.wr[:, None] * (self.curve.speed / self.curve.n)[None, :]
        if weighted:
            w = w * self.jacobian
        return float(np.sum(w * a * b))


def tube_mode_decompose(psi, curve: Curve, eps: float, table: ProfileTable, h=None,
                        grid: TubeGrid | None = None, weighted: bool = True):
    """Split ``psi = eps^{-1/2} Z(s) beta(s) theta0'(rho) + psi_R`` per cross-section.

    ``psi`` is an array of shape ``(nr, ns)`` on ``grid`` or a callable
    ``psi(r, s)``. The projection is orthogonal in ``int . J dr`` (or in
    ``dr`` when ``weighted=False``) on each normal line; ``beta(s)`` is
    ``(int_I theta0'^2 drho)^{-1/2}`` over the cross-section ``I``.
    Returns ``(Z, psi_R, grid)``.
    """
    grid = grid or TubeGrid.build(curve)
    if grid.curve is not curve:
        raise ValidationError("tube grid belongs to a different curve")
    if np.abs(grid.r).max() >= 2.0 * grid.delta:
        raise OutsideTube("samples reach beyond the tube")
    s = grid.s
    if callable(psi):
        psi = np.asarray(psi(grid.r[:, None], s[None, :]), dtype=float)
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (grid.r.size, s.size):
        raise ValidationError(f"psi must have shape {(grid.r.size, s.size)}")
    hs = _periodic_values(h, s)
    rho = grid.r[:, None] / eps - hs[None, :]
    mode = profile_values(table, "theta0_prime", rho)
    wr = grid.wr[:, None] * (grid.jacobian if weighted else 1.0)
    coef = np.sum(wr * psi * mode, axis=0) / np.sum(wr * mode * mode, axis=0)
    # beta(s): flat rho-integral of theta0'^2 over the cross-section
    beta = 1.0 / np.sqrt(np.sum((grid.wr / eps)[:, None] * mode * mode, axis=0))
    Z = np.sqrt(eps) * coef / beta
    psi_R = psi - coef[None, :] * mode
    return Z, psi_R, grid


def mode_field(Z, curve: Curve, eps: float, table: ProfileTable, grid: TubeGrid, h=None):
    """``eps^{-1/2} Z(s) beta(s) theta0'(rho)`` on ``grid``."""
    hs = _periodic_values(h, grid.s)
    rho = grid.r[:, None] / eps - hs[None, :]
    mode = profile_values(table, "theta0_prime", rho)
    beta = 1.0 / np.sqrt(np.sum((grid.wr / eps)[:, None] * mode * mode, axis=0))
    return (np.asarray(Z) * beta)[None, :] * mode / np.sqrt(eps)


# ---------------------------------------------------------------------------
# optional 2D check


def smallest_eigenvalue_2d(c_A, grid, eps: float, table: ProfileTable, k: int = 1) -> float:
    """Lowest eigenvalue of the 5-point ``-Lap + f''(c_A)/eps^2`` on a small grid."""
    from scipy.sparse.linalg import eigsh

    ny, nx = grid.shape
    h2 = grid.h**2

    def lap1(n):
        main = np.full(n, 2.0)
        off = -np.ones(n - 1)
        m = sp.diags([off, main, off], [-1, 0, 1], format="lil")
        if grid.periodic:
            m[0, n - 1] = -1.0
            m[n - 1, 0] = -1.0
        else:
            m[0, 0] = 1.0
            m[n - 1, n - 1] = 1.0
        return m.tocsr() / h2

    A = sp.kron(sp.identity(ny), lap1(nx)) + sp.kron(lap1(ny), sp.identity(nx))
    A = A + sp.diags(table.potential.d2f(np.asarray(c_A).ravel()) / eps**2)
    shift = float(table.potential.d2f(np.asarray(c_A)).min() / eps**2) - 1.0
    vals = eigsh(A.tocsc(), k=k, sigma=shift, which="LM", return_eigenvectors=False)
    return float(np.min(vals))
