"""Mass-conserving Navier-Stokes/Allen-Cahn solver on a rectangle.

Layout: cell-centred ``c`` and ``p`` of shape ``(ny, nx)``; ``u`` on x-faces
(``u[j, i]`` at ``x = i h``) and ``v`` on y-faces (``v[j, i]`` at ``y = j h``),
also ``(ny, nx)``. With walls, ``u[:, 0]`` and ``v[0, :]`` are the wall faces
and stay zero; the opposite wall faces are implicit.

Allen-Cahn step (``a = S dt / eps^2``)::

    (1 + a) c' - dt Lap c' = (1 + a) c - dt div(c u) - dt (f'(c) - mean f'(c)) / eps^2

solved exactly by FFT (periodic) or DCT-II (homogeneous Neumann). The mean
mode is carried over unchanged, so the discrete mass is conserved to round-off.
The momentum step is explicit (centred convection, variable viscosity,
capillary force ``-eps Lap(c) grad(c)``) followed by an exact projection.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft

from . import kernels
from .errors import (
    CFLViolation,
    NoInterface,
    ProjectionDiverged,
    ResolutionTooCoarse,
    TubeTooNarrow,
    ValidationError,
)
from .geometry import Curve, cutoff_zeta, resample_arclength, signed_distance_and_project, tube_halfwidth
from .potential import Potential
from .profiles import ProfileTable

log = logging.getLogger(__name__)

PERIODIC = "periodic"
WALL = "wall"


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    bc: str = PERIODIC

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValidationError("grid needs at least 4 cells per direction")
        if self.lx <= 0 or self.ly <= 0:
            raise ValidationError("domain lengths must be positive")
        if self.bc not in (PERIODIC, WALL):
            raise ValidationError(f"bc must be {PERIODIC!r} or {WALL!r}")
        hx, hy = self.lx / self.nx, self.ly / self.ny
        if abs(hx - hy) > 1e-12 * hx:
            raise ValidationError("cells must be square (lx/nx == ly/ny)")

    @classmethod
    def square(cls, n: int, length: float = 1.0, bc: str = PERIODIC) -> "GridSpec":
        return cls(n, n, length, length, bc)

    @property
    def h(self) -> float:
        return self.lx / self.nx

    @property
    def shape(self) -> tuple:
        return (self.ny, self.nx)

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def periodic(self) -> bool:
        return self.bc == PERIODIC

    def cell_centers(self):
        x = (np.arange(self.nx) + 0.5) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y)

    def u_faces(self):
        x = np.arange(self.nx) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y)

    def v_faces(self):
        x = (np.arange(self.nx) + 0.5) * self.h
        y = np.arange(self.ny) * self.h
        return np.meshgrid(x, y)


@dataclass(frozen=True)
class DiffuseState:
    c: np.ndarray
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    t: float
    eps: float
    grid: GridSpec

    @classmethod
    def from_c(cls, grid: GridSpec, c, eps: float, t: float = 0.0) -> "DiffuseState":
        c = np.array(c, dtype=float)
        if c.shape != grid.shape:
            raise ValidationError(f"c must have shape {grid.shape}")
        z = np.zeros(grid.shape)
        return cls(c, z, z.copy(), z.copy(), float(t), float(eps), grid)

    def copy(self) -> "DiffuseState":
        return replace(self, c=self.c.copy(), u=self.u.copy(), v=self.v.copy(), p=self.p.copy())


@dataclass(frozen=True)
class Diagnostics:
    t: float
    mass: float
    energy: float
    lambda_eps: float
    dissipation: float
    div_max: float = 0.0
    c_max: float = 0.0
    mu_field: np.ndarray | None = field(default=None, repr=False, compare=False)


# ---------------------------------------------------------------------------
# transforms


class _Spectral:
    """Forward/inverse transform diagonalizing the Laplacians on ``grid``."""

    def __init__(self, grid: GridSpec, laplacian: str = "spectral"):
        if laplacian not in ("spectral", "fd"):
            raise ValidationError("laplacian must be 'spectral' or 'fd'")
        self.grid = grid
        h = grid.h
        if grid.periodic:
            kx = np.arange(grid.nx // 2 + 1)
            ky = np.fft.fftfreq(grid.ny, d=1.0 / grid.ny)
            fd = -(4.0 / h**2) * (np.sin(np.pi * kx[None, :] / grid.nx) ** 2
                                   + np.sin(np.pi * ky[:, None] / grid.ny) ** 2)
            sp = -((2.0 * np.pi * kx[None, :] / grid.lx) ** 2 + (2.0 * np.pi * ky[:, None] / grid.ly) ** 2)
            # rfft weights for Parseval sums over the half spectrum
            w = np.full(grid.nx // 2 + 1, 2.0)
            w[0] = 1.0
            if grid.nx % 2 == 0:
                w[-1] = 1.0
            self.weights = np.broadcast_to(w[None, :], fd.shape) / (grid.nx * grid.ny)
        else:
            kx = np.arange(grid.nx)
            ky = np.arange(grid.ny)
            fd = -(4.0 / h**2) * (np.sin(np.pi * kx[None, :] / (2 * grid.nx)) ** 2
                                   + np.sin(np.pi * ky[:, None] / (2 * grid.ny)) ** 2)
            sp = -((np.pi * kx[None, :] / grid.lx) ** 2 + (np.pi * ky[:, None] / grid.ly) ** 2)
            self.weights = np.ones_like(fd)
        self.poisson_symbol = fd
        self.lap_symbol = sp if laplacian == "spectral" else fd

    def forward(self, a):
        if self.grid.periodic:
            return sfft.rfft2(a)
        return sfft.dctn(a, type=2, norm="ortho")

    def inverse(self, a):
        if self.grid.periodic:
            return sfft.irfft2(a, s=self.grid.shape)
        return sfft.idctn(a, type=2, norm="ortho")

    def laplacian(self, a):
        return self.inverse(self.lap_symbol * self.forward(a))

    def dirichlet_form(self, a) -> float:
        """``sum -a Lap a`` (no ``h^2`` factor) via Parseval."""
        ah = self.forward(a)
        return float(np.sum(self.weights * (-self.lap_symbol) * np.abs(ah) ** 2))


# ---------------------------------------------------------------------------
# padding and MAC operators


def _pad_cell(a, grid: GridSpec):
    return np.pad(a, 1, mode="wrap" if grid.periodic else "edge")


def _pad_u(u, grid: GridSpec):
    if grid.periodic:
        return np.pad(u, 1, mode="wrap")
    ny, nx = grid.shape
    out = np.zeros((ny + 2, nx + 2))
    out[1:-1, 1:-1] = u
    out[1:-1, 0] = -u[:, 1]          # mirror beyond the left wall (unused)
    out[1:-1, -1] = 0.0              # right wall face
    out[0, :] = -out[1, :]           # no-slip ghosts for tangential u
    out[-1, :] = -out[-2, :]
    return out


def _pad_v(v, grid: GridSpec):
    if grid.periodic:
        return np.pad(v, 1, mode="wrap")
    ny, nx = grid.shape
    out = np.zeros((ny + 2, nx + 2))
    out[1:-1, 1:-1] = v
    out[0, 1:-1] = -v[1, :]
    out[-1, 1:-1] = 0.0              # top wall face
    out[:, 0] = -out[:, 1]
    out[:, -1] = -out[:, -2]
    return out


def _zero_wall_faces(u, v, grid: GridSpec):
    if not grid.periodic:
        u[:, 0] = 0.0
        v[0, :] = 0.0
    return u, v


def divergence(u, v, grid: GridSpec):
    Up, Vp = _pad_u(u, grid), _pad_v(v, grid)
    ny, nx = grid.shape
    return ((Up[1:ny + 1, 2:nx + 2] - Up[1:ny + 1, 1:nx + 1])
            + (Vp[2:ny + 2, 1:nx + 1] - Vp[1:ny + 1, 1:nx + 1])) / grid.h


def gradient_to_faces(phi, grid: GridSpec):
    P = _pad_cell(phi, grid)
    ny, nx = grid.shape
    gx = (P[1:ny + 1, 1:nx + 1] - P[1:ny + 1, 0:nx]) / grid.h
    gy = (P[1:ny + 1, 1:nx + 1] - P[0:ny, 1:nx + 1]) / grid.h
    return _zero_wall_faces(gx, gy, grid)


def project(u, v, grid: GridSpec, transform: _Spectral | None = None, tol: float = 1e-10):
    """Discrete Helmholtz projection; returns ``(u, v, phi)`` with ``div = 0``."""
    tr = transform or _Spectral(grid)
    div = divergence(u, v, grid)
    dh = tr.forward(div)
    sym = tr.poisson_symbol.copy()
    sym[0, 0] = 1.0
    phih = dh / sym
    phih[0, 0] = 0.0
    phi = tr.inverse(phih)
    gx, gy = gradient_to_faces(phi, grid)
    un, vn = u - gx, v - gy
    un, vn = _zero_wall_faces(un, vn, grid)
    resid = float(np.abs(divergence(un, vn, grid)).max())
    scale = max(1.0, float(np.abs(div).max()) * grid.h)
    if not np.isfinite(resid) or resid > tol * scale:
        raise ProjectionDiverged(f"post-projection divergence {resid:.3e}")
    return un, vn, phi


def strain_dissipation(u, v, nu_cell, grid: GridSpec) -> float:
    """``int 2 nu |D u|^2`` with normal strains at cells and shear at corners."""
    Up, Vp = _pad_u(u, grid), _pad_v(v, grid)
    ny, nx = grid.shape
    h = grid.h
    ux = (Up[1:ny + 1, 2:nx + 2] - Up[1:ny + 1, 1:nx + 1]) / h
    vy = (Vp[2:ny + 2, 1:nx + 1] - Vp[1:ny + 1, 1:nx + 1]) / h
    Np = _pad_cell(nu_cell, grid)
    nu_node = 0.25 * (Np[0:ny, 0:nx] + Np[0:ny, 1:nx + 1] + Np[1:ny + 1, 0:nx] + Np[1:ny + 1, 1:nx + 1])
    shear = ((Up[1:ny + 1, 1:nx + 1] - Up[0:ny, 1:nx + 1]) + (Vp[1:ny + 1, 1:nx + 1] - Vp[1:ny + 1, 0:nx])) / h
    if not grid.periodic:
        # corner nodes on the walls carry half/quarter weight; interior nodes only matter here
        shear = shear.copy()
    return float(h * h * (np.sum(2.0 * nu_cell * (ux**2 + vy**2)) + np.sum(nu_node * shear**2)))


def kinetic_energy(u, v, grid: GridSpec) -> float:
    return float(0.5 * grid.h**2 * (np.sum(u * u) + np.sum(v * v)))


def viscosity(c, nu_plus: float, nu_minus: float):
    """``nu(c) = nu- + (nu+ - nu-) clamp((c + 1)/2, 0, 1)``."""
    return nu_minus + (nu_plus - nu_minus) * np.clip(0.5 * (c + 1.0), 0.0, 1.0)


# ---------------------------------------------------------------------------
# solver


@dataclass
class SolverConfig:
    laplacian: str = "spectral"
    stabilization: float | None = None     # default: max |f''| on [-1, 1]
    c_adv: float = 0.5
    c_diff: float = 0.15
    c_ac: float = 1.0
    flow: bool = True
    keep_mu: bool = False


class DiffuseSolver:
    """Holds transforms, the potential and step-size constants for one grid/eps."""

    def __init__(self, grid: GridSpec, eps: float, potential: Potential | None = None,
                 config: SolverConfig | None = None):
        if eps <= 0:
            raise ValidationError("eps must be positive")
        self.grid = grid
        self.eps = float(eps)
        self.pot = potential or Potential.standard()
        self.cfg = config or SolverConfig()
        self.S = self.cfg.stabilization if self.cfg.stabilization is not None else self.pot.stabilization
        self.tr = _Spectral(grid, self.cfg.laplacian)

    # -- limits
    def max_dt(self, state: DiffuseState, nu_plus: float, nu_minus: float) -> float:
        h = self.grid.h
        vmax = max(float(np.abs(state.u).max()), float(np.abs(state.v).max()))
        numax = max(nu_plus, nu_minus)
        limits = [self.cfg.c_ac * self.eps**2 / max(self.S, self.pot.stabilization)]
        if self.cfg.flow:
            limits.append(self.cfg.c_diff * h * h * min(1.0, 1.0 / numax) if numax > 0 else np.inf)
            if vmax > 0:
                limits.append(self.cfg.c_adv * h / vmax)
        return float(min(limits))

    # -- pieces
    def lambda_eps(self, c) -> float:
        return float(np.mean(self.pot.df(c)) / self.eps)

    def chemical_potential(self, c, lap_c=None):
        lap_c = self.tr.laplacian(c) if lap_c is None else lap_c
        fp = self.pot.df(c)
        return -self.eps * lap_c + (fp - np.mean(fp)) / self.eps

    def energy(self, state: DiffuseState) -> float:
        h2 = self.grid.h**2
        grad = 0.5 * self.eps * self.tr.dirichlet_form(state.c)
        return float(kinetic_energy(state.u, state.v, self.grid) + h2 * (grad + np.sum(self.pot.f(state.c)) / self.eps))

    def diagnostics(self, state: DiffuseState, nu_plus: float = 1.0, nu_minus: float = 1.0) -> Diagnostics:
        lap_c = self.tr.laplacian(state.c)
        mu = self.chemical_potential(state.c, lap_c)
        h2 = self.grid.h**2
        diss = h2 * float(np.sum(mu * mu)) / self.eps
        if self.cfg.flow:
            diss += strain_dissipation(state.u, state.v, viscosity(state.c, nu_plus, nu_minus), self.grid)
        return Diagnostics(
            t=state.t, mass=mass(state), energy=self.energy(state), lambda_eps=self.lambda_eps(state.c),
            dissipation=diss, div_max=float(np.abs(divergence(state.u, state.v, self.grid)).max()),
            c_max=float(np.abs(state.c).max()), mu_field=mu if self.cfg.keep_mu else None,
        )

    def allen_cahn(self, c, u, v, dt: float):
        eps2 = self.eps**2
        a = self.S * dt / eps2
        fp = self.pot.df(c)
        explicit = (fp - np.mean(fp)) / eps2
        if self.cfg.flow:
            explicit = explicit + kernels.flux_divergence(_pad_cell(c, self.grid), _pad_u(u, self.grid),
                                                          _pad_v(v, self.grid), self.grid.h)
        rhs = (1.0 + a) * c - dt * explicit
        rh = self.tr.forward(rhs)
        ch = self.tr.forward(c)
        new_h = rh / ((1.0 + a) - dt * self.tr.lap_symbol)
        new_h[0, 0] = ch[0, 0]  # mean mode: the update is the identity
        c_new = self.tr.inverse(new_h)
        # the inverse transform leaves O(1e-16) per step in the sum; remove it so
        # round-off does not accumulate over long runs
        c_new += (np.sum(c) - np.sum(c_new)) / c.size
        return c_new

    def momentum(self, c, u, v, dt: float, nu_plus: float, nu_minus: float):
        g = self.grid
        lap_c = self.tr.laplacian(c)
        Fu, Fv = kernels.momentum_rhs(_pad_u(u, g), _pad_v(v, g), _pad_cell(c, g), _pad_cell(lap_c, g),
                                      _pad_cell(viscosity(c, nu_plus, nu_minus), g), g.h, self.eps)
        us, vs = _zero_wall_faces(u + dt * Fu, v + dt * Fv, g)
        un, vn, phi = project(us, vs, g, self.tr)
        return un, vn, phi / dt

    def step(self, state: DiffuseState, dt: float, nu_plus: float = 1.0, nu_minus: float = 1.0,
             check_cfl: bool = True) -> tuple:
        if check_cfl:
            limit = self.max_dt(state, nu_plus, nu_minus)
            if dt > limit * (1.0 + 1e-12):
                raise CFLViolation(f"dt={dt:.3e} exceeds the stability limit {limit:.3e}")
        c_new = self.allen_cahn(state.c, state.u, state.v, dt)
        if self.cfg.flow:
            u, v, p = self.momentum(c_new, state.u, state.v, dt, nu_plus, nu_minus)
        else:
            u, v, p = state.u, state.v, state.p
        if not np.all(np.isfinite(c_new)):
            raise CFLViolation("non-finite order parameter; reduce dt")
        new = replace(state, c=c_new, u=u, v=v, p=p, t=state.t + dt)
        if np.abs(c_new).max() > 1.0 + 10.0 * self.eps:
            log.warning("max|c| = %.4f exceeds 1 + O(eps)", float(np.abs(c_new).max()))
        return new, self.diagnostics(new, nu_plus, nu_minus)

    def run(self, state: DiffuseState, t_end: float, dt: float, nu_plus: float = 1.0,
            nu_minus: float = 1.0, every: int = 1, callback=None, diagnostics: bool = True):
        """Advance to ``t_end``; returns the final state and the diagnostics list."""
        nsteps = int(np.ceil((t_end - state.t) / dt - 1e-9))
        record = [self.diagnostics(state, nu_plus, nu_minus)] if diagnostics else []
        step_fn = self.step if diagnostics else self._bare_step
        for k in range(nsteps):
            step = min(dt, t_end - state.t)
            if step <= 1e-15:
                break
            state, diag = step_fn(state, step, nu_plus, nu_minus)
            if diagnostics and ((k + 1) % every == 0 or k == nsteps - 1):
                record.append(diag)
            if callback is not None:
                callback(state, diag)
        return state, record

    def _bare_step(self, state, dt, nu_plus, nu_minus):
        c_new = self.allen_cahn(state.c, state.u, state.v, dt)
        if self.cfg.flow:
            u, v, p = self.momentum(c_new, state.u, state.v, dt, nu_plus, nu_minus)
        else:
            u, v, p = state.u, state.v, state.p
        return replace(state, c=c_new, u=u, v=v, p=p, t=state.t + dt), None


def step(state: DiffuseState, dt: float, nu_plus: float, nu_minus: float, solver: DiffuseSolver | None = None,
         potential: Potential | None = None):
    solver = solver or DiffuseSolver(state.grid, state.eps, potential)
    return solver.step(state, dt, nu_plus, nu_minus)


def mass(state: DiffuseState) -> float:
    return float(state.grid.h**2 * np.sum(state.c))


def energy(state: DiffuseState, potential: Potential | None = None, laplacian: str = "spectral") -> float:
    return DiffuseSolver(state.grid, state.eps, potential, SolverConfig(laplacian=laplacian)).energy(state)


def lambda_eps(state: DiffuseState, potential: Potential | None = None) -> float:
    """``eps^-1`` times the cell average of ``f'(c)``."""
    pot = potential or Potential.standard()
    return float(np.mean(pot.df(state.c)) / state.eps)


# ---------------------------------------------------------------------------
# initial data


def layer_field(grid: GridSpec, curves, eps: float, table: ProfileTable, order: int = 0,
                lambda0: float = 0.0, h=None, delta: float | None = None):
    """``zeta(d) [theta0(rho) + eps lam0 theta1(rho)] + (1 - zeta) [+-1 + eps lam0 / f''(+-1)]``

    with ``rho = d/eps - h(s)``. Returns ``(c, d, s, zeta, component)``; ``d``
    and ``s`` are only meaningful where ``zeta > 0`` (NaN elsewhere).
    """
    curves = [curves] if isinstance(curves, Curve) else list(curves)
    if order not in (0, 1):
        raise ValidationError("order must be 0 or 1")
    if order == 1 and table.theta1 is None:
        raise ValidationError("order-1 construction needs theta1")
    if grid.h > eps / 2.0 * (1.0 + 1e-12):
        raise ResolutionTooCoarse(f"h = {grid.h:.4g} > eps/2 = {eps / 2:.4g}")
    if delta is None:
        delta = tube_halfwidth(curves, None if grid.periodic else (grid.lx, grid.ly))
    if eps > delta / 5.0 * (1.0 + 1e-9):
        raise TubeTooNarrow(f"eps = {eps:.4g} > delta/5 = {delta / 5:.4g}")

    X, Y = grid.cell_centers()
    pts = np.column_stack([X.ravel(), Y.ravel()])
    from shapely import contains_xy
    from shapely.geometry import Polygon

    inside = np.zeros(pts.shape[0], dtype=bool)
    for cv in curves:
        inside |= contains_xy(Polygon(cv.points), pts[:, 0], pts[:, 1])

    best = np.full(pts.shape[0], np.inf)
    d = np.full(pts.shape[0], np.nan)
    s = np.full(pts.shape[0], np.nan)
    comp = np.full(pts.shape[0], -1)
    for k, cv in enumerate(curves):
        _, _, dist2 = kernels.polyline_nearest(pts[:, 0], pts[:, 1], cv.x, cv.y)
        near = (dist2 < (2.0 * delta + 4.0 * cv.length / cv.n) ** 2) & (dist2 < best)
        if not np.any(near):
            continue
        tc = signed_distance_and_project(cv, pts[near], delta=delta)
        idx = np.flatnonzero(near)
        closer = np.abs(tc.r) < best[idx]
        idx = idx[closer]
        best[idx] = np.abs(tc.r[closer])
        d[idx] = tc.r[closer]
        s[idx] = tc.s[closer]
        comp[idx] = k

    zeta = np.zeros(pts.shape[0])
    band = np.isfinite(d)
    zeta[band] = cutoff_zeta(delta, d[band])
    pot = table.potential
    bulk = np.where(inside, 1.0, -1.0)
    if order == 1:
        bulk = bulk + eps * lambda0 * np.where(inside, 1.0 / pot.d2f(1.0), 1.0 / pot.d2f(-1.0))
    c = bulk.copy()
    layer = zeta > 0.0
    if np.any(layer):
        shift = np.zeros(layer.sum())
        if h is not None:
            from .geometry import _periodic_values
            if isinstance(h, (list, tuple)):
                for k in range(len(curves)):
                    sel = comp[layer] == k
                    shift[sel] = _periodic_values(h[k], s[layer][sel])
            else:
                shift = _periodic_values(h, s[layer])
        rho = d[layer] / eps - shift
        inner = table.interp("theta0", rho)
        if order == 1:
            inner = inner + eps * lambda0 * table.interp("theta1", rho)
        z = zeta[layer]
        c[layer] = z * inner + (1.0 - z) * bulk[layer]
    shape = grid.shape
    return (c.reshape(shape), d.reshape(shape), s.reshape(shape), zeta.reshape(shape), comp.reshape(shape))


def init_well_prepared(grid: GridSpec, curve, eps: float, table: ProfileTable, order: int = 0,
                       lambda0: float = 0.0, velocity=None, delta: float | None = None) -> DiffuseState:
    """Initial state from the constructed profile around ``curve`` (one curve or a list).

    ``velocity(x, y)`` (optional) is sampled on the faces and projected.
    """
    c = layer_field(grid, curve, eps, table, order, lambda0, None, delta)[0]
    state = DiffuseState.from_c(grid, c, eps)
    if velocity is not None:
        xu, yu = grid.u_faces()
        xv, yv = grid.v_faces()
        u = np.asarray(velocity(xu, yu)[0], dtype=float)
        v = np.asarray(velocity(xv, yv)[1], dtype=float)
        u, v = _zero_wall_faces(u, v, grid)
        u, v, _ = project(u, v, grid)
        state = replace(state, u=u, v=v)
    return state


# ---------------------------------------------------------------------------
# interface readout


def extract_zero_level(state_or_c, grid: GridSpec | None = None, n: int | None = 256,
                       min_points: int = 8):
    """Closed components of ``{c = 0}`` as equal-arclength :class:`Curve` objects.

    Marching squares with linear interpolation on the cell-centre lattice;
    periodic grids are padded by wrap so contours crossing the seam close.
    Returns a single curve when there is one component, otherwise a list.
    """
    from skimage import measure

    if isinstance(state_or_c, DiffuseState):
        c, grid = state_or_c.c, state_or_c.grid
    else:
        c = np.asarray(state_or_c, dtype=float)
        if grid is None:
            raise ValidationError("grid required with a raw array")
    if not (np.any(c > 0) and np.any(c < 0)):
        raise NoInterface("c has no sign change")
    h = grid.h
    pad = 0
    if grid.periodic:
        pad = 2
        c = np.pad(c, pad, mode="wrap")
    else:
        # reflect one layer so the lattice covers the walls
        c = np.pad(c, 1, mode="edge")
        pad = 1
    contours = measure.find_contours(c, 0.0)
    curves = []
    for cont in contours:
        xy = np.column_stack([(cont[:, 1] - pad + 0.5) * h, (cont[:, 0] - pad + 0.5) * h])
        closed = np.allclose(cont[0], cont[-1])
        if not closed or xy.shape[0] < min_points:
            continue
        if grid.periodic:
            cen = xy.mean(axis=0)
            if not (0.0 <= cen[0] < grid.lx and 0.0 <= cen[1] < grid.ly):
                continue  # wrapped duplicate
        pts = xy[:-1]
        # Omega+ is where c > 0: decide orientation by sampling c at the centroid side
        try:
            cv = resample_arclength(pts, n or pts.shape[0], positive_inside=True)
        except Exception:
            continue
        curves.append(cv)
    if grid.periodic:
        # drop duplicates of the same component seen through the padding
        uniq = []
        for cv in curves:
            cen = cv.points.mean(axis=0)
            if all(np.hypot(*(cen - u.points.mean(axis=0))) > 2 * h or abs(cv.length - u.length) > 2 * h
                   for u in uniq):
                uniq.append(cv)
        curves = uniq
    if not curves:
        raise NoInterface("no closed zero-level component")
    return curves[0] if len(curves) == 1 else curves


def extract_zero_level_lines(c, grid: GridSpec):
    """All zero-level polylines (open or closed) in physical coordinates."""
    from skimage import measure

    out = []
    for cont in measure.find_contours(np.asarray(c, dtype=float), 0.0):
        out.append(np.column_stack([(cont[:, 1] + 0.5) * grid.h, (cont[:, 0] + 0.5) * grid.h]))
    return out
