"""Epsilon sweeps: reference construction, diffuse runs, error norms and rate fits.

Each run writes ``eps_<value>.json`` (per-eps record), ``eps_<value>_series.csv``
and a final ``.nsac`` snapshot into the output directory. Runs whose JSON
already exists with a matching configuration fingerprint are skipped, so an
interrupted sweep resumes where it stopped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .asymptotics import build_approx_solution
from .diffuse_solver import (DiffuseSolver, DiffuseState, GridSpec, SolverConfig, extract_zero_level,
                             extract_zero_level_lines)
from .errors import GridMismatch, NoInterface, NonPositiveError, ValidationError
from .geometry import Curve, signed_distance_and_project, tube_halfwidth
from .io import write_csv, write_snapshot
from .potential import Potential
from .profiles import build_profiles
from .sharp_flow import circle_oracle

log = logging.getLogger(__name__)

SCENARIOS = ("StationaryCircle", "TwoCircles", "FlatInterface", "CoupledNSAC")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    scenario: str = "StationaryCircle"
    eps_list: list = field(default_factory=lambda: [0.08, 0.04, 0.02])
    lx: float = 4.0
    ly: float | None = None
    bc: str = "periodic"
    cells_per_eps: float = 2.56        # grid rule: h = eps / cells_per_eps (rounded to an even count)
    grid: int | None = None            # fixed nx for every eps, overrides the rule
    t_end: float = 0.05
    dt_factor: float = 0.25            # dt = dt_factor * eps^2, capped by the flow limits
    order: int = 1
    samples: int = 10
    radius: float = 1.0
    radii: list = field(default_factory=lambda: [0.5, 0.7])
    centers: list | None = None
    amplitude: float = 0.2             # CoupledNSAC initial flower
    petals: int = 5
    nu_plus: float = 1.0
    nu_minus: float = 0.1
    potential: object = "standard"
    stabilization: float | None = None  # None: 0 for TwoCircles, max|f''| otherwise
    extract_points: int = 1024
    out: str = "results"
    workers: int = 1
    snapshots: bool = True

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        self.eps_list = [float(e) for e in self.eps_list]
        if not self.eps_list or any(e <= 0 for e in self.eps_list):
            raise ValidationError("eps_list must contain positive values")
        if self.ly is None:
            self.ly = self.lx
        if self.order not in (0, 1):
            raise ValidationError("order must be 0 or 1")
        if self.t_end <= 0 or self.dt_factor <= 0 or self.samples < 1:
            raise ValidationError("t_end, dt_factor and samples must be positive")
        for eps in self.eps_list:
            g = self.grid_for(eps)
            if g.h > eps / 2.0 * (1.0 + 1e-12):
                raise ValidationError(f"grid rule gives h = {g.h:.4g} > eps/2 at eps = {eps}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "experiment" in data and isinstance(data["experiment"], dict):
            data = {**{k: v for k, v in data.items() if k != "experiment"}, **data["experiment"]}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def grid_for(self, eps: float) -> GridSpec:
        if self.grid is not None:
            nx = int(self.grid)
        else:
            nx = int(math.ceil(self.lx * self.cells_per_eps / eps - 1e-9))
            nx += nx % 2
        h = self.lx / nx
        ny = int(round(self.ly / h))
        if abs(ny * h - self.ly) > 1e-9 * self.ly:
            raise ValidationError("lx/ly ratio incompatible with square cells")
        return GridSpec(nx, ny, self.lx, self.ly, self.bc)

    def dt_for(self, eps: float) -> float:
        return self.dt_factor * eps * eps

    def fingerprint(self, eps: float) -> str:
        d = asdict(self)
        for k in ("eps_list", "out", "workers"):
            d.pop(k)
        d["eps"] = eps
        return hashlib.sha256(json.dumps(d, sort_keys=True, default=str).encode()).hexdigest()[:16]

    def solver_stabilization(self):
        # the stabilizing term slows the interface by 1/(1 + S dt/eps^2); moving fronts run without it
        if self.stabilization is not None:
            return float(self.stabilization)
        return 0.0 if self.scenario == "TwoCircles" else None

    def make_potential(self) -> Potential:
        return Potential.from_config(self.potential)


# ---------------------------------------------------------------------------
# norms and rates


def _gradient(u, grid: GridSpec):
    h = grid.h
    if grid.periodic:
        gx = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * h)
        gy = (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0)) / (2.0 * h)
        return gx, gy
    gy, gx = np.gradient(u, h)
    return gx, gy


def _laplacian5(u, grid: GridSpec):
    mode = "wrap" if grid.periodic else "edge"
    P = np.pad(u, 1, mode=mode)
    return (P[1:-1, 2:] + P[1:-1, :-2] + P[2:, 1:-1] + P[:-2, 1:-1] - 4.0 * u) / grid.h**2


def compute_error_norms(c_eps, c_A, grid: GridSpec | None = None, curve=None, delta: float | None = None,
                        normal=None, tube=None, eps: float | None = None, hausdorff: bool = False,
                        extract_points: int = 512) -> dict:
    """Norms of ``u = c_eps - c_A``.

    ``c_A`` is an array or an :class:`~nsac.asymptotics.ApproxSolution` (which
    supplies grid, eps, distance and tube). Inside the tube ``|d| < delta`` the
    gradient is split along the projected normal; a custom geometry can be
    passed as ``normal`` (shape ``(2, ny, nx)`` or a constant 2-vector) plus a
    boolean ``tube`` mask. Returned keys:

    ``L2``, ``L2_outside`` (on ``|d| >= delta``), ``grad_tau``, ``grad_n``,
    ``eps_grad_n``, ``normal_mean``, ``tangential_max``, ``H1``, ``H2`` and,
    when requested, ``hausdorff`` between ``{c_eps = 0}`` and ``curve``.
    """
    d = None
    if hasattr(c_A, "c_A"):
        approx = c_A
        grid = grid or approx.grid
        if grid != approx.grid:
            raise GridMismatch("grid differs from the approximate solution's grid")
        eps = approx.eps if eps is None else eps
        delta = approx.delta if delta is None else delta
        curve = curve if curve is not None else (list(approx.curves) if approx.curves else None)
        ref = approx.c_A
        d = approx.d
    else:
        ref = np.asarray(c_A, dtype=float)
    c_eps = np.asarray(c_eps, dtype=float)
    if grid is None:
        raise ValidationError("grid required")
    if c_eps.shape != ref.shape or c_eps.shape != grid.shape:
        raise GridMismatch(f"shapes {c_eps.shape}, {ref.shape} and grid {grid.shape} differ")

    u = c_eps - ref
    h2 = grid.h**2
    gx, gy = _gradient(u, grid)
    lap = _laplacian5(u, grid)
    out = {"L2": float(np.sqrt(h2 * np.sum(u * u)))}
    grad2 = h2 * float(np.sum(gx * gx + gy * gy))
    out["H1"] = float(np.sqrt(out["L2"] ** 2 + grad2))
    out["H2"] = float(np.sqrt(out["H1"] ** 2 + h2 * np.sum(lap * lap)))

    nx_f = ny_f = None
    curves = None if curve is None else ([curve] if isinstance(curve, Curve) else list(curve))
    if normal is not None:
        nrm = np.asarray(normal, dtype=float)
        if nrm.shape == (2,):
            nx_f = np.full(grid.shape, nrm[0])
            ny_f = np.full(grid.shape, nrm[1])
        else:
            nx_f, ny_f = nrm[0], nrm[1]
        if tube is None:
            tube = np.ones(grid.shape, dtype=bool)
    elif curves is not None:
        if delta is None:
            delta = tube_halfwidth(curves, None if grid.periodic else (grid.lx, grid.ly))
        X, Y = grid.cell_centers()
        pts = np.column_stack([X.ravel(), Y.ravel()])
        best = np.full(pts.shape[0], np.inf)
        dd = np.full(pts.shape[0], np.nan)
        nx_f = np.zeros(pts.shape[0])
        ny_f = np.zeros(pts.shape[0])
        for cv in curves:
            tc = signed_distance_and_project(cv, pts, delta=delta)
            closer = np.abs(tc.r) < best
            best[closer] = np.abs(tc.r[closer])
            dd[closer] = tc.r[closer]
            nx_f[closer] = tc.normal[closer, 0]
            ny_f[closer] = tc.normal[closer, 1]
        nx_f, ny_f = nx_f.reshape(grid.shape), ny_f.reshape(grid.shape)
        if d is None or np.isnan(d).any():
            d = dd.reshape(grid.shape)
    if tube is None and d is not None and delta is not None:
        tube = np.abs(d) < delta

    if tube is not None:
        tube = np.asarray(tube, dtype=bool)
        out["L2_outside"] = float(np.sqrt(h2 * np.sum(u[~tube] ** 2)))
    if nx_f is not None and tube is not None and np.any(tube):
        dn = (gx * nx_f + gy * ny_f)[tube]
        dt_ = (-gx * ny_f + gy * nx_f)[tube]
        out["grad_tau"] = float(np.sqrt(h2 * np.sum(dt_ * dt_)))
        out["grad_n"] = float(np.sqrt(h2 * np.sum(dn * dn)))
        out["eps_grad_n"] = out["grad_n"] * (eps if eps is not None else 1.0)
        out["normal_mean"] = float(np.mean(dn))
        out["tangential_max"] = float(np.abs(dt_).max())
    if hausdorff and curves is not None:
        out["hausdorff"] = interface_hausdorff(c_eps, grid, curves, extract_points)
    return out


def _curve_set_distance(points, curves) -> np.ndarray:
    """Distance from each point to the nearest of ``curves`` (spline projection)."""
    best = np.full(points.shape[0], np.inf)
    for cv in curves:
        best = np.minimum(best, np.abs(signed_distance_and_project(cv, points).r))
    return best


def interface_hausdorff(c, grid: GridSpec, curves, n: int = 512) -> float:
    """Hausdorff distance between the zero level of ``c`` and the sharp curves.

    Both directions project onto the smooth spline representation, so the
    value is not limited by polygon chord error.
    """
    found = extract_zero_level(c, grid, n=n)
    found = [found] if isinstance(found, Curve) else list(found)
    curves = [curves] if isinstance(curves, Curve) else list(curves)
    a = _curve_set_distance(np.vstack([cv.points for cv in found]), curves)
    b = _curve_set_distance(np.vstack([cv.points for cv in curves]), found)
    return float(max(a.max(), b.max()))


def fit_rate(eps_list, errors) -> tuple:
    """Least-squares ``log e = rate log eps + intercept``; returns ``(rate, intercept, r2)``."""
    e = np.asarray(eps_list, dtype=float)
    y = np.asarray(errors, dtype=float)
    if e.shape != y.shape or e.size < 3:
        raise ValidationError("need at least three (eps, error) pairs")
    if np.any(~np.isfinite(y)) or np.any(y <= 0) or np.any(e <= 0):
        raise NonPositiveError("eps and errors must be positive and finite")
    X, Y = np.log(e), np.log(y)
    A = np.column_stack([X, np.ones_like(X)])
    (rate, intercept), *_ = np.linalg.lstsq(A, Y, rcond=None)
    ss_res = float(np.sum((Y - A @ np.array([rate, intercept])) ** 2))
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(rate), float(intercept), float(r2)


# ---------------------------------------------------------------------------
# scenarios


def _two_circle_centers(cfg: ExperimentConfig):
    if cfg.centers is not None:
        return [tuple(c) for c in cfg.centers]
    # side by side; the layer construction does not wrap curves across the seam
    return [(0.25 * cfg.lx, 0.5 * cfg.ly), (0.75 * cfg.lx, 0.5 * cfg.ly)]


def _flat_profile(grid: GridSpec, eps: float, table, t: float = 0.0):
    """Strip ``ly/4 < y < 3ly/4`` of the + phase; straight interfaces are stationary."""
    _, Y = grid.cell_centers()
    y1, y2 = 0.25 * grid.ly, 0.75 * grid.ly
    rho = np.where(Y < 0.5 * grid.ly, Y - y1, y2 - Y) / eps
    return table.interp("theta0", rho)


class _Scenario:
    """Reference geometry and ``c_A`` as functions of time."""

    def __init__(self, cfg: ExperimentConfig, eps: float, table):
        self.cfg, self.eps, self.table = cfg, eps, table
        self.grid = cfg.grid_for(eps)
        g = self.grid
        cx, cy = 0.5 * g.lx, 0.5 * g.ly
        if cfg.scenario == "StationaryCircle":
            self.base = [Curve.circle(cfg.radius, (cx, cy), n=512)]
        elif cfg.scenario == "TwoCircles":
            self.centers = _two_circle_centers(cfg)
            self.base = [Curve.circle(r, c, n=512) for r, c in zip(cfg.radii, self.centers)]
        elif cfg.scenario == "CoupledNSAC":
            self.base = [Curve.flower(cfg.radius, cfg.amplitude, cfg.petals, (cx, cy), n=512)]
        else:
            self.base = []
        self.delta = (tube_halfwidth(self.base, None if g.periodic else (g.lx, g.ly))
                      if self.base else None)
        self._cache = {}

    def curves_at(self, t: float):
        if self.cfg.scenario == "TwoCircles":
            radii = circle_oracle(self.cfg.radii, t) if t > 0 else np.asarray(self.cfg.radii, float)
            return [Curve.circle(r, c, n=512) for r, c in zip(radii, self.centers)]
        return self.base

    def approx_at(self, t: float):
        """``(c_A array, ApproxSolution or None, curves)``."""
        if self.cfg.scenario == "FlatInterface":
            return _flat_profile(self.grid, self.eps, self.table), None, None
        if self.cfg.scenario in ("StationaryCircle", "CoupledNSAC") and "static" in self._cache:
            return self._cache["static"]
        curves = self.curves_at(t)
        delta = None if self.cfg.scenario == "TwoCircles" else self.delta
        approx = build_approx_solution(self.grid, curves, self.eps, self.table, self.cfg.order, delta=delta)
        res = (approx.c_A, approx, curves)
        if self.cfg.scenario in ("StationaryCircle", "CoupledNSAC"):
            self._cache["static"] = res
        return res


def _flat_hausdorff(c, grid: GridSpec) -> float:
    lines = extract_zero_level_lines(c, grid)
    if not lines:
        raise NoInterface("no zero level")
    ys = np.concatenate([ln[:, 1] for ln in lines])
    targets = np.array([0.25 * grid.ly, 0.75 * grid.ly])
    return float(np.abs(ys[:, None] - targets[None, :]).min(axis=1).max())


def _component_radii(c, grid: GridSpec, centers):
    found = extract_zero_level(c, grid, n=512)
    found = [found] if isinstance(found, Curve) else list(found)
    radii = []
    for cen in centers:
        best = min(found, key=lambda cv: np.hypot(*(cv.points.mean(axis=0) - np.asarray(cen))))
        radii.append(math.sqrt(abs(best.area) / math.pi))
    return radii


def run_single(cfg: ExperimentConfig, eps: float, table=None) -> dict:
    """One diffuse run at ``eps``; returns the per-eps record (also written to disk)."""
    pot = cfg.make_potential()
    table = table or build_profiles(pot)
    sc = _Scenario(cfg, eps, table)
    grid = sc.grid
    flow = cfg.scenario == "CoupledNSAC"
    solver = DiffuseSolver(grid, eps, pot, SolverConfig(flow=flow, stabilization=cfg.solver_stabilization()))
    c0, approx0, _ = sc.approx_at(0.0)
    state = DiffuseState.from_c(grid, c0, eps)
    dt = cfg.dt_for(eps)
    if flow:
        dt = min(dt, solver.max_dt(state, cfg.nu_plus, cfg.nu_minus))
    nsteps = int(math.ceil(cfg.t_end / dt - 1e-9))
    dt = cfg.t_end / nsteps
    sample_steps = sorted({max(1, round(nsteps * k / cfg.samples)) for k in range(1, cfg.samples + 1)})

    series = []
    diag0 = solver.diagnostics(state, cfg.nu_plus, cfg.nu_minus)
    e0, m0 = diag0.energy, diag0.mass
    energy_prev = e0
    max_increase = 0.0
    max_div = 0.0

    def record(st, diag):
        row = {"t": st.t, "mass": diag.mass, "energy": diag.energy, "lambda_eps": diag.lambda_eps,
               "div_max": diag.div_max}
        if not flow:
            ref, approx, curves = sc.approx_at(st.t)
            norms = compute_error_norms(st.c, approx if approx is not None else ref, grid,
                                        eps=eps, hausdorff=False)
            row.update({k: norms[k] for k in ("L2", "L2_outside", "grad_tau", "eps_grad_n", "H1", "H2")
                        if k in norms})
            if cfg.scenario == "FlatInterface":
                row["hausdorff"] = _flat_hausdorff(st.c, grid)
            else:
                row["hausdorff"] = interface_hausdorff(st.c, grid, curves, cfg.extract_points)
            if cfg.scenario == "TwoCircles":
                found = _component_radii(st.c, grid, sc.centers)
                for k, (rf, rs) in enumerate(zip(found, circle_oracle(cfg.radii, st.t))):
                    row[f"radius{k}"] = rf
                    row[f"oracle_radius{k}"] = float(rs)
        series.append(row)

    record(state, diag0)
    for k in range(1, nsteps + 1):
        state, diag = solver.step(state, dt, cfg.nu_plus, cfg.nu_minus, check_cfl=not flow)
        max_increase = max(max_increase, diag.energy - energy_prev)
        energy_prev = diag.energy
        max_div = max(max_div, diag.div_max)
        if k in sample_steps:
            record(state, diag)

    summary = {
        "eps": eps, "nx": grid.nx, "ny": grid.ny, "dt": dt, "steps": nsteps,
        "energy0": e0, "energy_final": series[-1]["energy"], "max_energy_increase": max_increase,
        "mass_drift": abs(series[-1]["mass"] - m0) / max(abs(m0), 1e-300), "max_div": max_div,
        "lambda_eps_final": series[-1]["lambda_eps"],
    }
    if not flow:
        for key in ("L2", "L2_outside", "grad_tau", "eps_grad_n", "H1", "H2", "hausdorff"):
            vals = [r[key] for r in series[1:] if key in r]
            if vals:
                summary[f"sup_{key}"] = float(max(vals))
    if approx0 is not None:
        summary["lambda0"] = approx0.lambda0
    rec = {"fingerprint": cfg.fingerprint(eps), "summary": summary, "series": series}

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = _eps_tag(eps)
    keys = list(series[0].keys())
    for r in series:
        for k in r:
            if k not in keys:
                keys.append(k)
    write_csv(out / f"eps_{tag}_series.csv", keys, [[r.get(k, float("nan")) for k in keys] for r in series])
    if cfg.snapshots:
        write_snapshot(out / f"eps_{tag}.nsac", state)
    (out / f"eps_{tag}.json").write_text(json.dumps(rec, indent=1, sort_keys=True))
    return rec


def _eps_tag(eps: float) -> str:
    return f"{eps:.6g}".replace(".", "p")


@dataclass
class ErrorReport:
    records: list
    rates: dict

    def summary_rows(self):
        keys = []
        for r in self.records:
            for k in r["summary"]:
                if k not in keys:
                    keys.append(k)
        return keys, [[r["summary"].get(k, float("nan")) for k in keys] for r in self.records]

    def value(self, key: str) -> list:
        return [r["summary"][key] for r in self.records]


def _load_existing(cfg: ExperimentConfig, eps: float):
    path = Path(cfg.out) / f"eps_{_eps_tag(eps)}.json"
    if not path.exists():
        return None
    try:
        rec = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    return rec if rec.get("fingerprint") == cfg.fingerprint(eps) else None


def _run_worker(args):
    cfg, eps = args
    return run_single(cfg, eps)


def run_experiment(cfg: ExperimentConfig) -> ErrorReport:
    """Sweep ``cfg.eps_list``; completed entries on disk are reused."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    records = {}
    todo = []
    for eps in cfg.eps_list:
        rec = _load_existing(cfg, eps)
        if rec is not None:
            log.info("eps=%g: reusing %s", eps, out)
            records[eps] = rec
        else:
            todo.append(eps)
    if todo:
        if cfg.workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
                for eps, rec in zip(todo, ex.map(_run_worker, [(cfg, e) for e in todo])):
                    records[eps] = rec
        else:
            table = build_profiles(cfg.make_potential())
            for eps in todo:
                log.info("eps=%g: running %s", eps, cfg.scenario)
                records[eps] = run_single(cfg, eps, table)
    ordered = [records[e] for e in cfg.eps_list]

    rates = {}
    eps_arr = [r["summary"]["eps"] for r in ordered]
    if len(ordered) >= 3:
        for key in ("sup_L2", "sup_hausdorff", "sup_H1", "sup_grad_tau", "sup_eps_grad_n"):
            vals = [r["summary"].get(key) for r in ordered]
            if all(v is not None and v > 0 for v in vals):
                rates[key] = fit_rate(eps_arr, vals)
    report = ErrorReport(ordered, rates)
    keys, rows = report.summary_rows()
    write_csv(out / "summary.csv", keys, rows)
    write_csv(out / "rates.csv", ["quantity", "rate", "intercept", "r2"],
              [[k, *v] for k, v in rates.items()])
    return report
