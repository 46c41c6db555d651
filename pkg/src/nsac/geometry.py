"""Closed interface curves, signed distance, tubular coordinates and the cutoff.

Sign conventions used everywhere in the package:

* curves are stored counter-clockwise with the phase ``Omega+`` enclosed;
* the unit normal ``n = (-tau_y, tau_x)`` points into ``Omega+``;
* the signed distance ``d`` is positive in ``Omega+``, so ``grad d = n``;
* the curvature ``kappa`` is ``+1/R`` on a circle of radius ``R``, which makes
  ``Lap d = -kappa`` on the curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from shapely.geometry import LinearRing

from . import kernels
from .errors import AmbiguousProjection, DegenerateCurve, OutsideTube, TubeTooWide, ValidationError


def _as_points(xy) -> np.ndarray:
    pts = np.asarray(xy, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("curve samples must have shape (N, 2)")
    if pts.shape[0] > 1 and np.allclose(pts[0], pts[-1], rtol=0, atol=1e-14):
        pts = pts[:-1]
    return pts


def _signed_area_polygon(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _wavenumbers(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)


def _spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Derivative in the parameter ``u in [0, 1)`` of periodic samples (axis 0)."""
    n = values.shape[0]
    k = _wavenumbers(n)
    if n % 2 == 0 and order % 2 == 1:
        k = k.copy()
        k[n // 2] = 0.0
    mult = (1j * k) ** order
    spec = np.fft.fft(values, axis=0)
    return np.real(np.fft.ifft(spec * mult.reshape((-1,) + (1,) * (values.ndim - 1)), axis=0))


def _trig_eval(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant with FFT coefficients ``coeffs``
    (shape ``(N, m)``) at parameters ``u``. The Nyquist mode is split evenly."""
    n = coeffs.shape[0]
    half = n // 2
    c = coeffs[: half + 1] / n
    c = c.copy()
    c[1:half + (n % 2)] *= 2.0  # conjugate-symmetric partners folded in
    z = np.exp(2j * np.pi * np.asarray(u, dtype=float))
    # Horner in z over the non-negative frequencies
    acc = np.zeros((z.size, c.shape[1]), dtype=complex)
    for k in range(half, -1, -1):
        acc = acc * z[:, None] + c[k][None, :]
    return np.real(acc)


def is_simple(pts: np.ndarray) -> bool:
    """Non-self-intersecting closed polyline."""
    return bool(LinearRing(pts).is_simple)


@dataclass(frozen=True)
class Curve:
    """Closed curve sampled at equal arclength fractions ``s_i = i/N``.

    Build instances with :func:`resample_arclength` or the shape helpers; the
    constructor trusts its input.
    """

    points: np.ndarray
    length: float

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @cached_property
    def _derivs(self):
        d1 = _spectral_derivative(self.points, 1)
        d2 = _spectral_derivative(self.points, 2)
        speed = np.hypot(d1[:, 0], d1[:, 1])
        if np.any(speed <= 1e-12 * max(self.length, 1e-300)):
            raise DegenerateCurve("vanishing tangent")
        return d1, d2, speed

    @cached_property
    def quantities(self):
        """``(tau, normal, kappa)`` from spectral derivatives."""
        d1, d2, speed = self._derivs
        tau = d1 / speed[:, None]
        normal = np.column_stack([-tau[:, 1], tau[:, 0]])
        kappa = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
        return tau, normal, kappa

    @property
    def tau(self):
        return self.quantities[0]

    @property
    def normal(self):
        return self.quantities[1]

    @property
    def kappa(self):
        return self.quantities[2]

    @property
    def speed(self) -> np.ndarray:
        """``|dX/ds|`` on the unit parameter interval; equals ``length`` when equidistributed."""
        return self._derivs[2]

    @cached_property
    def area(self) -> float:
        """Enclosed area ``(1/2) int (x y' - y x') ds`` evaluated spectrally."""
        d1 = self._derivs[0]
        return 0.5 * float(np.mean(self.x * d1[:, 1] - self.y * d1[:, 0]))

    def mean(self, values) -> float:
        """Length-weighted mean of nodal values."""
        w = self.speed
        return float(np.sum(np.asarray(values) * w) / np.sum(w))

    def integral(self, values) -> float:
        """``int_Gamma values dH^1``."""
        return float(np.mean(np.asarray(values) * self.speed))

    @cached_property
    def spline(self) -> CubicSpline:
        u = np.append(self.s, 1.0)
        pts = np.vstack([self.points, self.points[:1]])
        return CubicSpline(u, pts, bc_type="periodic", axis=0)

    @cached_property
    def max_kappa(self) -> float:
        return float(np.abs(self.kappa).max())

    def translated(self, shift) -> "Curve":
        return Curve(self.points + np.asarray(shift, dtype=float), self.length)

    def rotated(self, angle: float, center=(0.0, 0.0)) -> "Curve":
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        center = np.asarray(center, dtype=float)
        return Curve((self.points - center) @ rot.T + center, self.length)

    # ---- shapes
    @classmethod
    def circle(cls, radius: float, center=(0.0, 0.0), n: int = 256) -> "Curve":
        t = 2.0 * np.pi * np.arange(n) / n
        pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
        return cls(pts, 2.0 * np.pi * radius)

    @classmethod
    def ellipse(cls, a: float, b: float, center=(0.0, 0.0), n: int = 256) -> "Curve":
        t = 2.0 * np.pi * np.arange(4 * n) / (4 * n)
        pts = np.column_stack([center[0] + a * np.cos(t), center[1] + b * np.sin(t)])
        return resample_arclength(pts, n)

    @classmethod
    def flower(cls, radius: float, amplitude: float, petals: int, center=(0.0, 0.0),
               n: int = 256) -> "Curve":
        t = 2.0 * np.pi * np.arange(4 * n) / (4 * n)
        r = radius * (1.0 + amplitude * np.cos(petals * t))
        pts = np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)])
        return resample_arclength(pts, n, method="fourier")

    # ---- I/O
    def to_csv(self, path) -> None:
        np.savetxt(path, self.points, delimiter=",", header="x,y", comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, n: int | None = None, positive_inside: bool = True) -> "Curve":
        pts = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return resample_arclength(pts, n, positive_inside=positive_inside)


def resample_arclength(curve, n: int | None = None, method: str = "spline",
                       positive_inside: bool = True) -> Curve:
    """Redistribute samples to equal arclength fractions.

    ``method="spline"`` interpolates the polyline with a periodic cubic spline in
    its chord-length parameter; ``method="fourier"`` keeps the trigonometric
    interpolant of the current samples, so new points lie on the same smooth curve.
    Orientation is normalized to counter-clockwise; pass ``positive_inside=False``
    when the input encloses ``Omega-`` (its orientation is then flipped).
    """
    pts = _as_points(curve.points if isinstance(curve, Curve) else curve)
    if pts.shape[0] < 16:
        raise DegenerateCurve("need at least 16 samples")
    n = int(n or pts.shape[0])
    chords = np.hypot(*np.diff(np.vstack([pts, pts[:1]]), axis=0).T)
    if chords.sum() < 1e-10:
        raise DegenerateCurve("curve length below 1e-10")
    if np.any(chords <= 1e-14 * chords.sum()):
        keep = chords > 1e-14 * chords.sum()
        pts = pts[keep]
    if not is_simple(pts):
        raise DegenerateCurve("curve is self-intersecting")
    area = _signed_area_polygon(pts)
    if (area < 0) == positive_inside:
        pts = pts[::-1].copy()

    m = max(8 * n, 2048)
    if method == "spline":
        chords = np.hypot(*np.diff(np.vstack([pts, pts[:1]]), axis=0).T)
        u = np.concatenate([[0.0], np.cumsum(chords)])
        u /= u[-1]
        spl = CubicSpline(u, np.vstack([pts, pts[:1]]), bc_type="periodic", axis=0)
        ufine = np.arange(m) / m
        speed = np.linalg.norm(spl(ufine, 1), axis=1)

        def position(uq):
            return spl(np.mod(uq, 1.0))
    elif method == "fourier":
        coeffs = np.fft.fft(pts, axis=0)
        k = _wavenumbers(pts.shape[0])
        if pts.shape[0] % 2 == 0:
            k[pts.shape[0] // 2] = 0.0
        # speed on a fine grid by zero-padded spectral differentiation
        dspec = coeffs * (1j * k)[:, None]
        ufine = np.arange(m) / m
        padded = np.zeros((m, 2), dtype=complex)
        half = pts.shape[0] // 2
        padded[:half] = dspec[:half]
        padded[-half:] = dspec[-half:]
        deriv = np.real(np.fft.ifft(padded, axis=0)) * (m / pts.shape[0])
        speed = np.hypot(deriv[:, 0], deriv[:, 1])

        def position(uq):
            return _trig_eval(coeffs, np.mod(uq, 1.0))
    else:
        raise ValidationError(f"unknown resampling method {method!r}")

    # cumulative arclength of a periodic function: spectral integration of the speed
    sh = np.fft.fft(speed)
    total = float(np.real(sh[0]) / m)
    kf = _wavenumbers(m)
    kf[0] = 1.0
    integ = sh / (1j * kf)
    integ[0] = 0.0
    if m % 2 == 0:
        integ[m // 2] = 0.0
    wiggle = np.real(np.fft.ifft(integ))
    cum = total * ufine + wiggle - wiggle[0]
    cum_ext = np.concatenate([cum, [total]])
    u_ext = np.concatenate([ufine, [1.0]])
    targets = total * np.arange(n) / n
    inverse = CubicSpline(cum_ext, u_ext)
    unew = inverse(targets)
    new_pts = position(unew)
    if not np.all(np.isfinite(new_pts)):
        raise DegenerateCurve("non-finite resampled curve")
    return Curve(np.ascontiguousarray(new_pts), total)


def geometry_quantities(curve: Curve):
    """``(tau, n, kappa)`` at the samples."""
    return curve.quantities


def tube_halfwidth(curve: Curve | list, domain=None) -> float:
    """``delta = min(0.4/max|kappa|, dist(Gamma, boundary)/2.5)``.

    ``domain`` is ``(lx, ly)`` for the box ``[0, lx] x [0, ly]``; ``None``
    means no wall constraint (periodic or unbounded).
    """
    curves = curve if isinstance(curve, (list, tuple)) else [curve]
    delta = min(0.4 / max(c.max_kappa, 1e-12) for c in curves)
    if domain is not None:
        lx, ly = domain
        dist = min(float(np.min(np.concatenate([c.x, lx - c.x, c.y, ly - c.y]))) for c in curves)
        delta = min(delta, dist / 2.5)
    if len(curves) > 1:
        gap = np.inf
        for i, a in enumerate(curves):
            for b in curves[i + 1:]:
                dd = np.hypot(a.x[:, None] - b.x[None, :], a.y[:, None] - b.y[None, :])
                gap = min(gap, float(dd.min()))
        delta = min(delta, gap / 4.5)
    return float(delta)


@dataclass(frozen=True)
class TubeCoords:
    """Batch tubular coordinates of query points.

    ``x = X0(s) + r n(s)`` with ``n`` the interior normal at the foot point.
    """

    r: np.ndarray
    s: np.ndarray
    inside_tube: np.ndarray
    foot: np.ndarray
    normal: np.ndarray
    delta: float


def signed_distance_and_project(curve: Curve, x, delta: float | None = None,
                                strict: bool = False, newton_iters: int = 40) -> TubeCoords:
    """Signed distance (positive in ``Omega+``) and foot-point parameter.

    A coarse polyline scan seeds a Newton iteration on the periodic cubic
    spline through the samples. With ``strict=True``, points at least one
    reach away whose nearest foot is not unique (two feet within 1e-9 in
    distance) raise :class:`AmbiguousProjection`.
    """
    pts = np.asarray(x, dtype=float)
    shape = pts.shape[:-1]
    q = pts.reshape(-1, 2)
    delta = tube_halfwidth(curve) if delta is None else float(delta)

    seg, t, _ = kernels.polyline_nearest(q[:, 0], q[:, 1], curve.x, curve.y)
    u = (seg + t) / curve.n
    spl = curve.spline
    d1s = spl.derivative(1)
    d2s = spl.derivative(2)
    for _ in range(newton_iters):
        um = np.mod(u, 1.0)
        X = spl(um)
        X1 = d1s(um)
        X2 = d2s(um)
        w = X - q
        g = np.einsum("ij,ij->i", w, X1)
        hess = np.einsum("ij,ij->i", X1, X1) + np.einsum("ij,ij->i", w, X2)
        hess = np.where(hess > 0.0, hess, np.einsum("ij,ij->i", X1, X1))
        step = g / hess
        u = u - step
        if np.max(np.abs(step)) < 1e-15:
            break
    u = np.mod(u, 1.0)
    foot = spl(u)
    tangent = d1s(u)
    tangent /= np.linalg.norm(tangent, axis=1)[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    r = np.einsum("ij,ij->i", q - foot, normal)

    if strict:
        reach = 1.0 / max(curve.max_kappa, 1e-12)
        far = np.abs(r) >= reach * (1.0 - 1e-6)
        if np.any(far):
            dv = np.hypot(q[far, 0:1] - curve.x[None, :], q[far, 1:2] - curve.y[None, :])
            order = np.argsort(dv, axis=1)
            best = order[:, 0]
            for row, b in enumerate(best):
                sep = np.abs(((order[row] - b + curve.n // 2) % curve.n) - curve.n // 2)
                rivals = order[row][sep > max(2, curve.n // 16)]
                if rivals.size and dv[row, rivals[0]] - dv[row, b] < 1e-9:
                    raise AmbiguousProjection("two foot points tie beyond the reach")

    return TubeCoords(
        r=r.reshape(shape), s=u.reshape(shape), inside_tube=(np.abs(r) < 2.0 * delta).reshape(shape),
        foot=foot.reshape(shape + (2,)), normal=normal.reshape(shape + (2,)), delta=delta,
    )


def _periodic_values(h, s):
    if h is None:
        return np.zeros_like(np.asarray(s, dtype=float))
    if callable(h):
        return np.asarray(h(s), dtype=float)
    h = np.asarray(h, dtype=float)
    if h.ndim == 0:
        return np.full_like(np.asarray(s, dtype=float), float(h))
    grid = np.arange(h.size + 1) / h.size
    return np.interp(np.mod(s, 1.0), grid, np.append(h, h[0]))


def stretched_rho(tc: TubeCoords, eps: float, h=None):
    """``rho = r/eps - h(s)``; ``h`` may be a callable, scalar or samples on the ``s``-grid."""
    if not np.all(tc.inside_tube):
        raise OutsideTube("query point outside the tube |r| < 2 delta")
    return tc.r / eps - _periodic_values(h, tc.s)


def tube_integrate(curve: Curve, delta_p: float, integrand, nr: int = 48) -> float:
    """``int_{|r|<delta'} integrand(r, s) (1 - r kappa(s)) |X'(s)| ds dr``.

    Gauss-Legendre in ``r`` and the periodic trapezoid rule in ``s``.
    """
    kappa = curve.kappa
    if delta_p * np.abs(kappa).max() >= 1.0:
        raise TubeTooWide("Jacobian 1 - r kappa vanishes inside the band")
    xg, wg = np.polynomial.legendre.leggauss(nr)
    r = delta_p * xg[:, None]
    s = curve.s[None, :]
    jac = 1.0 - r * kappa[None, :]
    vals = np.asarray(integrand(r, s), dtype=float)
    vals = np.broadcast_to(vals, jac.shape)
    w = (delta_p * wg)[:, None] * (curve.speed / curve.n)[None, :]
    return float(np.sum(vals * jac * w))


def cutoff_zeta(delta: float, z):
    """``zeta = 1`` on ``|z| <= delta``, 0 on ``|z| >= 2 delta``, quintic smoothstep between."""
    z = np.abs(np.asarray(z, dtype=float))
    t = np.clip((z - delta) / delta, 0.0, 1.0)
    return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def cutoff_zeta_prime(delta: float, z):
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    t = np.clip((a - delta) / delta, 0.0, 1.0)
    return -np.sign(z) * 30.0 * t * t * (1.0 - t) ** 2 / delta


def polygon_area(pts) -> float:
    """Shoelace area of a closed polyline (positive for counter-clockwise)."""
    return _signed_area_polygon(_as_points(pts))


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two closed polylines, using
    point-to-segment distances in both directions."""
    pa = a.points if isinstance(a, Curve) else _as_points(a)
    pb = b.points if isinstance(b, Curve) else _as_points(b)
    _, _, d_ab = kernels.polyline_nearest(pa[:, 0], pa[:, 1], pb[:, 0], pb[:, 1])
    _, _, d_ba = kernels.polyline_nearest(pb[:, 0], pb[:, 1], pa[:, 0], pa[:, 1])
    return float(np.sqrt(max(d_ab.max(), d_ba.max())))
