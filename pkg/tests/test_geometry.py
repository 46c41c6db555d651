import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nsac.errors import AmbiguousProjection, DegenerateCurve, OutsideTube, TubeTooWide
from nsac.geometry import (Curve, TubeCoords, cutoff_zeta, cutoff_zeta_prime, geometry_quantities,
                           hausdorff_distance, is_simple, polygon_area, resample_arclength,
                           signed_distance_and_project, stretched_rho, tube_halfwidth, tube_integrate)


def test_uneven_circle_resampled_to_equal_spacing():
    rng = np.random.default_rng(1)
    t = np.sort(rng.uniform(0, 2 * np.pi, 400))
    cv = resample_arclength(np.column_stack([np.cos(t), np.sin(t)]), 128)
    ang = np.unwrap(np.arctan2(cv.y, cv.x))
    steps = np.diff(np.append(ang, ang[0] + 2 * np.pi))
    assert np.abs(steps - 2 * np.pi / 128).max() <= 1e-6


def test_resample_idempotent():
    cv = Curve.circle(1.0, n=128)
    again = resample_arclength(cv, 128)
    shift = np.abs(again.points - cv.points).max()
    assert shift <= 1e-10


def test_ellipse_perimeter():
    a, b = 2.0, 1.0
    exact, _ = integrate.quad(lambda t: np.hypot(a * np.sin(t), b * np.cos(t)), 0, 2 * np.pi,
                              epsabs=1e-13, epsrel=1e-13)
    assert Curve.ellipse(a, b, n=256).length == pytest.approx(exact, abs=1e-4)
    assert exact == pytest.approx(9.6884, abs=1e-4)


def test_orientation_normalized_ccw():
    t = np.linspace(0, 2 * np.pi, 200, endpoint=False)[::-1]
    cv = resample_arclength(np.column_stack([np.cos(t), np.sin(t)]), 64)
    assert cv.area > 0


def test_circle_curvature_and_normal():
    cv = Curve.circle(1.0, n=128)
    tau, nrm, kappa = geometry_quantities(cv)
    assert np.abs(kappa - 1.0).max() <= 1e-6
    # interior normal points to the centre
    assert np.abs(nrm + cv.points).max() < 1e-10


def test_large_circle_curvature():
    assert np.abs(Curve.circle(1e3, n=256).kappa - 1e-3).max() < 1e-9


def test_ellipse_vertex_curvature():
    cv = Curve.ellipse(2.0, 1.0, n=512)
    i = int(np.argmax(cv.x))
    assert cv.kappa[i] == pytest.approx(2.0, abs=1e-4)


def test_degenerate_inputs():
    with pytest.raises(DegenerateCurve):
        resample_arclength(np.zeros((20, 2)), 32)
    with pytest.raises(DegenerateCurve):
        resample_arclength(np.array([[0, 0], [1, 0], [1, 1.0]]), 8)
    bowtie = np.array([[0, 0], [1, 1], [1, 0], [0, 1.0]])
    bowtie = np.vstack([np.linspace(bowtie[i], bowtie[(i + 1) % 4], 10, endpoint=False) for i in range(4)])
    assert not is_simple(bowtie)
    with pytest.raises(DegenerateCurve):
        resample_arclength(bowtie, 32)


def test_projection_examples():
    cv = Curve.circle(1.0, n=128)
    tc = signed_distance_and_project(cv, np.array([[2.0, 0.0]]))
    assert tc.r[0] == pytest.approx(-1.0, abs=1e-8)
    assert np.allclose(tc.foot[0], [1.0, 0.0], atol=1e-8)
    centre = signed_distance_and_project(cv, np.array([[0.0, 0.0]]))
    assert centre.r[0] == pytest.approx(1.0, abs=1e-6)


def test_strict_projection_flags_centre():
    cv = Curve.circle(1.0, n=128)
    with pytest.raises(AmbiguousProjection):
        signed_distance_and_project(cv, np.array([[0.0, 0.0]]), strict=True)


def test_reconstruction_in_tube():
    cv = Curve.flower(1.0, 0.1, 3, n=256)
    delta = tube_halfwidth(cv)
    rng = np.random.default_rng(3)
    s = rng.uniform(0, 1, 100)
    r = rng.uniform(-delta, delta, 100)
    base = cv.spline(s)
    d1 = cv.spline.derivative(1)(s)
    tang = d1 / np.linalg.norm(d1, axis=1)[:, None]
    pts = base + r[:, None] * np.column_stack([-tang[:, 1], tang[:, 0]])
    tc = signed_distance_and_project(cv, pts)
    rec = tc.foot + tc.r[:, None] * tc.normal
    assert np.abs(rec - pts).max() <= 1e-8
    assert np.abs(tc.r - r).max() <= 1e-8


def test_stretched_rho():
    one = lambda r, s=0.0: TubeCoords(np.array([r]), np.array([s]), np.array([True]),
                                      np.zeros((1, 2)), np.zeros((1, 2)), 1.0)
    assert stretched_rho(one(0.0), 0.05)[0] == 0.0
    assert stretched_rho(one(0.1), 0.05)[0] == pytest.approx(2.0)
    assert stretched_rho(one(0.1), 0.05, 0.5)[0] == pytest.approx(1.5)
    outside = TubeCoords(np.array([3.0]), np.array([0.0]), np.array([False]), np.zeros((1, 2)),
                         np.zeros((1, 2)), 1.0)
    with pytest.raises(OutsideTube):
        stretched_rho(outside, 0.05)


def test_tube_integrals():
    cv = Curve.circle(1.0, n=256)
    assert tube_integrate(cv, 0.2, lambda r, s: np.ones_like(r)) == pytest.approx(0.8 * np.pi, abs=1e-6)
    # polar oracle: int_{0.8}^{1.2} (1 - rho) rho d rho * 2 pi
    polar = 2 * np.pi * integrate.quad(lambda q: (1 - q) * q, 0.8, 1.2)[0]
    assert tube_integrate(cv, 0.2, lambda r, s: r) == pytest.approx(polar, abs=1e-8)
    odd = tube_integrate(cv, 0.2, lambda r, s: np.sin(2 * np.pi * s) + 0 * r)
    assert abs(odd) <= 1e-10
    with pytest.raises(TubeTooWide):
        tube_integrate(cv, 1.0, lambda r, s: r)


def test_cutoff():
    assert cutoff_zeta(0.1, 0.0) == 1.0
    assert cutoff_zeta(0.1, 0.2) == 0.0
    z = np.linspace(0, 0.3, 3001)
    assert (-z * cutoff_zeta_prime(0.1, z)).max() <= 4.0
    assert np.all(-z * cutoff_zeta_prime(0.1, z) >= 0.0)


def test_area_and_hausdorff():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]])
    assert polygon_area(sq) == pytest.approx(1.0)
    a = Curve.circle(1.0, n=400)
    b = Curve.circle(1.1, n=400)
    assert hausdorff_distance(a, b) == pytest.approx(0.1, abs=1e-4)


def test_tube_halfwidth_rules():
    cv = Curve.circle(0.5, (1.0, 1.0), n=128)
    assert tube_halfwidth(cv) == pytest.approx(0.2, rel=1e-8)
    assert tube_halfwidth(cv, (1.7, 2.0)) == pytest.approx(0.2 / 2.5, rel=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * np.pi))
def test_rigid_motion_invariance(radius, cx, cy, angle):
    cv = Curve.flower(radius, 0.1, 3, n=128)
    moved = cv.rotated(angle).translated((cx, cy))
    assert moved.length == pytest.approx(cv.length, rel=1e-12)
    assert moved.area == pytest.approx(cv.area, rel=1e-10)
    assert np.abs(moved.kappa - cv.kappa).max() < 1e-8 / radius
