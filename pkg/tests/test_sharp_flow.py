import numpy as np
import pytest

from nsac.errors import CFLViolation, CircleVanished, NonPeriodicInput, ValidationError
from nsac.geometry import Curve
from nsac.sharp_flow import (HFieldState, SharpState, circle_oracle, circle_oracle_rates, evolve,
                             h_equation_solve, mean_mode_oracle, stable_dt, vpmcf_step)


def test_circle_stationary():
    cv = Curve.circle(1.0, n=256)
    st = SharpState.from_curves([cv])
    dt = stable_dt([cv], 0.3)
    out = evolve(st, 1.0, dt)
    r = np.hypot(out.curve.x, out.curve.y)
    assert np.abs(r - 1.0).max() <= 1e-6


def test_plain_mcf_shrinking_circle():
    cv = Curve.circle(1.0, n=128)
    st = SharpState.from_curves([cv], plain_mcf=True)
    out = evolve(st, 0.2, stable_dt([cv], 0.2))
    r = np.hypot(out.curve.x, out.curve.y).mean()
    assert r == pytest.approx(np.sqrt(1 - 2 * 0.2), abs=1e-4)


def test_flower_area_preserved_length_decreases():
    cv = Curve.flower(1.0, 0.2, 5, n=256)
    st = SharpState.from_curves([cv])
    lengths = []
    out = evolve(st, 0.2, stable_dt([cv], 0.2), lambda s: lengths.append(s.length))
    assert abs(out.enclosed_area - cv.area) <= 1e-5
    assert np.all(np.diff(lengths) <= 1e-12)


def test_two_circles_match_oracle():
    curves = [Curve.circle(1.0, (0, 0), 256), Curve.circle(2.0, (5, 0), 256)]
    st = SharpState.from_curves(curves)
    out = evolve(st, 0.2, stable_dt(curves, 0.3))
    radii = [np.sqrt(c.area / np.pi) for c in out.curves]
    assert np.allclose(radii, circle_oracle([1.0, 2.0], 0.2), atol=1e-3)


def test_step_guard():
    cv = Curve.circle(1.0, n=64)
    with pytest.raises(CFLViolation):
        vpmcf_step(SharpState.from_curves([cv]), 1.0)
    with pytest.raises(ValidationError):
        vpmcf_step(SharpState.from_curves([cv]), -1.0)


def test_oracle_rates_and_invariants():
    assert np.allclose(circle_oracle_rates([1.0, 2.0]), [-1 / 3, 1 / 6])
    assert np.allclose(circle_oracle([0.7], 1.0), [0.7])
    assert np.allclose(circle_oracle([1.0, 1.0], 1.0), [1.0, 1.0])
    r = circle_oracle([1.0, 2.0], 0.3)
    assert r[0] ** 2 + r[1] ** 2 == pytest.approx(5.0, rel=1e-10)


def test_oracle_vanishing():
    with pytest.raises(CircleVanished):
        circle_oracle([0.3, 0.5], 0.2)


def test_h_zero_solution():
    traj = h_equation_solve(HFieldState(np.zeros(32)), 0.1, lambda s, t: 0 * s, 1e-3)
    assert np.all(traj.final.h == 0.0) and np.all(traj.lambdas == 0.0)


def _manufactured_error(n):
    s = np.arange(n) / n
    init = HFieldState(np.cos(2 * np.pi * s))
    forcing = lambda s, t: -(4 * np.pi**2 - 1) * np.exp(-t) * np.cos(2 * np.pi * s)
    ds = 1.0 / n
    traj = h_equation_solve(init, 0.1, forcing, 0.2 * ds * ds)
    exact = np.exp(-traj.final.t) * np.cos(2 * np.pi * s)
    return np.sqrt(np.mean((traj.final.h - exact) ** 2)), traj


def test_h_manufactured_order_two():
    errs = [_manufactured_error(n)[0] for n in (16, 32, 64)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - 2.0) <= 0.1)


def test_h_constraint_each_step():
    n = 64
    s = np.arange(n) / n
    init = HFieldState(0.1 * np.sin(2 * np.pi * s), vkappa=1.0 + 0.5 * np.cos(2 * np.pi * s),
                       g0=0.3, drift=0.2)
    traj = h_equation_solve(init, 0.05, lambda s, t: np.cos(4 * np.pi * s) + 0.2, 1e-4)
    assert traj.residuals.max() <= 1e-8


def test_mean_mode_oracle():
    gamma, F, vk = 2.0, 0.7, 1.5
    hbar, lam = mean_mode_oracle(gamma, F, vk)
    assert hbar == pytest.approx(0.0, abs=1e-14)
    assert lam == pytest.approx((2 / 3) * F / 2)
    init = HFieldState(np.zeros(32), g0=gamma, vkappa=vk)
    traj = h_equation_solve(init, 2.0, F, 1e-3)
    assert traj.final.lam == pytest.approx(lam, rel=1e-6)
    assert np.abs(traj.final.h).max() < 1e-8


def test_h_input_validation():
    with pytest.raises(NonPeriodicInput):
        h_equation_solve(HFieldState(np.zeros(32)), 0.1, np.zeros(31), 1e-3)
    with pytest.raises(CFLViolation):
        h_equation_solve(HFieldState(np.zeros(32), g0=1e3), 0.1, 0.0, 1e-2)
