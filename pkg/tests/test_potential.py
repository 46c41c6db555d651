import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsac.errors import NegativePotential, ValidationError
from nsac.potential import Potential, evaluate, sigma_from_potential


def test_values_at_well():
    f, f1, f2, f3 = evaluate(Potential.standard(), 1.0)
    assert f == 0.0 and f1 == 0.0
    assert f2 == pytest.approx(1.0, abs=1e-15)
    # (c^2-1)^2/8 has f''' = 3c, so 3 at the well
    assert f3 == pytest.approx(3.0, abs=1e-15)


def test_values_at_origin():
    f, f1, f2, f3 = evaluate(Potential.standard(), 0.0)
    assert f == pytest.approx(1 / 8) and f1 == 0.0
    assert f2 == pytest.approx(-0.5) and f3 == 0.0


def test_derivative_midpoint():
    assert Potential.standard().df(0.5) == pytest.approx(-0.1875, abs=1e-15)


def test_sigma_standard():
    assert sigma_from_potential(Potential.standard()) == pytest.approx(2 / 3, abs=1e-10)


def test_sigma_scaling():
    scaled = Potential.from_coefficients([4 * a for a in Potential.standard().coefficients])
    assert sigma_from_potential(scaled) == pytest.approx(2 * 2 / 3, abs=1e-9)


def test_alpha_and_stabilization():
    pot = Potential.standard()
    assert pot.alpha == pytest.approx(1.0)
    assert pot.stabilization == pytest.approx(1.0)


@pytest.mark.parametrize("coeffs", [[0.1, 0.0, -0.2], [1.0, 0.5, -2.0, 0.0, 1.0], [], [0.0, 0.0, -1.0, 0.0, 1.0]])
def test_rejects_bad_polynomials(coeffs):
    with pytest.raises(ValidationError):
        Potential.from_coefficients(coeffs)


def test_negative_between_wells():
    # every admissible even quartic is a(c^2-1)^2, so the guard is exercised by patching the table
    pot = Potential.from_coefficients([0.125, 0.0, -0.25, 0.0, 0.125])
    assert sigma_from_potential(pot) > 0
    object.__setattr__(pot, "_derivs", (np.array([-0.01, 0.0, 0.0]),) + pot._derivs[1:])
    with pytest.raises(NegativePotential):
        sigma_from_potential(pot)


@given(st.floats(-1.0, 1.0))
def test_nonnegative_and_symmetric(c):
    pot = Potential.standard()
    assert pot.f(c) >= 0.0
    assert pot.f(c) == pytest.approx(pot.f(-c), abs=1e-15)
    assert pot.df(c) == pytest.approx(-pot.df(-c), abs=1e-15)
