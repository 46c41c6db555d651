"""Double-well potentials and the associated surface-tension constant."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import NegativePotential, ValidationError

STANDARD_COEFFS = (0.125, 0.0, -0.25, 0.0, 0.125)  # (c^2 - 1)^2 / 8


@dataclass(frozen=True)
class Potential:
    """Even polynomial double well with minima at -1 and +1.

    ``coefficients`` are in ascending powers of ``c``. The default is the
    standard quartic ``(c^2 - 1)^2 / 8``.
    """

    kind: str = "standard"
    coefficients: tuple[float, ...] = STANDARD_COEFFS
    wells: tuple[float, float] = (-1.0, 1.0)
    _derivs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coeffs = np.trim_zeros(np.asarray(self.coefficients, dtype=float), "b")
        if coeffs.size == 0:
            raise ValidationError("potential has no coefficients")
        if coeffs.size > 5:
            raise ValidationError("user polynomials are limited to degree <= 4")
        if tuple(self.wells) != (-1.0, 1.0):
            raise ValidationError("wells must sit exactly at -1 and +1")
        if np.any(coeffs[1::2] != 0.0):
            raise ValidationError("potential must be even (odd coefficients must vanish)")
        d1 = P.polyder(coeffs)
        d2 = P.polyder(coeffs, 2)
        d3 = P.polyder(coeffs, 3)
        scale = max(1.0, float(np.abs(coeffs).max()))
        for w in (-1.0, 1.0):
            if abs(P.polyval(w, d1)) > 1e-12 * scale:
                raise ValidationError(f"f'({w:+.0f}) != 0")
            if abs(P.polyval(w, coeffs)) > 1e-12 * scale:
                raise ValidationError(f"f({w:+.0f}) != 0; wells must be zeros of f")
            if P.polyval(w, d2) <= 0.0:
                raise ValidationError(f"f''({w:+.0f}) must be positive")
        object.__setattr__(self, "coefficients", tuple(float(a) for a in coeffs))
        object.__setattr__(self, "_derivs", (coeffs, d1, d2, d3))

    @classmethod
    def standard(cls) -> "Potential":
        return cls()

    @classmethod
    def from_coefficients(cls, coefficients) -> "Potential":
        return cls(kind="user", coefficients=tuple(float(a) for a in coefficients))

    @classmethod
    def from_config(cls, value) -> "Potential":
        """Accept ``"standard"`` or a coefficient list."""
        if value is None or (isinstance(value, str) and value.lower() == "standard"):
            return cls.standard()
        if isinstance(value, str):
            raise ValidationError(f"unknown potential {value!r}")
        return cls.from_coefficients(value)

    def f(self, c):
        return P.polyval(c, self._derivs[0])

    def df(self, c):
        return P.polyval(c, self._derivs[1])

    def d2f(self, c):
        return P.polyval(c, self._derivs[2])

    def d3f(self, c):
        return P.polyval(c, self._derivs[3])

    def eval(self, c):
        """Return ``(f, f', f'', f''')`` at ``c``."""
        return self.f(c), self.df(c), self.d2f(c), self.d3f(c)

    @property
    def alpha(self) -> float:
        """Tail decay rate ``min sqrt(f''(+-1))``."""
        return float(np.sqrt(min(self.d2f(1.0), self.d2f(-1.0))))

    @property
    def stabilization(self) -> float:
        """``max |f''|`` on [-1, 1]; used as the stabilization constant."""
        s = np.linspace(-1.0, 1.0, 2001)
        return float(np.abs(self.d2f(s)).max())


def evaluate(pot: Potential, c):
    return pot.eval(c)


def sigma_from_potential(pot: Potential, epsabs: float = 1e-10) -> float:
    """Surface tension ``int_{-1}^{1} sqrt(2 f(s)) ds`` by adaptive Gauss-Kronrod."""
    nodes = np.linspace(-1.0, 1.0, 4001)
    if np.any(pot.f(nodes) < -1e-14):
        raise NegativePotential("f < 0 between the wells")

    def integrand(s):
        return np.sqrt(2.0 * max(pot.f(s), 0.0))

    value, _ = integrate.quad(integrand, -1.0, 1.0, epsabs=epsabs, epsrel=1e-12, limit=200)
    return float(value)
