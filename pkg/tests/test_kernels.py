import numpy as np
import pytest

from nsac import kernels


def _backends():
    out = [kernels.get_backend("python")]
    try:
        out.append(kernels.get_backend("cython"))
    except ImportError:
        pass
    return out


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif(len(_backends()) < 2, reason="compiled extension not built")
def test_backends_agree():
    py, cy = _backends()
    rng = np.random.default_rng(5)
    n = 40
    arrs = [rng.standard_normal((n + 2, n + 2)) for _ in range(5)]
    arrs[4] = 0.1 + np.abs(arrs[4])
    a = py.momentum_rhs(*arrs, 0.02, 0.05)
    b = cy.momentum_rhs(*arrs, 0.02, 0.05)
    for x, y in zip(a, b):
        assert np.abs(x - y).max() <= 1e-10 * max(1.0, np.abs(x).max())
    f1 = py.flux_divergence(arrs[0], arrs[1], arrs[2], 0.02)
    f2 = cy.flux_divergence(arrs[0], arrs[1], arrs[2], 0.02)
    assert np.abs(f1 - f2).max() <= 1e-12 * np.abs(f1).max()
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    q = rng.random((300, 2)) * 2 - 1
    r1 = py.polyline_nearest(q[:, 0], q[:, 1], np.cos(t), np.sin(t))
    r2 = cy.polyline_nearest(q[:, 0], q[:, 1], np.cos(t), np.sin(t))
    assert np.array_equal(r1[0], r2[0])
    assert np.allclose(r1[2], r2[2], atol=1e-14)


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.BACKEND)
def test_nearest_on_square(mod):
    vx = np.array([0.0, 1.0, 1.0, 0.0])
    vy = np.array([0.0, 0.0, 1.0, 1.0])
    seg, t, d2 = mod.polyline_nearest(np.array([0.5, 2.0]), np.array([-1.0, 0.5]), vx, vy)
    assert seg[0] == 0 and t[0] == pytest.approx(0.5) and d2[0] == pytest.approx(1.0)
    assert seg[1] == 1 and t[1] == pytest.approx(0.5) and d2[1] == pytest.approx(1.0)
