import numpy as np
import pytest

from vortexlab import _accel, kernels
from vortexlab.grid import Grid

pytestmark = pytest.mark.skipif(_accel.numba is None, reason="numba not installed")


def both(monkeypatch, fn):
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    a = fn()
    monkeypatch.setattr(_accel, "USE_NUMBA", True)
    b = fn()
    return a, b


def close(a, b, tol):
    if isinstance(a, tuple):
        return all(close(x, y, tol) for x, y in zip(a, b))
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


@pytest.fixture
def data():
    g = Grid(6.0, 64)
    rng = np.random.default_rng(3)
    return g, rng.normal(size=(64, 64)), rng


def test_newton_residual_parity(monkeypatch, data):
    g, w, rng = data
    h0 = -np.abs(rng.normal(size=w.shape))
    src = rng.random(w.shape)
    a, b = both(monkeypatch, lambda: kernels.newton_residual(w, h0, src, g.unknowns(), g.spacing))
    assert close(a, b, 1e-11)
    assert np.all(a[~g.unknowns()] == 0)


@pytest.mark.parametrize("axis", [0, 1])
def test_diff4_parity(monkeypatch, data, axis):
    g, w, _ = data
    a, b = both(monkeypatch, lambda: kernels.diff4(w + 1j * w.T, g.spacing, axis))
    assert close(a, b, 1e-12)


def test_diff4_exact_on_quartics(data):
    g = data[0]
    X, Y = g.z.real, g.z.imag
    u = X ** 4 - 3 * X * Y ** 3 + Y ** 2
    du = kernels.diff4(u, g.spacing, 0)
    exact = 4 * X ** 3 - 3 * Y ** 3
    assert np.max(np.abs(du - exact)[2:-2, :]) < 1e-9


def test_reconstruct_parity(monkeypatch, data):
    g, w, rng = data
    dzw = rng.normal(size=w.shape) + 1j * rng.normal(size=w.shape)
    zr = np.array([0.3, -1.0])
    zi = np.array([0.1, 2.0])
    mult = np.array([2, 1])
    a, b = both(monkeypatch, lambda: kernels.reconstruct(g.z.real, g.z.imag, zr, zi, mult, w, dzw, dzw.conj()))
    assert close(a, b, 1e-12)


def test_bilinear_parity_and_exactness(monkeypatch, data):
    g, _, rng = data
    field = 2 * g.z.real - 3 * g.z.imag + 1
    pts = rng.uniform(-5, 5, 500) + 1j * rng.uniform(-5, 5, 500)
    a, b = both(monkeypatch, lambda: kernels.bilinear(field, g.origin, g.spacing, pts))
    assert close(a, b, 1e-13)
    assert np.allclose(a, 2 * pts.real - 3 * pts.imag + 1, atol=1e-12)


def test_phase_increments_parity(monkeypatch):
    z = np.exp(2j * np.pi * np.arange(100) / 100 * 3)
    a, b = both(monkeypatch, lambda: kernels.phase_increments(z))
    assert close(a, b, 1e-14)
    assert np.sum(a) == pytest.approx(6 * np.pi)


def test_backend_flag():
    assert _accel.backend() in ("numba", "numpy")
