import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from vortexlab.errors import DivergentWeight, UnsupportedOrder, ValidationError
from vortexlab.weighted import (GridFunction, WeightParams, dbar_kernel_check, hardy_check,
                                poly_in_weighted_space, weighted_norm)


def bracket(z):
    return np.sqrt(1 + np.abs(z) ** 2)


def test_zero_norm():
    f = GridFunction.sample(lambda z: 0 * z, 5.0, 64)
    for flavor in ("p_lambda", "L_kp_lambda", "W_kp_lambda"):
        assert weighted_norm(f, WeightParams(3, 0.5, k=1), flavor) == 0


def test_radial_oracle():
    R = 20.0
    f = GridFunction.sample(lambda z: bracket(z) ** -3, R, 800)
    oracle = np.sqrt(integrate.quad(lambda r: (1 + r * r) ** -3 * 2 * np.pi * r, 0, R)[0])
    assert weighted_norm(f, WeightParams(2, 0)) == pytest.approx(oracle, abs=1e-4)


def test_unit_square():
    f = GridFunction.on_rectangle(lambda z: np.ones(z.shape), 0.0, 1.0, 40)
    assert weighted_norm(f, WeightParams(4, 0)) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_homogeneity(c):
    f = GridFunction.sample(lambda z: np.exp(-np.abs(z) ** 2), 4.0, 48)
    w = WeightParams(3, 0.7, k=1)
    for flavor in ("p_lambda", "L_kp_lambda", "W_kp_lambda"):
        assert weighted_norm(f.like(c * f.values), w, flavor) == pytest.approx(abs(c) * weighted_norm(f, w, flavor), rel=1e-12)


def test_norm_is_monotone():
    f = GridFunction.sample(lambda z: np.exp(-np.abs(z) ** 2), 4.0, 48)
    g = f.like(f.values * (1 + 0.5 * np.cos(f.z.real) ** 2))
    assert weighted_norm(g, WeightParams(2, 1)) >= weighted_norm(f, WeightParams(2, 1))


def test_unsupported_order():
    f = GridFunction.sample(lambda z: 0 * z, 2.0, 16)
    with pytest.raises(UnsupportedOrder):
        weighted_norm(f, WeightParams(2, 0, k=2), "W_kp_lambda")
    with pytest.raises(ValidationError):
        WeightParams(1, 0)


@pytest.mark.parametrize("k,d,lam,p,expected", [(2, 3, 0.5, 4, True), (3, 3, 0.5, 4, False),
                                                (0, 0, 1 - 2 / 4 + 0.1, 4, False)])
def test_membership_examples(k, d, lam, p, expected):
    assert poly_in_weighted_space(k, d, WeightParams(p, lam)) is expected


@given(st.integers(0, 8), st.integers(-3, 6), st.floats(-1, 3), st.floats(1.1, 8))
def test_membership_is_monotone(k, d, lam, p):
    w = WeightParams(p, lam)
    if poly_in_weighted_space(k, d, w):
        assert poly_in_weighted_space(k - 1, d, w)


def test_hardy_constant_function():
    u = GridFunction.sample(lambda z: 3 + 0 * z, 12.0, 128)
    lhs, rhs, ok = hardy_check(u, WeightParams(4, 0.5))
    assert lhs == 0 and rhs == 0 and ok


def test_hardy_bracket():
    u = GridFunction.sample(lambda z: bracket(z) ** -2, 12.0, 256)
    res = hardy_check(u, WeightParams(4, 0.5))
    assert res.constant == 4.0
    assert res.ok and 0 < res.lhs < res.rhs


def test_hardy_x1():
    u = GridFunction.sample(lambda z: z.real / bracket(z) ** 3, 12.0, 256)
    assert hardy_check(u, WeightParams(4, 0.5)).ok


def test_hardy_divergent_weight():
    u = GridFunction.sample(lambda z: 0 * z, 2.0, 16)
    with pytest.raises(DivergentWeight):
        hardy_check(u, WeightParams(2, 0.5))
    with pytest.raises(DivergentWeight):
        hardy_check(u, WeightParams(4, -0.6))


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_kernel_accounting(d):
    rep = dbar_kernel_check(d, WeightParams(4, 0.5))
    assert rep["ok"] and rep["kernel_real_dim"] == 2 + 2 * d == rep["index"]
    assert [r["in_domain"] for r in rep["monomials"]] == [True] * (d + 1) + [False]


def test_dbar_of_quadratic_is_exact():
    rep = dbar_kernel_check(2, WeightParams(4, 0.5))
    assert rep["monomials"][2]["dbar_residual"] < 1e-12


def test_kernel_outside_regime():
    with pytest.raises(ValidationError):
        dbar_kernel_check(1, WeightParams(4, 2.0))


def test_csv_roundtrip(tmp_path):
    f = GridFunction.sample(lambda z: z * np.exp(-np.abs(z)), 3.0, 16, domain="square")
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = GridFunction.from_csv(path)
    assert np.allclose(g.values, f.values, rtol=0, atol=1e-15)
