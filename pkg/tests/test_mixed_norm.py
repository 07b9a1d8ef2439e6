import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate

from heisenberg_bounds.errors import DivergenceError, InvalidArgumentError
from heisenberg_bounds.mixed_norm import (
    MixedNormParams, TestFunction, extremizer_family, general_function, indicator_ball,
    mixed_norm, mixed_norm_result, product_function, radial_function, radialize,
)
from heisenberg_bounds.numerics.montecarlo import MCSpec


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        MixedNormParams(1.0, 2.0)
    with pytest.raises(InvalidArgumentError):
        MixedNormParams(2.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        MixedNormParams(math.inf, 2.0)


def test_function_validation():
    with pytest.raises(InvalidArgumentError):
        TestFunction("radial")
    with pytest.raises(InvalidArgumentError):
        radial_function(np.ones_like, (2.0, 1.0))
    with pytest.raises(InvalidArgumentError):
        extremizer_family(None, 2.0, 0.0)


@pytest.mark.parametrize("p,pb", [(2.0, 2.0), (1.5, 3.0), (4.0, 1.0)])
def test_indicator_norm(h1, p, pb):
    # ||1_B|| = omega^(1/pbar) (1/Q)^(1/p)
    expected = h1.omega_Q ** (1 / pb) * (1 / h1.Q) ** (1 / p)
    assert mixed_norm(indicator_ball(), MixedNormParams(p, pb), h1) == pytest.approx(
        expected, rel=1e-12)


@pytest.mark.parametrize("eps", [0.5, 0.05, 1e-3])
@pytest.mark.parametrize("side", ["inner", "outer"])
def test_extremizer_norm_closed_form(h1, eps, side):
    # int r^(-1 +- p eps) over the side = 1 / (p eps)
    p = 2.0
    f = extremizer_family(h1, p, eps, side)
    expected = h1.omega_Q ** 0.5 * (p * eps) ** (-1 / p)
    res = mixed_norm_result(f, MixedNormParams(p, 2.0), h1)
    assert res.value == pytest.approx(expected, rel=1e-9)
    assert res.error_estimate <= 1e-8 * res.value


def test_extremizer_evaluates_powers(h2):
    f = extremizer_family(h2, 3.0, 0.25)
    pts = np.array([[0.5, 0, 0, 0, 0], [2.0, 0, 0, 0, 0]])
    assert np.allclose(f(pts), [0.5 ** (-2.0 + 0.25), 0.0])


def test_pbar_enters_only_through_omega(h2):
    f = radial_function(lambda r: np.exp(-r), (0.0, math.inf), 0.0)
    a = mixed_norm(f, MixedNormParams(2.5, 1.5), h2)
    b = mixed_norm(f, MixedNormParams(2.5, 4.0), h2)
    assert b / a == pytest.approx(h2.omega_Q ** (1 / 4.0 - 1 / 1.5), rel=1e-12)


def test_radial_norm_against_scipy(h1):
    R = lambda r: np.exp(-r) * (1 + 0.5 * np.cos(3 * r))
    f = radial_function(R, (0.0, math.inf), 0.0)
    p = 3.0
    inner, _ = sp_integrate.quad(lambda r: abs(R(r)) ** p * r ** 3, 0, np.inf, epsabs=0,
                                 epsrel=1e-13, limit=200)
    expected = h1.omega_Q ** 0.5 * inner ** (1 / p)
    assert mixed_norm(f, MixedNormParams(p, 2.0), h1) == pytest.approx(expected, rel=1e-10)


def _mean_theta1_squared_n1():
    # int_B y_1^2 dy = omega E[theta_1^2] / (Q + 2); the left side via the z-disc
    lhs, _ = sp_integrate.quad(lambda rho: (rho ** 2 / 2) * 2 * math.sqrt(1 - rho ** 4)
                               * 2 * math.pi * rho, 0, 1, epsrel=1e-13)
    omega = 2 * math.pi ** 2
    return lhs * 6 / omega


def test_product_norm_uses_angular_mean(h1):
    # A = 1 + theta_1 with pbar = 2: mean A^2 = 1 + E[theta_1^2]
    f = product_function(lambda r: np.ones_like(r), lambda th: 1.0 + th[..., 0], (0.0, 1.0))
    p = 2.0
    res = mixed_norm_result(f, MixedNormParams(p, 2.0), h1,
                            mc=MCSpec(sample_count=400_000, seed=5))
    expected = (h1.omega_Q * (1 + _mean_theta1_squared_n1())) ** 0.5 * (1 / 4) ** 0.5
    assert abs(res.value - expected) <= 3 * res.error_estimate


def test_shell_path_matches_radial_reduction(h1):
    f = radial_function(lambda r: r ** 0.5 * np.exp(-r), (0.2, 2.5))
    params = MixedNormParams(2.0, 3.0)
    exact = mixed_norm(f, params, h1)
    shells = mixed_norm(f, params, h1, method="shells", mc=MCSpec(256, 0))
    general = mixed_norm(f.as_general(), params, h1, mc=MCSpec(256, 0))
    assert shells == pytest.approx(exact, rel=1e-10)
    assert general == pytest.approx(exact, rel=1e-10)


def test_general_function_support_is_enforced(h1):
    g = general_function(lambda x: np.ones(np.shape(x)[:-1]), (0.0, 1.0))
    assert np.array_equal(g(np.array([[0.5, 0, 0], [1.5, 0, 0]])), [1.0, 0.0])


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-5, max_value=5).filter(lambda c: abs(c) > 1e-3),
       st.floats(min_value=0.2, max_value=5.0),
       st.floats(min_value=1.2, max_value=5.0),
       st.floats(min_value=1.0, max_value=5.0))
def test_scaling_laws(c, lam, p, pb):
    from heisenberg_bounds.group import HeisenbergSpace
    space = HeisenbergSpace(1)
    f = radial_function(lambda r: (1 + r) ** -2.0 * np.sin(r) ** 2 + 0.1, (0.0, 3.0), 0.0)
    params = MixedNormParams(p, pb)
    base = mixed_norm(f, params, space)
    assert mixed_norm(f.scaled(c), params, space) == pytest.approx(abs(c) * base, rel=1e-10)
    assert mixed_norm(f.dilated(lam), params, space) == pytest.approx(
        lam ** (-space.Q / p) * base, rel=1e-9)


def test_divergent_declared_powers(h1):
    f = radial_function(lambda r: r ** -2.0, (0.0, 1.0), origin_power=-2.0)
    with pytest.raises(DivergenceError) as exc:
        mixed_norm(f, MixedNormParams(2.0, 2.0), h1)
    assert exc.value.endpoint == "origin"
    g = radial_function(lambda r: r ** -1.0, (1.0, math.inf), tail_power=-1.0)
    with pytest.raises(DivergenceError) as exc:
        mixed_norm(g, MixedNormParams(2.0, 2.0), h1)
    assert exc.value.endpoint == "infinity"


@pytest.mark.parametrize("a", [-2.1, -2.0])
def test_undeclared_divergence_detected_by_truncation(h1, a):
    f = radial_function(lambda r: r ** a, (0.0, 1.0))
    with pytest.raises(DivergenceError):
        mixed_norm(f, MixedNormParams(2.0, 2.0), h1)


def test_undeclared_convergent_power_is_accepted(h1):
    f = radial_function(lambda r: r ** -1.9, (0.0, 1.0))
    # int_0^1 r^(-0.8) dr = 5
    assert mixed_norm(f, MixedNormParams(2.0, 2.0), h1) == pytest.approx(
        h1.omega_Q ** 0.5 * 5 ** 0.5, rel=1e-6)


def test_radialize_product_and_general(h1):
    mc = MCSpec(200_000, 9)
    f = product_function(lambda r: np.exp(-r), lambda th: 2.0 + th[..., 0] + th[..., 2],
                         (0.0, 2.0))
    g = radialize(f, h1, mc)
    # linear angular terms average to zero
    assert g.radial(np.array([1.0]))[0] == pytest.approx(2.0 * math.exp(-1.0), rel=1e-2)
    h = radialize(f.as_general(), h1, MCSpec(20_000, 9))
    assert h.radial(np.array([1.0]))[0] == pytest.approx(2.0 * math.exp(-1.0), rel=2e-2)
    r = radial_function(np.ones_like)
    assert radialize(r, h1) is r


def test_forms_agree_with_general_view(h2):
    rng = np.random.default_rng(12)
    pts = rng.normal(size=(500, 5))
    f = product_function(lambda r: np.exp(-r), lambda th: 1 + th[..., 0] ** 2, (0.0, 3.0))
    g = radial_function(lambda r: np.cos(r), (0.5, 2.0))
    for fn in (f, g):
        assert np.allclose(fn(pts), fn.as_general()(pts), rtol=1e-12, atol=0)
