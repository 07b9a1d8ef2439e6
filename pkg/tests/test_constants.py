import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heisenberg_bounds.constants import (
    ConstantRequest, I_m, I_m_quadrature, I_m_recursion, constant_Dm, constant_E,
    constant_G, hlp_pieces, radial_constant_integral, sharp_constant,
)
from heisenberg_bounds.errors import DivergenceError, DomainError, InvalidArgumentError
from heisenberg_bounds.group import HeisenbergSpace
from heisenberg_bounds.numerics.quadrature import QuadratureSpec
from heisenberg_bounds.operators import custom_kernel

from oracle_values import HILBERT_Q4_P2, I2_QUARTERS, OMEGA_4


def req(n=1, p=2.0, pb_in=2.0, pb_out=2.0, op="hilbert", **kw):
    return ConstantRequest(HeisenbergSpace(n), p, pb_in, pb_out, op, **kw)


def test_hilbert_constant_q4_p2():
    rep = constant_E(req())
    assert rep.closed_form_value == pytest.approx(HILBERT_Q4_P2, rel=1e-14)
    assert rep.relative_gap <= 1e-10
    assert rep.value == rep.closed_form_value
    assert rep.literature_omega_value == pytest.approx(2 * HILBERT_Q4_P2, rel=1e-13)
    assert "omega_Q" in rep.omega_convention


@pytest.mark.parametrize("p", [1.5, 3.0, 5.0])
@pytest.mark.parametrize("n", [1, 2])
def test_hilbert_constant_against_beta(n, p):
    space = HeisenbergSpace(n)
    rep = constant_E(req(n, p))
    expected = space.omega_Q / space.Q * float(mpmath.beta(1 - 1 / p, 1 / p))
    assert rep.closed_form_value == pytest.approx(expected, rel=1e-13)
    assert rep.relative_gap <= 1e-9


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("n", [1, 2])
def test_hlp_constant(n, p):
    space = HeisenbergSpace(n)
    Q = space.Q
    rep = constant_G(req(n, p, op="hlp"))
    # int_{|y|<=1} |y|^-Q/p + int_{|y|>=1} |y|^(-Q/p-Q), in polar form
    expected = space.omega_Q * (1 / (Q - Q / p) + 1 / (Q / p))
    assert rep.closed_form_value == pytest.approx(expected, rel=1e-13)
    assert rep.relative_gap <= 1e-10
    i0, i1 = hlp_pieces(space, p)
    assert i0.value == pytest.approx(space.omega_Q / (Q - Q / p), rel=1e-11)
    assert i1.value == pytest.approx(space.omega_Q * p / Q, rel=1e-11)


def test_inner_exponent_prefactor():
    base = constant_E(req())
    other = constant_E(req(pb_in=1.5, pb_out=3.0))
    assert other.closed_form_value / base.closed_form_value == pytest.approx(
        OMEGA_4 ** (1 / 3 - 1 / 1.5), rel=1e-13)
    assert other.relative_gap <= 1e-10


def test_custom_kernel_quadrature_only():
    k = custom_kernel(4, lambda r: np.exp(-np.asarray(r)), 0.0, None)
    rep = constant_E(req(op="custom", kernel=k))
    # omega int_0^inf e^-rho rho drho = omega
    assert math.isnan(rep.closed_form_value) and math.isnan(rep.relative_gap)
    assert rep.quadrature_value == pytest.approx(OMEGA_4, rel=1e-10)
    assert any("custom" in n for n in rep.notes)


def test_divergence_named_endpoint():
    slow_tail = custom_kernel(4, lambda r: 1 / (1 + np.asarray(r) ** 2), 0.0, -2.0)
    with pytest.raises(DivergenceError) as exc:
        constant_E(req(op="custom", kernel=slow_tail))
    assert exc.value.endpoint == "infinity"
    spike = custom_kernel(4, lambda r: np.asarray(r) ** -3.0 / (1 + np.asarray(r) ** 1.0),
                          -3.0, -4.0)
    with pytest.raises(DivergenceError) as exc:
        radial_constant_integral(spike, 2.0, 4)
    assert exc.value.endpoint == "origin"


def test_request_validation():
    with pytest.raises(InvalidArgumentError):
        req(p=1.0)
    with pytest.raises(InvalidArgumentError):
        req(op="mystery")
    with pytest.raises(InvalidArgumentError):
        req(op="custom")
    with pytest.raises(InvalidArgumentError, match="sum 1/p_i"):
        req(op="mlinear", m=2, p_list=(3.0, 3.0))
    with pytest.raises(InvalidArgumentError):
        req(op="mlinear", m=2, p_list=(4.0,))


# -- I_m -----------------------------------------------------------------------

def test_im_quarters_oracle():
    assert I_m(2.0, [0.25, 0.25]) == pytest.approx(I2_QUARTERS, rel=1e-14)
    assert I_m_recursion(2.0, [0.25, 0.25]) == pytest.approx(I2_QUARTERS, rel=1e-14)
    assert I_m_quadrature(2.0, [0.25, 0.25]).value == pytest.approx(I2_QUARTERS, rel=1e-8)


def test_im_one_variable_is_beta():
    for a, b in [(1.0, 0.5), (2.5, 0.3), (0.4, 0.9)]:
        assert I_m(a, [b]) == pytest.approx(float(mpmath.beta(1 - b, a + b - 1)), rel=1e-13)


def _mp_im(a, betas):
    m = len(betas)
    val = mpmath.gamma(a - m + sum(betas)) / mpmath.gamma(a)
    for b in betas:
        val *= mpmath.gamma(1 - b)
    return float(val)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0.02, max_value=0.98), min_size=1, max_size=4),
       st.floats(min_value=0.05, max_value=4.0))
def test_im_identities(betas, margin):
    a = len(betas) - sum(betas) + margin
    closed = I_m(a, betas)
    assert closed == pytest.approx(_mp_im(a, betas), rel=1e-11)
    assert I_m_recursion(a, betas) == pytest.approx(closed, rel=1e-11)
    assert I_m(a, betas[::-1]) == pytest.approx(closed, rel=1e-13)


def test_im_large_arguments_use_logs():
    assert I_m(150.0, [0.5, 0.5]) == pytest.approx(_mp_im(150.0, [0.5, 0.5]), rel=1e-10)


@pytest.mark.slow
def test_im_quadrature_three_variables():
    # the error estimate is pessimistic: the true error here is near 1e-9
    betas = [0.3, 0.5, 0.6]
    res = I_m_quadrature(2.5, betas, QuadratureSpec(rel_tol=1e-5))
    assert res.value == pytest.approx(I_m(2.5, betas), rel=1e-6)


@pytest.mark.parametrize("a,betas,msg", [
    (2.0, [1.0], "beta_1"),
    (2.0, [0.5, 0.0], "beta_2"),
    (-1.0, [0.5], "a > 0"),
    (0.6, [0.2, 0.3], "a - m"),
])
def test_im_domain_messages(a, betas, msg):
    with pytest.raises(DomainError, match=msg):
        I_m(a, betas)


# -- D_m -----------------------------------------------------------------------

def test_dm_bilinear_quarters():
    rep = constant_Dm(req(op="mlinear", m=2, p_list=(4.0, 4.0)))
    expected = (OMEGA_4 / 4) ** 2 * I2_QUARTERS
    assert rep.closed_form_value == pytest.approx(expected, rel=1e-13)
    assert rep.closed_form_value == pytest.approx(64.816, abs=5e-4)
    assert rep.relative_gap <= 1e-7
    # radial inputs carry one omega^(1/pbar) per input
    assert rep.radial_operator_value == pytest.approx(expected * OMEGA_4 ** -0.5, rel=1e-13)
    assert len(rep.notes) == 2


def test_dm_one_equals_hilbert():
    d1 = constant_Dm(req(op="mlinear", m=1))
    assert d1.closed_form_value == pytest.approx(HILBERT_Q4_P2, rel=1e-13)
    assert sharp_constant(req(op="mlinear", m=1)).closed_form_value == pytest.approx(
        HILBERT_Q4_P2, rel=1e-13)


def test_dm_trilinear_has_no_quadrature():
    rep = sharp_constant(req(op="mlinear", m=3, p_list=(6.0, 6.0, 6.0)))
    assert math.isnan(rep.quadrature_value)
    assert rep.closed_form_value > 0


def test_dm_needs_valid_exponents():
    with pytest.raises(InvalidArgumentError):
        constant_Dm(req(op="mlinear", m=2))
    with pytest.raises(InvalidArgumentError):
        ConstantRequest(HeisenbergSpace(1), 2.0, 2.0, 2.0, "mlinear", 0)


def test_dispatch():
    assert sharp_constant(req(op="hlp")).closed_form_value == pytest.approx(OMEGA_4, rel=1e-13)
    assert sharp_constant(req()).closed_form_value == pytest.approx(HILBERT_Q4_P2, rel=1e-13)
    rep = sharp_constant(req(op="mlinear", m=2, p_list=(4.0, 4.0)))
    assert rep.closed_form_value == pytest.approx((OMEGA_4 / 4) ** 2 * I2_QUARTERS, rel=1e-13)


def test_constant_e_refuses_multilinear_kernel():
    from heisenberg_bounds.operators import mlinear_kernel
    with pytest.raises(InvalidArgumentError):
        constant_E(req(op="custom", kernel=mlinear_kernel(4, 2)))


def test_hlp_grows_as_p_approaches_one():
    values = [constant_G(req(p=p, op="hlp")).closed_form_value for p in (1.5, 1.2, 1.1, 1.01)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_im_single_beta_half():
    assert I_m(2.0, [0.5]) == pytest.approx(math.pi / 2, rel=1e-14)


def test_hilbert_pbar_out_four():
    rep = constant_E(req(pb_in=2.0, pb_out=4.0))
    assert rep.closed_form_value == pytest.approx(HILBERT_Q4_P2 * OMEGA_4 ** (0.25 - 0.5),
                                                  rel=1e-13)


def test_cutoff_kernel_converges():
    # k = rho^-Q 1_{rho >= 1} makes k rho^(Q-1-Q/p) ~ rho^(-1-Q/p) at infinity: integrable
    k = custom_kernel(4, lambda r: np.where(np.asarray(r) >= 1.0, np.asarray(r) ** -4.0, 0.0),
                      0.0, -4.0, breakpoints=(1.0,))
    rep = constant_E(req(op="custom", kernel=k))
    # omega int_1^inf rho^-3 drho = omega / 2
    assert rep.quadrature_value == pytest.approx(OMEGA_4 / 2, rel=1e-10)
