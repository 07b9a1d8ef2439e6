import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from heisenberg_bounds.errors import DomainError, InvalidArgumentError
from heisenberg_bounds.group import (
    GroupPoint, HeisenbergSpace, PolarPoint, ball_volume_quadrature, dilate, distance,
    draw_sphere, group_mul, inverse, koranyi_norm, lebesgue_ball_volume,
    literature_ball_volume, polar_compose, polar_decompose, random_rotation,
    rotate_horizontal, sample_ball, unit_ball_volume,
)

from oracle_values import BALL_VOLUME, OMEGA_4

coords = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_subnormal=False)


def points(n=1):
    return arrays(float, 2 * n + 1, elements=coords)


def test_group_law_by_hand():
    x = GroupPoint((1.0, 2.0, 3.0))
    y = GroupPoint((4.0, 5.0, 6.0))
    # t'' = 3 + 6 + 2 (y_1 x_2 - x_1 y_2) = 9 + 2 (8 - 5)
    assert (x @ y).coords == (5.0, 7.0, 15.0)
    assert inverse(x).coords == (-1.0, -2.0, -3.0)


def test_group_law_n2_twist():
    x = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    y = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    # twist = 2 (y_1 x_3 - x_1 y_3) = -2
    assert group_mul(x, y)[-1] == -2.0


@settings(max_examples=200, deadline=None)
@given(points(), points(), points())
def test_associativity_coordinates(x, y, z):
    lhs = group_mul(group_mul(x, y), z)
    rhs = group_mul(x, group_mul(y, z))
    scale = (1 + np.abs(x).max() + np.abs(y).max() + np.abs(z).max()) ** 2
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(points(2), points(2))
def test_inverse_and_identity(x, y):
    zero = np.zeros(5)
    assert np.array_equal(group_mul(x, zero), x)
    assert np.max(np.abs(group_mul(inverse(x), x))) <= 1e-12 * (1 + np.abs(x).max())
    # (xy)^-1 = y^-1 x^-1
    lhs = inverse(group_mul(x, y))
    rhs = group_mul(inverse(y), inverse(x))
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + np.abs(x).max() + np.abs(y).max()) ** 2)


@settings(max_examples=200, deadline=None)
@given(points(), st.floats(min_value=1e-3, max_value=1e3))
def test_norm_homogeneity(x, r):
    # dilated coordinates must stay normal floats, or the input itself is rounded
    assume(np.all((x == 0) | (np.abs(x) * r * r > 1e-300)))
    assert koranyi_norm(dilate(r, x)) == pytest.approx(r * koranyi_norm(x), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(points(), points(), st.floats(min_value=0.1, max_value=10.0))
def test_dilation_is_automorphism(x, y, r):
    lhs = dilate(r, group_mul(x, y))
    rhs = group_mul(dilate(r, x), dilate(r, y))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(points(), points(), points())
def test_left_invariance_and_triangle(a, x, y):
    # (ax)^-1 (ay) = x^-1 y holds on coordinates up to roundoff; the distance takes a
    # square root of the t-coordinate, so it is compared only for non-tiny separations
    scale = (1 + np.abs(a).max() + np.abs(x).max() + np.abs(y).max()) ** 2
    lhs = group_mul(inverse(group_mul(a, x)), group_mul(a, y))
    rhs = group_mul(inverse(x), y)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale
    d = distance(x, y)
    if d > 1e-3 * math.sqrt(scale):
        assert distance(group_mul(a, x), group_mul(a, y)) == pytest.approx(d, rel=1e-9)
    assert distance(x, y) <= distance(x, a) + distance(a, y) + 1e-12


def test_norm_extreme_magnitudes():
    for scale in (1e-200, 1e-120, 1e120, 1e200):
        x = np.array([3.0 * scale, 4.0 * scale, 0.0])
        assert koranyi_norm(x) == pytest.approx(5.0 * scale, rel=1e-15)
    for scale in (1e-120, 1e120):
        y = np.array([0.0, 0.0, scale * scale])
        assert koranyi_norm(y) == pytest.approx(scale, rel=1e-15)


def test_norm_is_symmetric_and_positive():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(1000, 3))
    assert np.allclose(koranyi_norm(x), koranyi_norm(-x))
    assert np.all(koranyi_norm(x) > 0)
    assert koranyi_norm(np.zeros(3)) == 0.0


def test_rotation_preserves_norm_and_group_law():
    rng = np.random.default_rng(1)
    R = random_rotation(rng, 2)
    x, y = rng.normal(size=(2, 5))
    assert koranyi_norm(rotate_horizontal(R, x)) == pytest.approx(koranyi_norm(x), rel=1e-13)
    # unitary rotations (commuting with J) are group automorphisms
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    U = np.block([[np.eye(2) * math.cos(0.3), np.eye(2) * math.sin(0.3)],
                  [-np.eye(2) * math.sin(0.3), np.eye(2) * math.cos(0.3)]])
    assert np.allclose(U @ J, J @ U)
    lhs = rotate_horizontal(U, group_mul(x, y))
    rhs = group_mul(rotate_horizontal(U, x), rotate_horizontal(U, y))
    assert np.allclose(lhs, rhs, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        rotate_horizontal(np.ones((4, 4)), x)


def test_polar_round_trip():
    x = GroupPoint((0.3, -1.2, 2.5))
    pp = polar_decompose(x)
    assert isinstance(pp, PolarPoint)
    assert koranyi_norm(pp.theta) == pytest.approx(1.0, rel=1e-14)
    assert np.allclose(polar_compose(pp).coords, x.coords, rtol=1e-14)
    with pytest.raises(DomainError):
        polar_decompose(GroupPoint((0.0, 0.0, 0.0)))


def test_polar_batch():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(50, 5))
    r, theta = polar_decompose(x)
    assert np.allclose(koranyi_norm(theta), 1.0)
    assert np.allclose(polar_compose(r, theta), x)


def test_point_validation():
    with pytest.raises(InvalidArgumentError):
        GroupPoint((1.0, 2.0))
    with pytest.raises(InvalidArgumentError):
        group_mul(np.zeros(3), np.zeros(5))
    with pytest.raises(InvalidArgumentError):
        dilate(0.0, np.zeros(3))
    with pytest.raises(InvalidArgumentError):
        HeisenbergSpace(0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ball_volume_oracle(n):
    assert lebesgue_ball_volume(n) == pytest.approx(BALL_VOLUME[n], rel=1e-14)
    assert ball_volume_quadrature(n).value == pytest.approx(BALL_VOLUME[n], rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_literature_formula_is_twice_the_volume(n):
    assert literature_ball_volume(n) == pytest.approx(2 * lebesgue_ball_volume(n), rel=1e-13)
    assert unit_ball_volume(n).ratio == pytest.approx(2.0, rel=1e-13)


def test_space_constants():
    s = HeisenbergSpace(1)
    assert (s.Q, s.dim) == (4, 3)
    assert s.omega_Q == pytest.approx(OMEGA_4, rel=1e-14)
    assert s.literature_omega_Q == pytest.approx(2 * OMEGA_4, rel=1e-13)
    assert HeisenbergSpace(1, omega_perturbation=0.01).omega_Q == pytest.approx(1.01 * OMEGA_4)
    assert koranyi_norm(s.unit_point()) == 1.0


def test_sample_ball_reproducible_and_inside():
    s = HeisenbergSpace(2)
    a = sample_ball(s, 5000, 42)
    b = sample_ball(s, 5000, 42)
    assert a.shape == (5000, 5)
    assert np.array_equal(a, b)
    assert np.all(koranyi_norm(a) <= 1.0)
    assert sample_ball(s, 0, 1).shape == (0, 5)


def test_sample_ball_radial_law():
    # uniform in the ball means P(|x| <= r) = r^Q
    s = HeisenbergSpace(1)
    r = koranyi_norm(sample_ball(s, 200_000, 3))
    for q in (0.3, 0.6, 0.9):
        assert np.mean(r <= q) == pytest.approx(q ** s.Q, abs=4e-3)


def test_sphere_points_have_unit_norm():
    s = HeisenbergSpace(1)
    th = draw_sphere(np.random.default_rng(0), s, 1000)
    assert np.allclose(koranyi_norm(th), 1.0)
