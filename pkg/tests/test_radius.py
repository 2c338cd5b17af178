import numba
import numpy as np
import pytest

from pdisc.geometry import Domain, make_rng
from pdisc.radius import (ConstantRadiusField, CustomRadiusField, FieldContractError,
                          ParametricRadiusField, eval_radius, make_field, radius_bounds, scaled_field)


def test_eval_examples():
    assert eval_radius(ParametricRadiusField(150), (0, 0)) == 0.15 / 150
    assert eval_radius(ParametricRadiusField(100), (0.3, 0.4)) == pytest.approx(0.0065, rel=1e-14)
    # oracle: (sqrt(0.5) + 0.15) / 150 with plain math
    assert eval_radius(ParametricRadiusField(150), (0.5, 0.5)) == pytest.approx(0.0057140452079103175, rel=1e-15)


def test_bounds_examples(unit_square):
    b = radius_bounds(ParametricRadiusField(150), unit_square)
    assert b.r_min == 0.001
    assert b.r_max == pytest.approx(0.0057140452079103175, rel=1e-15)
    assert radius_bounds(ParametricRadiusField(50), unit_square).r_min == pytest.approx(0.003, rel=1e-15)


def test_bounds_off_origin_and_tiny_domain():
    f = ParametricRadiusField(10)
    b = f.bounds(Domain((0.2, 0.0), (0.4, 0.1)))
    assert b.r_min == pytest.approx((0.2 + 0.15) / 10)
    assert b.r_max == pytest.approx((np.hypot(0.4, 0.1) + 0.15) / 10)
    tiny = f.bounds(Domain((-1e-9, -1e-9), (1e-9, 1e-9)))
    assert tiny.r_min == pytest.approx(f((0, 0)), rel=1e-6)
    assert tiny.r_max == pytest.approx(f((0, 0)), rel=1e-6)


def test_bounds_contain_probes(unit_square):
    f = ParametricRadiusField(75)
    b = f.bounds(unit_square)
    z = make_rng(0).random((10_000, 2)) - 0.5
    r = f.evaluate_many(z)
    assert np.all(b.r_min <= r) and np.all(r <= b.r_max)


def test_offset_identity():
    f = ParametricRadiusField(150)
    z = make_rng(1).random((1000, 2)) - 0.5
    resid = f.evaluate_many(z) * 150 - np.linalg.norm(z, axis=1) - 0.15
    assert np.max(np.abs(resid)) <= 4 * np.finfo(float).eps


def test_scaled_field():
    f = ParametricRadiusField(50)
    z = make_rng(2).random((100, 2)) - 0.5
    assert np.array_equal(scaled_field(f, 50).evaluate_many(z), f.evaluate_many(z))
    assert np.allclose(scaled_field(f, 150).evaluate_many(z), f.evaluate_many(z) / 3, rtol=1e-15)
    assert np.all(scaled_field(f, 150).evaluate_many(z) <= f.evaluate_many(z))
    with pytest.raises(ValueError):
        scaled_field(f, 0)


def test_evaluate_many_matches_jitted_fn():
    f = ParametricRadiusField(123, offset=0.2)
    z = make_rng(3).random((200, 3)) - 0.5
    assert np.array_equal(f.evaluate_many(z), [f.evaluate(p) for p in z])


def test_constant_field():
    f = ConstantRadiusField(0.3, gamma=3)
    assert f.r == pytest.approx(0.1)
    assert f((0.2, 0.2)) == pytest.approx(0.1)
    with pytest.raises(FieldContractError):
        ConstantRadiusField(-1.0)


def test_nonpositive_field_reported():
    f = ParametricRadiusField(10, offset=-0.5)
    with pytest.raises(FieldContractError):
        f((0, 0))


@numba.njit
def _ring(x, gamma, params):
    return (params[0] + abs(x[0])) / gamma


def test_custom_field_bounds(unit_square):
    f = CustomRadiusField(_ring, 10.0, r_min=lambda g: 0.1 / g, params=[0.1])
    b = f.bounds(unit_square)
    assert b.r_min == pytest.approx(0.01)
    assert b.r_max >= 0.06 and "probe" in b.method
    assert f.with_gamma(20).bounds(unit_square).r_min == pytest.approx(0.005)
    with pytest.raises(FieldContractError):
        CustomRadiusField(_ring, 1.0, r_min=None, params=[0.1]).bounds(unit_square)


def test_make_field():
    assert make_field("parametric", 10).gamma == 10
    with pytest.raises(ValueError):
        make_field("bogus", 1)
