import math

import numpy as np
import pytest

from fdstab.fields import (DivergentTailError, RadialField, TailModel,
                           barenblatt_field, field_from_function,
                           gradient_integral, graded_mesh, quadrature_mesh)
from fdstab.params import derive_exponents
from fdstab.profiles import closed_form_moments, g_norms


def test_field_validation():
    ex = derive_exponents(3, m=0.75)
    r = np.array([0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        RadialField(ex, r[::-1].copy(), np.ones(3))
    with pytest.raises(ValueError):
        RadialField(ex, np.array([0.1, 1.0, 2.0]), np.ones(3))
    with pytest.raises(ValueError):
        RadialField(ex, r, np.array([1.0, -1.0, 0.0]))
    with pytest.raises(ValueError):
        TailModel(1.0, 2.0)  # growing tail rejected


def test_quadrature_matches_closed_forms():
    for d, m in [(3, 2.0 / 3.0), (3, 0.75), (2, 0.6), (4, 0.8)]:
        ex = derive_exponents(d, m=m)
        mt = closed_form_moments(ex)
        fld = barenblatt_field(ex, quadrature_mesh())
        assert abs(fld.mass() - mt.mass) < 1e-6 * mt.mass
        assert abs(fld.second_moment() - mt.second_moment) \
            < 1e-6 * mt.second_moment
        assert abs(fld.entropy_integral() - mt.entropy) < 1e-6 * mt.entropy
        assert abs(fld.integrate_power(2 - m) - mt.pow_2m) < 1e-6 * mt.pow_2m
        assert abs(fld.integrate_power(2 - m, 2) - mt.second_moment_pow_2m) \
            < 1e-6 * mt.second_moment_pow_2m


def test_gradient_integral_matches_g_norm():
    ex = derive_exponents(3, p=2.0)
    fld = barenblatt_field(ex, quadrature_mesh())
    want = g_norms(ex)["grad_sq"]
    assert abs(gradient_integral(fld) - want) < 2e-7 * want


def test_divergent_tail_flagged():
    ex = derive_exponents(3, m=0.75)
    r = graded_mesh()
    fld = field_from_function(ex, lambda rr: (1.0 + rr ** 2) ** -1.6,
                              r, tail_power=-3.2)
    with pytest.raises(DivergentTailError):
        fld.second_moment()  # d + 2 + power = 1.8 > 0


def test_mass_beyond_monotone():
    ex = derive_exponents(3, m=0.75)
    fld = barenblatt_field(ex, graded_mesh())
    beyond = fld.mass_beyond()
    assert np.all(np.diff(beyond) <= 0.0)
    assert math.isclose(beyond[0], fld.mass(), rel_tol=1e-12)


def test_scaled_field_mass_invariant():
    ex = derive_exponents(3, m=0.75)
    mt = closed_form_moments(ex)
    for lam in (0.7, 1.0, 1.4):
        fld = barenblatt_field(ex, quadrature_mesh(), lam=lam)
        assert abs(fld.mass() - mt.mass) < 1e-6 * mt.mass
        # second moment scales linearly in the dilation
        assert abs(fld.second_moment() - lam * mt.second_moment) \
            < 1e-5 * mt.second_moment
