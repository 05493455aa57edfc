import math

import pytest

from fdstab.logscale import ONE, LogReal, logreal


def test_plain_roundtrip():
    # extreme magnitudes lose ~eps*|ln x| relative precision through the
    # log representation
    for x in (1e-300, 0.5, 1.0, 3.7, 1e250):
        assert math.isclose(logreal(x).to_float(), x, rel_tol=1e-12)


def test_mul_div_pow_match_floats():
    a, b = logreal(3.5), logreal(0.02)
    assert math.isclose((a * b).to_float(), 0.07, rel_tol=1e-14)
    assert math.isclose((a / b).to_float(), 175.0, rel_tol=1e-14)
    assert math.isclose(a.powf(3.0).to_float(), 3.5 ** 3, rel_tol=1e-14)
    assert math.isclose(a.powf(-0.5).to_float(), 3.5 ** -0.5, rel_tol=1e-14)


def test_add_sub_match_floats():
    a, b = logreal(1.25), logreal(3.0)
    assert math.isclose(a.add(b).to_float(), 4.25, rel_tol=1e-14)
    assert math.isclose(b.sub(a).to_float(), 1.75, rel_tol=1e-14)
    with pytest.raises(ValueError):
        a.sub(b)


def test_deep_values_compose():
    # x = exp(1e200): value and log of value both out of float range squared
    x = LogReal.exp_of(LogReal.from_ln(math.log(1e200)))
    assert x.lndepth == 0 and math.isclose(x.lnmag, 1e200, rel_tol=1e-13)
    y = x * x
    assert math.isclose(y.lnmag, 2.0 * x.lnmag, rel_tol=1e-13)
    z = x.powf(3.0)
    assert math.isclose(z.lnmag, 3.0 * x.lnmag, rel_tol=1e-13)
    inv = ONE / x
    assert inv.lnsign == -1 and inv.lnmag == x.lnmag
    # exp of a huge value drops to depth 1
    w = LogReal.exp_of(x)
    assert w.lndepth == 1 and w.lnmag == x.lnmag
    assert (ONE / w).lnsign == -1


def test_dominant_addition_is_exact():
    big = LogReal.from_ln(1e100)
    tiny = LogReal.from_ln(-1e100)
    assert big.add(tiny).close_to(big, rel=0.0)
    assert big.sub(tiny).close_to(big, rel=0.0)
    # moderate gaps still resolve
    a = logreal(1.0)
    b = logreal(1e-10)
    assert math.isclose(a.add(b).to_float(), 1.0 + 1e-10, rel_tol=1e-15)


def test_pow_logreal_exponent():
    base = logreal(2.0)
    expo = LogReal.from_ln(math.log(10.0))  # exponent 10
    assert math.isclose(base.pow_logreal(expo).to_float(), 1024.0, rel_tol=1e-12)
    # huge exponent: 2^(e^300)
    big_expo = LogReal.from_ln(300.0)
    res = base.pow_logreal(big_expo)
    assert res.lndepth == 0
    assert math.isclose(res.lnmag, math.exp(300.0) * math.log(2.0), rel_tol=1e-12)


def test_ordering():
    xs = [logreal(0.1), logreal(1.0), logreal(7.0),
          LogReal.exp_of(LogReal.from_ln(200.0)),
          LogReal.exp_of(LogReal.from_ln(200.0), sign=-1)]
    assert xs[0] < xs[1] < xs[2] < xs[3]
    assert xs[4] < xs[0]


def test_tiny_exponent_saturates_to_one():
    deep_small = ONE / LogReal.exp_of(LogReal.from_ln(1e150))
    res = logreal(5.0).pow_logreal(deep_small)
    assert res.lnsign == 0  # 5^(e^-1e150) == 1 at float precision


def test_ln_logreal():
    x = LogReal.from_ln(1e150)
    lx = x.ln_logreal()
    assert math.isclose(lx.to_float(), 1e150, rel_tol=1e-12)
    with pytest.raises(ValueError):
        logreal(0.5).ln_logreal()
