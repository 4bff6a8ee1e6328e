import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonia.quad import (
    Interval,
    QuadratureError,
    integrate,
    integrate_kink_split,
)

from oracles import lambda_oracle, simpson


def test_interval_validation():
    iv = Interval(1, 2)
    assert (iv.a, iv.b, iv.width, iv.positive) == (1.0, 2.0, 1.0, True)
    assert not Interval(-2, -1).positive
    for a, b in [(2, 1), (1, 1), (-1, 1), (0, 1), (-1, 0), (1, math.inf), (math.nan, 1)]:
        with pytest.raises(ValueError):
            Interval(a, b)


def test_examples():
    assert integrate(lambda x: x * x, 0, 1).value == pytest.approx(1 / 3, abs=1e-15)
    assert integrate(math.exp, 0, 1).value == pytest.approx(math.e - 1, abs=1e-12)
    assert integrate(lambda x: 1 / x, 1, 2).value == pytest.approx(math.log(2), abs=1e-12)
    assert integrate(math.sin, 0, math.pi).value == pytest.approx(2.0, abs=1e-12)


def test_cubic_is_exact_on_first_panel():
    r = integrate(lambda x: 4 * x**3 - x + 2, 0, 2)
    assert r.subdivisions == 1
    assert r.value == pytest.approx(16 - 2 + 4, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    st.floats(-5, 5),
    st.floats(0.1, 5),
    st.sampled_from([1e-10, 1e-12, 1e-13]),
)
def test_cubics_need_one_panel(coeffs, lo, width, tol):
    c0, c1, c2, c3 = coeffs
    hi = lo + width
    r = integrate(lambda x: c0 + c1 * x + c2 * x**2 + c3 * x**3, lo, hi, tol)
    exact = sum(c / (k + 1) * (hi ** (k + 1) - lo ** (k + 1)) for k, c in enumerate(coeffs))
    assert r.subdivisions == 1
    assert r.value == pytest.approx(exact, abs=1e-11 * (1 + abs(exact)))


def test_reversed_limits_negate():
    fwd = integrate(math.exp, 0, 1)
    back = integrate(math.exp, 1, 0)
    assert back.value == -fwd.value
    assert integrate(math.exp, 1, 1).value == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.0, 2.0), st.floats(0.1, 2.0))
def test_linearity_and_additivity(alpha, beta, lo, width):
    f, g = math.exp, math.cos
    hi = lo + width
    tol = 1e-12
    lhs = integrate(lambda x: alpha * f(x) + beta * g(x), lo, hi, tol).value
    rhs = alpha * integrate(f, lo, hi, tol).value + beta * integrate(g, lo, hi, tol).value
    assert lhs == pytest.approx(rhs, abs=1e-10)
    mid = lo + 0.37 * width
    split = integrate(f, lo, mid, tol).value + integrate(f, mid, hi, tol).value
    assert split == pytest.approx(integrate(f, lo, hi, tol).value, abs=1e-10)


@pytest.mark.parametrize(
    "g, lo, hi",
    [
        (math.exp, 0.0, 3.0),
        (lambda x: 1 / x**2, 0.1, 10.0),
        (lambda x: math.sqrt(x), 0.0, 1.0),
        (lambda x: x**2 * math.log(x), 1.0, math.e),
    ],
)
def test_agrees_with_oracle_and_estimate_is_honest(g, lo, hi):
    tol = 1e-10
    r = integrate(g, lo, hi, tol)
    ref = simpson(np.vectorize(g), lo, hi)
    assert abs(r.value - ref) <= 1e-9
    assert r.error_estimate <= tol


def test_subdivision_cap():
    with pytest.raises(QuadratureError, match="subdivision cap"):
        integrate(lambda x: math.sin(1 / x), 1e-6, 1.0, 1e-14, max_subdivisions=50)


def test_non_finite_integrand():
    with pytest.raises(QuadratureError, match="non-finite"):
        integrate(lambda x: math.inf if x > 0.5 else 0.0, 0, 1)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate(math.exp, 0, 1, tol=0.0)


def test_relative_floor_bounds_work_on_large_integrands():
    # |g| ~ 1e8: an absolute 1e-10 is below round-off but a relative floor is not
    r = integrate(lambda x: 1e8 * math.exp(x), 0, 10, 1e-10, rel_tol=1e-13)
    assert r.value == pytest.approx(1e8 * math.expm1(10), rel=1e-12)


def test_kink_split():
    r = integrate_kink_split(lambda t: abs(1 - 2 * t), 0, 1, [0.5])
    assert abs(r.value - 0.5) <= 1e-14
    assert r.subdivisions == 2
    a, b = 1.0, 2.0
    lam = [
        integrate_kink_split(lambda t, w=w: abs(1 - 2 * t) * w(t) / (t * b + (1 - t) * a) ** 2, 0, 1, [0.5], 1e-13).value
        for w in (lambda t: 1.0, lambda t: t, lambda t: 1 - t)
    ]
    for got, ref in zip(lam, lambda_oracle(a, b)):
        assert got == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("kinks", [[1.5], [0.5, 0.2], [0.0], [0.5, 0.5]])
def test_kink_split_rejects_bad_kinks(kinks):
    with pytest.raises(ValueError):
        integrate_kink_split(abs, 0.0, 1.0, kinks)
