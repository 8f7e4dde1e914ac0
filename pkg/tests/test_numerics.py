"""Quadrature and finite-difference building blocks."""

import math

import pytest
from numpy.testing import assert_allclose

from npmixcure.numerics import adaptive_simpson, central_diff, composite_simpson


def test_adaptive_simpson_polynomial_exact():
    # Simpson integrates cubics exactly
    assert adaptive_simpson(lambda x: x * x, 0.0, 1.0) == pytest.approx(
        1.0 / 3.0, abs=1e-14
    )
    assert adaptive_simpson(lambda x: x**3 - x, -1.0, 2.0) == pytest.approx(
        2.25, abs=1e-12
    )


def test_adaptive_simpson_transcendental():
    assert_allclose(
        adaptive_simpson(math.sin, 0.0, math.pi, tol=1e-10), 2.0, atol=1e-9
    )
    assert_allclose(
        adaptive_simpson(math.exp, 0.0, 1.0, tol=1e-10),
        math.e - 1.0,
        atol=1e-9,
    )


def test_adaptive_simpson_empty_interval():
    assert adaptive_simpson(math.exp, 2.0, 2.0) == 0.0


def test_composite_simpson_error_bound():
    # composite error for x^4 on [0,1] with 64 panels is below 1e-8
    value = composite_simpson(lambda x: x**4, 0.0, 1.0, panels=64)
    assert abs(value - 0.2) < 1e-8


def test_central_diff_exponential():
    d1, d2 = central_diff(math.exp, 0.0, 1e-5)
    assert d1 == pytest.approx(1.0, abs=1e-9)
    assert d2 == pytest.approx(1.0, abs=1e-5)


def test_central_diff_cubic():
    # for x^3 the three-point second difference is exact: 6x
    d1, d2 = central_diff(lambda x: x**3, 2.0, 1e-4)
    assert d1 == pytest.approx(12.0, rel=1e-8)
    assert d2 == pytest.approx(12.0, rel=1e-6)
