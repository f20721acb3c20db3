import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lislimits import RectSurface
from lislimits.quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate_box,
    integrate_double_surface,
    integrate_surface,
)


@given(st.integers(0, 15), st.integers(0, 15), st.floats(-3, 3), st.floats(0.1, 4))
@settings(max_examples=40, deadline=None)
def test_polynomial_exactness(px, py, a, w):
    spec = QuadratureSpec(nodes=8)
    res = integrate_box(lambda p: p[:, 0] ** px * p[:, 1] ** py, [a, a], [a + w, a + w], spec)

    def mono(p):
        return ((a + w) ** (p + 1) - a ** (p + 1)) / (p + 1)

    exact = mono(px) * mono(py)
    assert res.value == pytest.approx(exact, rel=1e-11, abs=1e-11)
    assert res.panels == 1


def test_peaked_integrand_triggers_refinement():
    eps = 1e-2
    spec = QuadratureSpec(nodes=8, rel_tol=1e-10, max_subdivisions=30)
    res = integrate_box(lambda p: 1 / (p[:, 0] ** 2 + eps**2), [-1, 0], [1, 1], spec)
    assert res.value == pytest.approx(2 * math.atan(1 / eps) / eps, rel=1e-9)
    assert res.panels > 1


def test_max_subdivisions_exceeded_raises():
    spec = QuadratureSpec(nodes=4, rel_tol=1e-14, max_subdivisions=2)
    with pytest.raises(QuadratureError):
        integrate_box(lambda p: np.abs(p[:, 0] - 0.3) ** 0.5, [0, 0], [1, 1], spec)


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate_box(lambda p: 1 / p[:, 0], [0, 0], [1, 1], QuadratureSpec(nodes=4))


def test_invalid_spec():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=-1)


def test_repeatable_to_the_bit():
    f = lambda p: np.exp(-((p[:, 0] - 0.2) ** 2) * 40) * np.cos(5 * p[:, 1])  # noqa: E731
    spec = QuadratureSpec(nodes=6, rel_tol=1e-12, max_subdivisions=30)
    a = integrate_box(f, [-1, -1], [1, 1], spec)
    b = integrate_box(f, [-1, -1], [1, 1], spec)
    assert a.value == b.value


def test_surface_measure_on_tilted_rectangle():
    s = RectSurface((1, 2, 3), (0, 0, 1), (np.sqrt(0.5), np.sqrt(0.5), 0), 2.0, 0.5)
    assert integrate_surface(lambda r: np.ones(len(r)), s).value == pytest.approx(1.0, rel=1e-14)
    # first moment recovers the center
    zc = integrate_surface(lambda r: r[:, 2], s).value / s.area
    assert zc == pytest.approx(3.0, rel=1e-13)


def test_double_surface_separable():
    a = RectSurface((0, 0, 0), (1, 0, 0), (0, 1, 0), 1, 2)
    b = RectSurface((0, 0, 5), (1, 0, 0), (0, 1, 0), 3, 1)
    res = integrate_double_surface(lambda r, s: r[:, 0] ** 2 * s[:, 0] ** 2, a, b)
    assert res.value == pytest.approx((2 / 12) * (9 / 4), rel=1e-13)


def test_complex_integrand():
    res = integrate_box(lambda p: np.exp(1j * p[:, 0]), [0, 0], [np.pi, 1], QuadratureSpec(nodes=16))
    assert res.value == pytest.approx(2j, abs=1e-13)
