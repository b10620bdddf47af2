import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricdeform.deform import (
    CanonicalDensity,
    PowerDensity,
    TabulatedDensity,
    canonical_density,
    constant_density,
)
from metricdeform.errors import OutOfRange, ZeroBallMass

from conftest import line_space


def test_canonical_grid_density(grid10):
    density = canonical_density(grid10, 1, 1.0)
    k = np.arange(10)
    np.testing.assert_allclose(density(k), (k + 1.0) ** -2, rtol=1e-15)
    assert density.value_at_zero == 1.0


def test_canonical_two_point_density(two_point):
    density = canonical_density(two_point, 1, 2.0)
    assert density(1.0) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), rel=1e-15)


def test_flattening_density_blows_up_at_the_base(two_point):
    density = canonical_density(two_point, 0, 1.0)
    assert math.isinf(density.value_at_zero)
    assert math.isinf(density(0.0))
    assert density(1.0) == 1.0


def test_canonical_integral_is_exact(grid10):
    density = canonical_density(grid10, 1, 1.0)
    expected = math.log(2) / 2 + math.log(3 / 2) / 3 + math.log(4 / 3) / 4
    assert density.integral(0.0, 3.0) == pytest.approx(expected, rel=1e-14)
    assert density.integral(2.0, 2.0) == 0.0


@given(
    st.lists(st.floats(min_value=0.0, max_value=12.0), min_size=3, max_size=3).map(sorted)
)
@settings(max_examples=100, deadline=None)
def test_canonical_integral_is_additive(cuts):
    density = canonical_density(line_space(np.arange(10), unbounded=True), 1, 1.0)
    a, b, c = cuts
    whole = density.integral(a, c)
    assert density.integral(a, b) + density.integral(b, c) == pytest.approx(whole, abs=1e-12)


def test_canonical_integral_matches_midpoint_quadrature(cantor):
    density = canonical_density(cantor(4), 0, 1.0)
    a, b = 0.2, 0.9
    edges = np.linspace(a, b, 200_001)
    mids = (edges[:-1] + edges[1:]) / 2
    numeric = float(np.sum(density(mids)) * (b - a) / mids.size)
    assert density.integral(a, b) == pytest.approx(numeric, rel=1e-4)


def test_canonical_integral_is_vectorised(grid10):
    density = canonical_density(grid10, 1, 1.0)
    out = density.integral(np.array([0.0, 1.0]), np.array([1.0, 3.0]))
    assert out.shape == (2,)
    assert out[0] == pytest.approx(math.log(2) / 2)


def test_zero_base_mass_has_no_canonical_flattening():
    space = line_space([0.0, 1.0, 2.0], mass=[0.0, 1.0, 1.0], punctured=True)
    with pytest.raises(ZeroBallMass):
        canonical_density(space, 0, 1.0)


@pytest.mark.parametrize("m0, sigma", [(2, 1.0), (1, 0.0), (0, -1.0)])
def test_canonical_parameters_are_checked(grid10, m0, sigma):
    with pytest.raises(OutOfRange):
        CanonicalDensity(grid10.profile(), m0, sigma)


def test_integrals_need_ordered_bounds(grid10):
    with pytest.raises(OutOfRange):
        canonical_density(grid10, 1, 1.0).integral(3.0, 1.0)
    with pytest.raises(OutOfRange):
        constant_density(1.0).integral(-1.0, 1.0)


def test_tabulated_density():
    density = TabulatedDensity([0.0, 1.0, 3.0], [2.0, 1.0, 0.5])
    assert density(0.5) == 2.0
    assert density(1.0) == 1.0
    assert density(10.0) == 0.5
    assert density.integral(0.0, 4.0) == pytest.approx(4.5)
    assert density.integral(0.5, 1.5) == pytest.approx(1.5)
    assert density.describe()["values"] == [2.0, 1.0, 0.5]


@pytest.mark.parametrize(
    "breakpoints, values",
    [
        ([0.0, 1.0], [1.0, 2.0]),
        ([1.0, 2.0], [2.0, 1.0]),
        ([0.0, 0.0], [2.0, 1.0]),
        ([0.0, 1.0], [1.0, 0.0]),
        ([0.0], [1.0, 1.0]),
    ],
)
def test_tabulated_density_validation(breakpoints, values):
    with pytest.raises(OutOfRange):
        TabulatedDensity(breakpoints, values)


def test_power_density_integrals():
    assert PowerDensity(2.0).integral(0.0, 1.0) == pytest.approx(0.5)
    assert PowerDensity(1.0).integral(0.0, 1.0) == pytest.approx(math.log(2))
    assert PowerDensity(2.0, scale=3.0)(1.0) == pytest.approx(0.75)


def test_constant_density():
    density = constant_density(3.0)
    assert density(7.0) == 3.0
    assert density.integral(1.0, 2.0) == pytest.approx(3.0)
    assert density.value_at_zero == 3.0
