import math

import numpy as np
import pytest
from hypothesis import given, settings

from metricdeform.analysis import (
    ball_comparison_constant,
    default_annulus,
    doubling_constant,
    inverse_doubling_ratio,
    measure_inverse,
    reverse_doubling_fit,
    uniform_perfectness,
)
from metricdeform.errors import DegenerateMeasure, FitFailed, OutOfRange

from conftest import line_space, planar_spaces

CANTOR_DIMENSION = math.log(2) / math.log(3)


def test_doubling_constant_of_the_grid(grid10):
    estimate = doubling_constant(grid10)
    assert estimate.C_nu == 3.0
    assert estimate.witness_center == 1
    assert estimate.witness_radius == 1.0
    assert estimate.centers_checked == 10


def test_doubling_constant_of_two_points(two_point):
    assert doubling_constant(two_point).C_nu == 2.0


def test_doubling_constant_needs_a_center(grid10):
    with pytest.raises(DegenerateMeasure):
        doubling_constant(grid10, centers=[])


def test_doubling_constant_respects_radius_window(grid10):
    restricted = doubling_constant(grid10, r_lo=2.0, r_hi=4.0)
    assert restricted.C_nu <= doubling_constant(grid10).C_nu
    assert "[2.0, 4.0]" in restricted.radii_policy


def test_uniform_perfectness_of_the_grid_above_one(grid10):
    estimate = uniform_perfectness(grid10, 1.0)
    assert estimate.kappa == pytest.approx(2.0 * (1 + 1e-9), rel=1e-15)
    assert estimate.witness_radius == 1.0
    assert estimate.certified(10.0)


def test_uniform_perfectness_off_the_critical_radii(grid10):
    estimate = uniform_perfectness(grid10, 1.5)
    assert estimate.kappa == pytest.approx(1.5 * (1 + 1e-9))
    assert estimate.witness_radius == 2.0


def test_isolated_cluster_is_not_uniformly_perfect():
    estimate = uniform_perfectness(line_space([0.0, 1.0, 100.0]), 0.0)
    assert estimate.kappa >= 100.0
    assert not estimate.certified(10.0)


def test_two_points_have_nothing_to_check(two_point):
    estimate = uniform_perfectness(two_point, 0.0)
    assert estimate.kappa == pytest.approx(1.0 + 1e-9)
    assert estimate.radii_checked == 0
    assert estimate.witness_radius is None


def test_uniform_perfectness_rejects_negative_floor(grid10):
    with pytest.raises(OutOfRange):
        uniform_perfectness(grid10, -1.0)


def test_measure_inverse_on_the_grid(grid10):
    assert measure_inverse(grid10, 0.0) == 0.0
    assert measure_inverse(grid10, 1.0) == 1.0
    assert measure_inverse(grid10, 2.5) == 2.0
    np.testing.assert_array_equal(measure_inverse(grid10, np.array([0.5, 9.5])), [0.0, 9.0])
    with pytest.raises(OutOfRange):
        measure_inverse(grid10, 10.0)
    with pytest.raises(OutOfRange):
        measure_inverse(grid10, -0.1)


@given(planar_spaces(max_points=8))
@settings(max_examples=40, deadline=None)
def test_measure_inverse_is_exact(space):
    prof = space.profile()
    ts = np.linspace(0.0, prof.total, 1000, endpoint=False)
    r = measure_inverse(space, ts)
    assert np.all(prof.measure(r) <= ts)
    assert np.all(prof.closed_measure(r) > ts)


def test_inverse_doubling_ratio_window(grid10):
    window = inverse_doubling_ratio(grid10, 1.0)
    assert 1.0 <= window.lo <= window.hi <= 3.0
    assert window.samples > 0


def test_cantor_dimension_fit(cantor):
    fit = reverse_doubling_fit(cantor(6), 0.0, max_kappa=10.0)
    assert fit.alpha > 0
    assert fit.Lambda >= 1.0
    assert fit.kappa == pytest.approx(3.0, rel=0.05)
    assert fit.alpha_loglog == pytest.approx(CANTOR_DIMENSION, rel=0.15)


def test_fit_fails_without_uniform_perfectness(family):
    with pytest.raises(FitFailed):
        reverse_doubling_fit(family("cluster"), 0.0, max_kappa=10.0)


def test_ball_comparison_stays_under_the_iterated_doubling_bound(grid10):
    C_nu = doubling_constant(grid10).C_nu
    window = ball_comparison_constant(grid10, a=2.0, C_nu=C_nu)
    assert window.bound == C_nu**3
    assert 0 < window.lo <= window.hi <= window.bound
    assert window.samples > 0


def test_default_annulus(grid10, two_point):
    annulus = default_annulus(grid10)
    assert (annulus.r_lo, annulus.r_hi) == (1.0, 2.25)
    np.testing.assert_array_equal(
        annulus.contains(grid10.radii), [False, True, True] + [False] * 7
    )
    assert default_annulus(two_point).r_hi == 1.0
    assert default_annulus(grid10, r_hi=5.0).r_hi == 5.0
