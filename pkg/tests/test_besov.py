import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from metricdeform.besov import (
    BesovParams,
    besov_energy,
    besov_norm,
    besov_seminorm,
    energy_report,
    energy_terms,
    lp_norm,
)
from metricdeform.errors import DomainMismatch

from conftest import line_space, planar_spaces

HALF = BesovParams(p=2, theta=0.5)


def test_two_point_energy(two_point):
    u = [0.0, 1.0]
    assert besov_energy(two_point, u, HALF) == pytest.approx(2.0)
    assert besov_seminorm(two_point, u, HALF) == pytest.approx(math.sqrt(2.0))
    assert lp_norm(two_point, u, 2) == pytest.approx(1.0)
    assert besov_norm(two_point, u, HALF) == pytest.approx(math.sqrt(2.0) + 1.0)


def test_energy_report_fields(two_point):
    report = energy_report(two_point, [0.0, 1.0], HALF)
    assert report.energy == pytest.approx(2.0)
    assert report.norm == pytest.approx(report.seminorm + report.lp_norm)
    assert (report.p, report.theta) == (2.0, 0.5)


def test_partner_denominator_uses_the_other_ball():
    space = line_space([0.0, 1.0], mass=[1.0, 3.0])
    u = [0.0, 1.0]
    center = energy_terms(space, u, HALF)
    partner = energy_terms(space, u, HALF, denominator="partner")
    assert center[0, 1] == pytest.approx(3.0)
    assert partner[0, 1] == pytest.approx(1.0)
    np.testing.assert_allclose(partner, center.T)
    assert besov_energy(space, u, HALF) == pytest.approx(
        besov_energy(space, u, HALF, denominator="partner")
    )


def test_unknown_denominator(two_point):
    with pytest.raises(ValueError):
        energy_terms(two_point, [0.0, 1.0], HALF, denominator="both")


def test_constant_fields_have_no_energy(grid10):
    assert besov_energy(grid10, np.full(10, 4.0), HALF) == 0.0


def test_zero_mass_points_do_not_contribute():
    space = line_space([0.0, 1.0, 2.0], mass=[0.0, 1.0, 1.0], punctured=True)
    terms = energy_terms(space, [5.0, 0.0, 1.0], HALF)
    assert np.all(terms[0] == 0)
    assert np.all(terms[:, 0] == 0)


@given(planar_spaces(), st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=50, deadline=None)
def test_energy_is_p_homogeneous(space, c):
    params = BesovParams(p=3, theta=0.4)
    u = np.arange(space.n, dtype=np.float64)
    scaled = besov_energy(space, c * u, params)
    assert scaled == pytest.approx(c**3 * besov_energy(space, u, params), rel=1e-9)


def test_field_must_match_the_space(two_point):
    with pytest.raises(DomainMismatch):
        besov_energy(two_point, [1.0, 2.0, 3.0], HALF)
    with pytest.raises(DomainMismatch):
        besov_energy(two_point, [1.0, math.nan], HALF)


@pytest.mark.parametrize("p, theta", [(0.5, 0.5), (2.0, 0.0), (2.0, -1.0)])
def test_params_are_validated(p, theta):
    with pytest.raises(ValidationError):
        BesovParams(p=p, theta=theta)


def test_sigma_is_p_theta():
    assert BesovParams(p=4, theta=0.25).sigma == 1.0
