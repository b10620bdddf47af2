import math

import numpy as np
import pytest
from hypothesis import given, settings

from metricdeform.errors import DomainMismatch, SpaceValidationError
from metricdeform.space import (
    ball,
    build_space,
    critical_radii,
    dumps_space,
    jsonable,
    loads_space,
    radius_of,
    read_space,
    validate_field,
    write_space,
)

from conftest import planar_spaces


def test_build_space_accepts_a_metric(grid10):
    assert grid10.n == 10
    assert grid10.base == 0
    assert grid10.outer_radius == 9.0
    assert grid10.total_mass == 10.0
    assert not grid10.dist.flags.writeable


def test_violations_are_collected_before_raising():
    with pytest.raises(SpaceValidationError) as exc:
        build_space([0, 1], [[0.0, 1.0], [2.0, 0.0]], [1.0, -1.0], 0)
    kinds = exc.value.kinds()
    assert "NonSymmetric" in kinds
    assert "NegativeMass" in kinds


def test_triangle_violation_has_a_witness():
    dist = [[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]]
    with pytest.raises(SpaceValidationError) as exc:
        build_space([0, 1, 2], dist, [1.0, 1.0, 1.0], 0)
    (violation,) = exc.value.violations
    assert violation.kind == "TriangleViolation"
    assert violation.witness == (0, 1, 2)


@pytest.mark.parametrize(
    "ids, dist, mass, base, kind",
    [
        ([0], [[0.0]], [1.0], 0, "TooFewPoints"),
        ([0, 1], [[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0], 0, "ZeroDistanceDistinctPoints"),
        ([0, 1], [[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0], 7, "UnknownBase"),
        ([0, 0], [[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0], 0, "DuplicateIds"),
        ([0, 1], [[0.0, math.inf], [math.inf, 0.0]], [1.0, 1.0], 0, "NonFinite"),
        ([0, 1], [[1.0, 1.0], [1.0, 0.0]], [1.0, 1.0], 0, "NonZeroDiagonal"),
        ([0, 1], [[0.0, 1.0], [1.0, 0.0]], [0.0, 1.0], 0, "ZeroBaseMass"),
        ([0, 1, 2], [[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0, 1.0], 0, "ShapeMismatch"),
    ],
)
def test_each_axiom_is_reported(ids, dist, mass, base, kind):
    with pytest.raises(SpaceValidationError) as exc:
        build_space(ids, dist, mass, base)
    assert kind in exc.value.kinds()


def test_punctured_base_may_have_zero_mass():
    space = build_space([0, 1], [[0.0, 1.0], [1.0, 0.0]], [0.0, 1.0], 0, punctured=True)
    assert space.mass[0] == 0.0


def test_ball_profile_is_an_open_ball_step_function(grid10):
    prof = grid10.profile()
    assert prof.measure(0.0) == 0.0
    assert prof.measure(0.5) == 1.0
    assert prof.measure(1.0) == 1.0
    assert prof.measure(1.0 + 1e-12) == 2.0
    assert prof.closed_measure(1.0) == 2.0
    assert prof.measure(100.0) == 10.0
    np.testing.assert_array_equal(prof.measure(np.array([1.0, 2.5, 9.0])), [1.0, 3.0, 9.0])
    assert prof.next_radius_above(1.0) == 2.0
    assert prof.next_radius_above(9.0) is None


def test_ball_query_and_radii(grid10):
    result = ball(grid10, 3, 2.0)
    assert result.members == (2, 3, 4)
    assert result.mass == 3.0
    assert radius_of(grid10, 7) == 7.0
    assert critical_radii(grid10, 9) == [float(k) for k in range(10)]
    with pytest.raises(ValueError):
        ball(grid10, 0, -1.0)


def test_pair_ball_masses_match_profiles(grid10):
    masses = grid10.pair_ball_masses
    assert masses[0, 3] == 3.0
    assert masses[5, 0] == 9.0
    assert masses[5, 9] == 7.0


def test_restrict_keeps_the_sub_metric(grid10):
    sub = grid10.restrict([2, 4, 8], base=0)
    assert sub.point_ids == (2, 4, 8)
    np.testing.assert_array_equal(sub.radii, [0.0, 2.0, 6.0])


def test_validate_field(grid10):
    assert validate_field(grid10, range(10)).shape == (10,)
    with pytest.raises(DomainMismatch):
        validate_field(grid10, [1.0, 2.0])
    with pytest.raises(DomainMismatch):
        validate_field(grid10, [math.nan] * 10)


def test_json_reproduces_the_space(tmp_path, cantor):
    space = cantor(4)
    path = write_space(space, tmp_path / "c4.json")
    assert read_space(path).same_as(space)


def test_matrix_documents_keep_flags():
    space = build_space(
        ["a", "b", "c"],
        [[0.0, 0.1, 0.3], [0.1, 0.0, 0.2], [0.3, 0.2, 0.0]],
        [1.0, 2.0, 3.0],
        "b",
        unbounded=True,
    )
    again = loads_space(dumps_space(space))
    assert again.same_as(space)
    assert again.unbounded
    assert again.point_ids[again.base] == "b"


def test_jsonable_replaces_non_finite_values():
    assert jsonable({"a": math.inf, "b": [math.nan, 1.0]}) == {"a": "Infinite", "b": [None, 1.0]}


@given(planar_spaces())
@settings(max_examples=50, deadline=None)
def test_profile_totals_match_masses(space):
    for x in range(space.n):
        prof = space.profile(x)
        assert prof.radii[0] == 0.0
        assert prof.total == pytest.approx(space.total_mass)
        assert np.all(np.diff(prof.cumulative) > 0)
