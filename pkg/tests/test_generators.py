import math

import numpy as np
import pytest

from metricdeform.errors import ParamOutOfRange
from metricdeform.generators import cantor_points, generate, lipschitz_field, make_spec, test_fields
from metricdeform.space import build_space, dumps_space


def test_grid_masses_follow_the_spacing(family):
    space = family("grid", n=4, spacing=0.5)
    np.testing.assert_allclose(space.radii, [0.0, 0.5, 1.0, 1.5])
    np.testing.assert_allclose(space.mass, 0.5)
    assert space.unbounded


def test_uniform_grid_masses():
    space = generate(make_spec("grid", "uniform", n=4, spacing=0.5))
    np.testing.assert_allclose(space.mass, 1.0)


def test_cantor_points_fill_the_unit_interval():
    np.testing.assert_allclose(cantor_points(2, 1 / 3), [0.0, 0.25, 0.75, 1.0], atol=1e-15)


def test_cantor_is_bounded_with_equal_masses(cantor):
    space = cantor(5)
    assert space.n == 32
    assert not space.unbounded
    assert space.outer_radius == pytest.approx(1.0)
    assert space.total_mass == pytest.approx(1.0)


def test_halfline_ball_growth(family):
    space = family("halfline", n=6, exponent=2.0)
    prof = space.profile()
    for r in range(6):
        assert prof.closed_measure(float(r)) == pytest.approx((r + 1) ** 2)


def test_patch_and_cluster(family):
    patch = family("patch2d", side=3)
    assert patch.n == 9
    assert patch.outer_radius == pytest.approx(math.sqrt(8))
    cluster = family("cluster", gap=50.0)
    np.testing.assert_allclose(cluster.radii, [0.0, 1.0, 50.0, 51.0])


def test_punctured_grid(family):
    space = family("punctured", n=3, depth=2)
    np.testing.assert_allclose(space.radii, [0.0, 0.25, 0.5, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(space.mass, [0.125, 0.25, 0.5, 1.0, 1.0, 1.0])
    assert space.punctured and space.unbounded
    assert not family("punctured", n=3, unbounded=False).unbounded


def test_generation_is_deterministic():
    spec = make_spec("cantor", depth=4, ratio=0.3)
    assert dumps_space(generate(spec)) == dumps_space(generate(spec))


@pytest.mark.parametrize(
    "family, params",
    [
        ("grid", {"n": 1}),
        ("cantor", {"depth": 3, "ratio": 0.6}),
        ("cantor", {"depth": 20}),
        ("cluster", {"gap": 1.0}),
        ("torus", {}),
    ],
)
def test_bad_parameters(family, params):
    with pytest.raises(ParamOutOfRange):
        make_spec(family, **params)


def test_lipschitz_field_is_one_lipschitz(family):
    space = family("patch2d", side=4)
    u = lipschitz_field(space, seed=3)
    gaps = np.abs(u[:, None] - u[None, :])
    assert np.all(gaps <= space.dist * (1 + 1e-12) + 1e-12)
    np.testing.assert_array_equal(u, lipschitz_field(space, seed=3))


def test_lipschitz_field_rejects_non_metrics():
    dist = np.array([[0.0, 1.0, 100.0], [1.0, 0.0, 1.0], [100.0, 1.0, 0.0]])
    space = build_space([0, 1, 2], dist, np.ones(3), 0, check_triangle=False)
    failures = 0
    for seed in range(50):
        try:
            lipschitz_field(space, seed)
        except ParamOutOfRange:
            failures += 1
    assert failures > 0


def test_builtin_fields(grid10):
    coordinate, capped, half, constant = test_fields(
        grid10, ["coordinate", "capped_radius", "half_indicator", "constant"], cap=3.0
    )
    np.testing.assert_allclose(coordinate, np.arange(10))
    assert capped.max() == 3.0
    np.testing.assert_array_equal(half, (np.arange(10) >= 4.5).astype(float))
    assert np.all(constant == 1.0)
    with pytest.raises(ValueError):
        test_fields(grid10, ["wavy"])


def test_coordinate_field_uses_the_first_axis(family):
    space = family("patch2d", side=2)
    (u,) = test_fields(space, ["coordinate"])
    np.testing.assert_allclose(u, [0.0, 0.0, 1.0, 1.0])
