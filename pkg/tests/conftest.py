"""Shared spaces and hypothesis strategies."""

import numpy as np
import pytest
from hypothesis import strategies as st

from metricdeform.generators import generate, make_spec
from metricdeform.space import build_space, euclidean_matrix


def line_space(coords, mass=None, base=0, **flags):
    coords = np.asarray(coords, dtype=np.float64)
    mass = np.ones(coords.size) if mass is None else mass
    return build_space(list(range(coords.size)), euclidean_matrix(coords), mass, base, **flags)


@pytest.fixture
def grid10():
    """{0, ..., 9} with unit masses, a truncation of the half-line."""
    return line_space(np.arange(10), unbounded=True)


@pytest.fixture
def two_point():
    return line_space([0.0, 1.0])


@pytest.fixture
def cantor():
    def make(depth, ratio=None):
        return generate(make_spec("cantor", depth=depth, ratio=ratio))

    return make


@pytest.fixture
def family():
    def make(name, **params):
        return generate(make_spec(name, **params))

    return make


@st.composite
def planar_spaces(draw, min_points=2, max_points=6):
    """Distinct points in the plane with positive masses, base 0."""
    n = draw(st.integers(min_value=min_points, max_value=max_points))
    coords = draw(
        st.lists(
            st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    masses = draw(
        st.lists(
            st.floats(min_value=0.1, max_value=10.0, allow_nan=False, allow_infinity=False),
            min_size=n,
            max_size=n,
        )
    )
    pts = np.asarray(coords, dtype=np.float64)
    return build_space(
        list(range(n)),
        euclidean_matrix(pts),
        masses,
        0,
        coords=pts,
        check_triangle=False,
    )
