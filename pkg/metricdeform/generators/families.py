"""
Deterministic test-space families.

Every family places the base point (id 0) at the geometric origin and
builds its distance matrix from coordinates, so generated spaces satisfy
the triangle inequality by construction.
"""

import logging
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from metricdeform.errors import ParamOutOfRange
from metricdeform.space import FiniteMetricMeasureSpace, build_space, euclidean_matrix

logger = logging.getLogger("metricdeform")

MAX_POINTS = 4096
MAX_DEPTH = 12


class GridSegment(BaseModel):
    """Points {0, s, 2s, ..., (n-1)s} on the half-line."""

    family: Literal["grid"] = "grid"
    n: int = Field(..., ge=2, le=MAX_POINTS)
    spacing: float = Field(default=1.0, gt=0)


class Cantor(BaseModel):
    """Midpoints of the 2^depth surviving intervals of a Cantor construction."""

    family: Literal["cantor"] = "cantor"
    depth: int = Field(..., ge=1, le=MAX_DEPTH)
    ratio: float = Field(default=1.0 / 3.0, gt=0, lt=0.5)


class WeightedHalfLine(BaseModel):
    """Unit grid whose masses make nu(B_r) grow like r**exponent."""

    family: Literal["halfline"] = "halfline"
    n: int = Field(..., ge=2, le=MAX_POINTS)
    exponent: float = Field(default=1.0, gt=0, le=8)


class GridPatch2D(BaseModel):
    """side x side integer lattice in the quadrant, base at the corner."""

    family: Literal["patch2d"] = "patch2d"
    side: int = Field(..., ge=2, le=64)


class ClusterCounterexample(BaseModel):
    """{0, 1} and a far pair {gap, gap+1}: not uniformly perfect at the base."""

    family: Literal["cluster"] = "cluster"
    gap: float = Field(default=100.0, gt=2)


class PuncturedGrid(BaseModel):
    """{2^-depth, ..., 1/2} and {1, ..., n} around a punctured base at 0."""

    family: Literal["punctured"] = "punctured"
    n: int = Field(..., ge=1, le=MAX_POINTS // 2)
    depth: int = Field(default=6, ge=1, le=MAX_DEPTH)
    unbounded: bool = True


Family = Annotated[
    Union[GridSegment, Cantor, WeightedHalfLine, GridPatch2D, ClusterCounterexample, PuncturedGrid],
    Field(discriminator="family"),
]


class GeneratorSpec(BaseModel):
    """A family with parameters plus mass policy and field seed."""

    family: Family
    mass_policy: Literal["uniform", "profile"] = Field(
        default="profile",
        description="uniform: equal masses; profile: the family's intended ball-growth law",
    )
    seed: int = Field(default=0, description="Seed for randomized test fields only")


def make_spec(family: str, mass_policy: str = "profile", seed: int = 0, **params) -> GeneratorSpec:
    """Build a spec from loose keyword parameters, mapping validation errors."""
    params = {k: v for k, v in params.items() if v is not None}
    try:
        return GeneratorSpec.model_validate(
            {"family": {"family": family, **params}, "mass_policy": mass_policy, "seed": seed}
        )
    except ValidationError as e:
        raise ParamOutOfRange(str(e)) from e


def cantor_points(depth: int, ratio: float) -> np.ndarray:
    """Surviving-interval midpoints, translated and rescaled onto [0, 1]."""
    left = np.array([0.0])
    width = 1.0
    for _ in range(depth):
        keep = ratio * width
        left = np.concatenate([left, left + (width - keep)])
        width = keep
    mids = np.sort(left + width / 2.0)
    return (mids - mids[0]) / (mids[-1] - mids[0])


def _build(coords, mass, unbounded=False, punctured=False) -> FiniteMetricMeasureSpace:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords[:, None]
    ids = list(range(coords.shape[0]))
    return build_space(
        ids,
        euclidean_matrix(coords),
        mass,
        0,
        unbounded=unbounded,
        punctured=punctured,
        coords=coords,
        check_triangle=False,
    )


def generate(spec: GeneratorSpec) -> FiniteMetricMeasureSpace:
    """Build the space described by ``spec``; identical specs give identical spaces."""
    fam = spec.family
    profile = spec.mass_policy == "profile"

    if isinstance(fam, GridSegment):
        coords = fam.spacing * np.arange(fam.n, dtype=np.float64)
        mass = np.full(fam.n, fam.spacing if profile else 1.0)
        space = _build(coords, mass, unbounded=True)

    elif isinstance(fam, Cantor):
        coords = cantor_points(fam.depth, fam.ratio)
        mass = np.full(coords.size, 2.0 ** (-fam.depth))
        space = _build(coords, mass)

    elif isinstance(fam, WeightedHalfLine):
        k = np.arange(fam.n, dtype=np.float64)
        if profile:
            mass = (k + 1.0) ** fam.exponent - k**fam.exponent
        else:
            mass = np.ones(fam.n)
        space = _build(k, mass, unbounded=True)

    elif isinstance(fam, GridPatch2D):
        xs, ys = np.meshgrid(np.arange(fam.side), np.arange(fam.side), indexing="ij")
        coords = np.column_stack([xs.ravel(), ys.ravel()]).astype(np.float64)
        space = _build(coords, np.ones(len(coords)), unbounded=True)

    elif isinstance(fam, ClusterCounterexample):
        coords = np.array([0.0, 1.0, fam.gap, fam.gap + 1.0])
        space = _build(coords, np.ones(4))

    elif isinstance(fam, PuncturedGrid):
        inner = 2.0 ** -np.arange(fam.depth, 0, -1, dtype=np.float64)
        outer = np.arange(1, fam.n + 1, dtype=np.float64)
        coords = np.concatenate([[0.0], inner, outer])
        if profile:
            mass = np.concatenate([[2.0 ** (-fam.depth - 1)], inner, np.ones(fam.n)])
        else:
            mass = np.concatenate([[2.0 ** (-fam.depth - 1)], np.ones(fam.depth + fam.n)])
        space = _build(coords, mass, unbounded=fam.unbounded, punctured=True)

    else:  # pragma: no cover - the discriminated union is exhaustive
        raise ParamOutOfRange(f"unknown family {fam!r}")

    logger.debug(f"🧱 generated {fam.family} with {space.n} points")
    return space
