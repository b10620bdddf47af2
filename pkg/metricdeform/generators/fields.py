"""Deterministic scalar test fields."""

from typing import List, Sequence

import numpy as np

from metricdeform.errors import ParamOutOfRange
from metricdeform.space import FiniteMetricMeasureSpace

FIELD_KINDS = ("constant", "coordinate", "capped_radius", "half_indicator", "lipschitz")
INTERVAL_ATOL = 1e-9


def lipschitz_field(space: FiniteMetricMeasureSpace, seed: int = 0) -> np.ndarray:
    """Random 1-Lipschitz field built by greedy interval intersection.

    Points are visited in a seeded random order; each new value is drawn
    inside the intersection of [u(j) - d(i,j), u(j) + d(i,j)] over the points
    already assigned. The intersection is nonempty by the triangle inequality.

    Raises:
        ParamOutOfRange: If the intersection is empty beyond rounding, which
            only happens on a matrix that is not a metric.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(space.n)
    u = np.zeros(space.n)
    done = np.zeros(space.n, dtype=bool)
    for step, i in enumerate(order):
        if step == 0:
            u[i] = 0.0
        else:
            d = space.dist[i, done]
            lo = float(np.max(u[done] - d))
            hi = float(np.min(u[done] + d))
            if hi < lo - INTERVAL_ATOL * (1.0 + abs(lo)):
                raise ParamOutOfRange(
                    f"no 1-Lipschitz value fits point {space.point_ids[i]!r}: "
                    f"[{lo:.6g}, {hi:.6g}] is empty; the distances break the triangle inequality"
                )
            hi = max(hi, lo)
            u[i] = lo + (hi - lo) * rng.uniform(0.25, 0.75)
        done[i] = True
    return u


def test_fields(
    space: FiniteMetricMeasureSpace,
    kinds: Sequence[str] = ("coordinate", "capped_radius", "half_indicator", "lipschitz"),
    cap: float = 10.0,
    seed: int = 0,
) -> List[np.ndarray]:
    """Build one field per requested kind, in order."""
    radii = np.asarray(space.radii, dtype=np.float64)
    out = []
    for kind in kinds:
        if kind == "constant":
            u = np.ones(space.n)
        elif kind == "coordinate":
            if space.coords is not None:
                u = np.asarray(space.coords, dtype=np.float64).reshape(space.n, -1)[:, 0].copy()
            else:
                u = radii.copy()
        elif kind == "capped_radius":
            u = np.minimum(radii, cap)
        elif kind == "half_indicator":
            u = (radii >= space.outer_radius / 2.0).astype(np.float64)
        elif kind == "lipschitz":
            u = lipschitz_field(space, seed)
        else:
            raise ValueError(f"unknown field kind {kind!r}; choose from {FIELD_KINDS}")
        out.append(u)
    return out


# keep pytest from collecting the builder as a test
test_fields.__test__ = False
