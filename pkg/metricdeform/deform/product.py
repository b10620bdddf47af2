"""Product-weight chain metric and its collapse along far points."""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from metricdeform.deform.chain import product_weights, shortest_distances
from metricdeform.deform.density import MetricDensityProfile
from metricdeform.errors import PreconditionError
from metricdeform.space import FiniteMetricMeasureSpace

logger = logging.getLogger("metricdeform")


class FarPointBound(BaseModel):
    index: int
    radius: float
    bound: float
    two_hop: float


class ProductDemoReport(BaseModel):
    """d~ between two fixed points next to the chain bounds through far points."""

    z1: int
    z2: int
    direct: float
    d_tilde: float
    far_points: List[FarPointBound]
    min_bound: float
    min_two_hop: float
    tail_product: float
    collapses: bool


def product_deform_demo(
    space: FiniteMetricMeasureSpace,
    density: MetricDensityProfile,
    z1: Optional[int] = None,
    z2: Optional[int] = None,
    far_fraction: float = 0.5,
) -> ProductDemoReport:
    """Chain metric with weights rho(x) rho(y) d(x, y) and its two-hop bounds.

    For each far point y (|y| >= far_fraction * R_inf) the chain z1 -> y -> z2
    has length at most 2 (rho(z1) + rho(z2)) rho(y) |y|. When t rho(t) tends
    to 0 these bounds, and with them d~(z1, z2), collapse as the truncation
    grows. ``z1`` and ``z2`` default to the base point and its nearest
    neighbour.
    """
    if not space.unbounded:
        raise PreconditionError("the product demo needs a truncation of an unbounded space")
    radii = space.radii
    z1 = space.base if z1 is None else int(z1)
    if z2 is None:
        others = np.where(np.arange(space.n) == z1, np.inf, space.dist[z1])
        z2 = int(np.argmin(others))

    rho = np.asarray(density(radii), dtype=np.float64)
    weights = product_weights(space.dist, rho)
    d_tilde = shortest_distances(weights)

    far = np.flatnonzero(radii >= far_fraction * space.outer_radius)
    far = far[(far != z1) & (far != z2)]
    far = far[np.argsort(radii[far], kind="stable")]
    bounds = 2.0 * (rho[z1] + rho[z2]) * rho[far] * radii[far]
    two_hop = weights[z1, far] + weights[far, z2]
    rows = [
        FarPointBound(index=int(y), radius=float(radii[y]), bound=float(b), two_hop=float(h))
        for y, b, h in zip(far, bounds, two_hop)
    ]
    tail = float(np.max(rho[far] * radii[far])) if far.size else float("nan")
    min_bound = float(bounds.min()) if far.size else float("inf")
    min_two_hop = float(two_hop.min()) if far.size else float("inf")

    report = ProductDemoReport(
        z1=z1,
        z2=z2,
        direct=float(weights[z1, z2]),
        d_tilde=float(d_tilde[z1, z2]),
        far_points=rows,
        min_bound=min_bound,
        min_two_hop=min_two_hop,
        tail_product=tail,
        collapses=bool(d_tilde[z1, z2] < weights[z1, z2]),
    )
    logger.debug(
        f"✖️ product metric d~({z1},{z2})={report.d_tilde:.4g} direct={report.direct:.4g} "
        f"min far bound={min_bound:.4g}"
    )
    return report
