"""
Round trips: flattening a sphericalized space and sphericalizing a flattened one.

The second transform is driven by a gauge on the first transform's output:

* sphere-then-flatten: the gauge is the distance to infinity, taken as the
  midpoint of the interval estimate, and balls are centered at infinity.
  Points whose ball around infinity is empty stand in for infinity itself
  and are dropped.
* flatten-then-sphere: the gauge is dhat(x, bhat) + 1 for the point bhat
  farthest from the original base, and balls are centered at bhat.
"""

import logging
import math

import numpy as np

from metricdeform.analysis import default_annulus
from metricdeform.deform import (
    constant_density,
    deform,
    deform_with_gauge,
    flatten,
    sphericalize,
)
from metricdeform.errors import PreconditionError
from metricdeform.space import FiniteMetricMeasureSpace
from metricdeform.verify.report import ComparabilityReport, matrix_window, vector_window

logger = logging.getLogger("metricdeform")

DIRECTIONS = ("sphere-then-flatten", "flatten-then-sphere")


def _sphere_then_flatten(space, sigma, strict, max_kappa):
    first = sphericalize(space, sigma, strict=strict, max_kappa=max_kappa)
    estimates = first.infinity
    gauge = (estimates.lower + estimates.upper) / 2.0
    nuhat = first.nuhat
    ball = np.array([math.fsum(nuhat[gauge < g].tolist()) for g in gauge])
    keep = np.flatnonzero(ball > 0)
    return first, keep, gauge[keep], ball[keep]


def _flatten_then_sphere(space, sigma, strict, max_kappa):
    first = flatten(space, sigma, max_kappa=max_kappa)
    far = first.default_base()
    row = first.dhat[far]
    gauge = row + 1.0
    prof = first.space.profile(far)
    ball = np.asarray(prof.measure(gauge), dtype=np.float64)
    keep = np.arange(first.n)
    return first, keep, gauge, ball


def duality_report(
    space: FiniteMetricMeasureSpace,
    sigma: float,
    direction: str,
    *,
    strict: bool = False,
    max_kappa: float = 10.0,
    digest: str = "",
) -> ComparabilityReport:
    """Windows of d~/d, nu~/nu and rho * rhohat after a round trip.

    The main window is d~/d over anchored pairs; the measure and density
    product windows go to ``windows``.
    """
    if direction == "sphere-then-flatten":
        first, keep, gauge, ball = _sphere_then_flatten(space, sigma, strict, max_kappa)
    elif direction == "flatten-then-sphere":
        first, keep, gauge, ball = _flatten_then_sphere(space, sigma, strict, max_kappa)
    else:
        raise PreconditionError(f"unknown direction {direction!r}; choose from {DIRECTIONS}")

    dhat = first.dhat[np.ix_(keep, keep)]
    rho_hat, d_tilde, nu_tilde = deform_with_gauge(dhat, first.nuhat[keep], gauge, ball, sigma)
    points = first.retained[keep]
    dist = space.dist[np.ix_(points, points)]
    mass = space.mass[points]
    product = first.rho[keep] * rho_hat

    annulus = default_annulus(space)
    anchor = annulus.contains(space.radii[points])
    off = ~np.eye(points.size, dtype=bool)
    pairs = off & anchor[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        metric_ratio = d_tilde / dist
    lo, hi, w_lo, w_hi, count = matrix_window(metric_ratio, pairs, points)

    ids = [int(p) for p in points[anchor]]
    m_lo, m_hi, _, _ = vector_window((nu_tilde / mass)[anchor], ids)
    p_lo, p_hi, _, _ = vector_window(product[anchor], ids)
    dropped = int(first.n - keep.size)
    logger.debug(
        f"🔁 {direction}: d~/d in [{lo:.4g}, {hi:.4g}], nu~/nu in [{m_lo:.4g}, {m_hi:.4g}], "
        f"rho*rhohat in [{p_lo:.4g}, {p_hi:.4g}]"
    )
    return ComparabilityReport(
        statement=f"duality-{direction}",
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        samples=count,
        excluded=int((off & ~anchor[:, None]).sum()),
        inputs_digest=digest,
        windows={"measure": (m_lo, m_hi), "density_product": (p_lo, p_hi)},
        flags=[f"dropped-infinity-proxy:{dropped}"] if dropped else [],
        details={"dropped_points": dropped, "sigma": sigma},
    )


def constant_density_duality(
    space: FiniteMetricMeasureSpace, c: float, sigma: float, digest: str = ""
) -> ComparabilityReport:
    """Deform by rho = c and then by rho = 1/c: d~ = 4d and nu~ = nu."""
    first = deform(space, constant_density(c), sigma)
    second = deform(first.space, constant_density(1.0 / c), sigma)
    off = ~np.eye(space.n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = second.dhat / space.dist
    lo, hi, w_lo, w_hi, count = matrix_window(ratio, off)
    weighted = space.mass > 0
    measure = second.nuhat[weighted] / space.mass[weighted]
    return ComparabilityReport(
        statement="duality-constant-density",
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        samples=count,
        inputs_digest=digest,
        passed=bool(
            np.allclose(ratio[off], 4.0, rtol=1e-12) and np.allclose(measure, 1.0, rtol=1e-12)
        ),
        windows={"measure": (float(measure.min()), float(measure.max()))},
    )
