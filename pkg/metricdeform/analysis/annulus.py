"""Valid-annulus policy for finite truncations."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from metricdeform.space import FiniteMetricMeasureSpace

logger = logging.getLogger("metricdeform")


@dataclass(frozen=True)
class ValidAnnulus:
    """Closed range [r_lo, r_hi] of base radii where asymptotic checks apply."""

    r_lo: float
    r_hi: float

    def contains(self, radii) -> np.ndarray:
        radii = np.asarray(radii, dtype=np.float64)
        return (radii >= self.r_lo) & (radii <= self.r_hi)


def default_annulus(
    space: FiniteMetricMeasureSpace,
    r_lo: Optional[float] = None,
    r_hi: Optional[float] = None,
    outer_fraction: float = 0.25,
) -> ValidAnnulus:
    """Resolve the annulus for ``space``.

    Truncations of unbounded spaces keep radii up to ``outer_fraction * R_inf``;
    bounded spaces keep everything up to R_inf. The lower end defaults to the
    smallest positive distance from the base.
    """
    radii = space.profile().radii
    lo = float(radii[1]) if r_lo is None else float(r_lo)
    if r_hi is not None:
        hi = float(r_hi)
    elif space.unbounded:
        hi = outer_fraction * float(radii[-1])
    else:
        hi = float(radii[-1])
    if hi < lo:
        logger.warning(f"⚠️ valid annulus [{lo}, {hi}] is empty; using [{lo}, {lo}]")
        hi = lo
    return ValidAnnulus(r_lo=lo, r_hi=hi)
