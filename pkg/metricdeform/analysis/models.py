"""Result models for the geometric estimators."""

import math
from typing import Optional

from pydantic import BaseModel, Field


class DoublingEstimate(BaseModel):
    """Exact doubling constant over the declared radius grid."""

    C_nu: float = Field(..., ge=1.0)
    witness_center: int
    witness_radius: float
    radii_policy: str = "all positive critical radii"
    centers_checked: int = 0


class PerfectnessEstimate(BaseModel):
    """Smallest certified kappa (possibly infinite) at a center."""

    kappa: float
    m0: float
    center: int
    witness_radius: Optional[float] = None
    radii_checked: int = 0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.kappa)

    def certified(self, max_kappa: float) -> bool:
        return not self.is_infinite and self.kappa <= max_kappa


class ReverseDoublingFit(BaseModel):
    """Exponent alpha and constant Lambda with nu(B_r)/nu(B_R) <= Lambda (r/R)^alpha."""

    alpha: float = Field(..., gt=0)
    Lambda: float = Field(..., ge=1.0)
    growth: Optional[float] = Field(
        default=None, description="Smallest growth factor nu(B_4kt)/nu(B_t) observed"
    )
    kappa: float
    m0: float
    r_min: float
    r_max: float
    pairs_checked: int = 0
    alpha_loglog: Optional[float] = Field(
        default=None, description="Least-squares slope of log nu(B_r) against log r"
    )


class RatioWindow(BaseModel):
    """Smallest and largest value of a ratio over a sampled set."""

    lo: float
    hi: float
    witness_lo: Optional[float] = None
    witness_hi: Optional[float] = None
    bound: Optional[float] = Field(
        default=None, description="Upper bound predicted from the measured constants"
    )
    samples: int = 0
