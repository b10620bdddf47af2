"""
Discrete Besov energies.

The energy of a field u is the double sum over ordered pairs x != y of

    |u(x) - u(y)|^p / d(x, y)^(theta p) * nu({x}) nu({y}) / nu(B(x, d(x, y)))

with B the open ball. Sums use ``math.fsum`` so the result does not depend
on summation order.
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from metricdeform.errors import InvalidInput, ZeroDenominator
from metricdeform.space import FiniteMetricMeasureSpace, validate_field

logger = logging.getLogger("metricdeform")

DENOMINATORS = ("center", "partner")


class BesovParams(BaseModel):
    """Exponents of the energy; sigma = p * theta is the matching measure exponent."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(..., ge=1.0)
    theta: float = Field(..., gt=0.0)

    @classmethod
    def parse(cls, p: float, theta: float) -> "BesovParams":
        """Build from user-supplied values, raising ``InvalidInput`` when out of range."""
        try:
            return cls(p=p, theta=theta)
        except ValidationError as e:
            raise InvalidInput(f"invalid Besov exponents p={p}, theta={theta}: {e}") from e

    @property
    def sigma(self) -> float:
        return self.p * self.theta


class EnergyResult(BaseModel):
    energy: float
    seminorm: float
    lp_norm: float
    norm: float
    p: float
    theta: float


def energy_terms(
    space: FiniteMetricMeasureSpace,
    u,
    params: BesovParams,
    denominator: str = "center",
) -> np.ndarray:
    """Matrix of the per-pair integrand; the diagonal is zero.

    ``denominator="partner"`` uses nu(B(y, d(x, y))) instead of the ball
    around x.

    Raises:
        DomainMismatch: If ``u`` does not match the space.
        ZeroDenominator: If a contributing pair sees an empty ball.
    """
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}")
    u = validate_field(space, u)
    balls = space.pair_ball_masses
    if denominator == "partner":
        balls = balls.T
    weight = space.mass[:, None] * space.mass[None, :]
    off = ~np.eye(space.n, dtype=bool)
    live = off & (weight > 0)
    if np.any(live & (balls <= 0)):
        i, j = (int(v) for v in np.argwhere(live & (balls <= 0))[0])
        raise ZeroDenominator(f"empty ball in the energy term of pair ({i}, {j})")

    terms = np.zeros_like(space.dist)
    diff = np.abs(u[:, None] - u[None, :]) ** params.p
    scale = space.dist[live] ** (params.theta * params.p)
    terms[live] = diff[live] / scale * weight[live] / balls[live]
    return terms


def besov_energy(
    space: FiniteMetricMeasureSpace,
    u,
    params: BesovParams,
    denominator: str = "center",
) -> float:
    """[u]^p, the p-th power of the Besov seminorm."""
    return math.fsum(energy_terms(space, u, params, denominator).ravel())


def besov_seminorm(space: FiniteMetricMeasureSpace, u, params: BesovParams) -> float:
    return besov_energy(space, u, params) ** (1.0 / params.p)


def lp_norm(space: FiniteMetricMeasureSpace, u, p: float) -> float:
    u = validate_field(space, u)
    return math.fsum((np.abs(u) ** p * space.mass).tolist()) ** (1.0 / p)


def besov_norm(space: FiniteMetricMeasureSpace, u, params: BesovParams) -> float:
    """[u] + ||u||_p."""
    return besov_seminorm(space, u, params) + lp_norm(space, u, params.p)


def energy_report(space: FiniteMetricMeasureSpace, u, params: BesovParams) -> EnergyResult:
    energy = besov_energy(space, u, params)
    seminorm = energy ** (1.0 / params.p)
    lp = lp_norm(space, u, params.p)
    logger.debug(
        f"⚡ energy={energy:.6g} on {space.n} points (p={params.p:g}, theta={params.theta:g})"
    )
    return EnergyResult(
        energy=energy,
        seminorm=seminorm,
        lp_norm=lp,
        norm=seminorm + lp,
        p=params.p,
        theta=params.theta,
    )
