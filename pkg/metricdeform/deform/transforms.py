"""
Sphericalization, flattening and inversion of finite metric measure spaces.

Every transform runs the same pipeline: a density rho of the distance to the
base point, the chain metric built from it, and the measure rho^sigma * nu on
the retained points Z'. The base point is dropped exactly when rho(0) is
infinite.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from metricdeform.analysis import uniform_perfectness
from metricdeform.deform.chain import chain_metric
from metricdeform.deform.density import (
    CanonicalDensity,
    MetricDensityProfile,
    canonical_density,
)
from metricdeform.errors import (
    EmptyFarAnnulusWarning,
    NotPerfectAtBase,
    NotPerfectAtLargeScales,
    PreconditionError,
)
from metricdeform.space import FiniteMetricMeasureSpace, build_space

logger = logging.getLogger("metricdeform")

TRANSFORM_M0 = {"sphericalize": 1.0, "flatten": 0.0, "invert": 0.0}


@dataclass(frozen=True)
class InfinityEstimates:
    """Interval [lower, upper] for the deformed distance from each retained point to infinity."""

    lower: np.ndarray
    upper: np.ndarray
    far_index: int
    spread: float
    kappa: float
    fallback: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "far_index": self.far_index,
            "spread": self.spread,
            "kappa": self.kappa,
            "fallback": self.fallback,
        }


@dataclass(frozen=True, eq=False)
class DeformedSpace:
    """Result of deforming ``source`` by ``density``.

    Index ``i`` of ``dhat``, ``nuhat`` and ``rho`` refers to the source point
    ``retained[i]``.
    """

    source: FiniteMetricMeasureSpace
    retained: np.ndarray
    dhat: np.ndarray
    rho: np.ndarray
    density: MetricDensityProfile
    nuhat: Optional[np.ndarray] = None
    sigma: Optional[float] = None
    kind: str = "custom"
    infinity: Optional[InfinityEstimates] = None

    @property
    def n(self) -> int:
        return int(self.retained.size)

    @property
    def m0(self) -> Optional[float]:
        if isinstance(self.density, CanonicalDensity):
            return self.density.m0
        return None

    @property
    def radii(self) -> np.ndarray:
        """|x| in the source metric for each retained point."""
        return self.source.radii[self.retained]

    @property
    def dist(self) -> np.ndarray:
        """Source distances restricted to Z'."""
        return self.source.dist[np.ix_(self.retained, self.retained)]

    @property
    def mass(self) -> np.ndarray:
        return self.source.mass[self.retained]

    @property
    def gauge(self) -> np.ndarray:
        """m(x) = |x| + m0 for each retained point (canonical densities only)."""
        if self.m0 is None:
            raise PreconditionError("gauge m(x) is only defined for canonical densities")
        return self.radii + self.m0

    @property
    def gauge_mass(self) -> np.ndarray:
        """nu(B_{m(x)}) for each retained point."""
        return np.asarray(self.source.profile().measure(self.gauge), dtype=np.float64)

    @property
    def scale(self) -> np.ndarray:
        """nu(B_{m(x)})^(-1/sigma), the size of the deformed distance to infinity."""
        return self.gauge_mass ** (-1.0 / self.sigma)

    @property
    def dropped_base(self) -> bool:
        return self.source.base not in set(self.retained.tolist())

    def source_index(self, i: int) -> int:
        return int(self.retained[i])

    def default_base(self) -> int:
        """Source base if retained, else the retained point farthest from it."""
        hits = np.flatnonzero(self.retained == self.source.base)
        if hits.size:
            return int(hits[0])
        return int(np.argmax(self.radii))

    @cached_property
    def space(self) -> FiniteMetricMeasureSpace:
        """(Z', dhat, nuhat) with the default base point."""
        return self.as_space()

    def as_space(self, base: Optional[int] = None) -> FiniteMetricMeasureSpace:
        """(Z', dhat, nuhat) as a space, with ``base`` an index into Z'."""
        if self.nuhat is None:
            raise PreconditionError("deformed measure not computed; call deform_measure first")
        base = self.default_base() if base is None else int(base)
        if self.kind == "sphericalize":
            unbounded = False
        elif self.kind in ("flatten", "invert"):
            unbounded = True
        else:
            unbounded = self.source.unbounded
        ids = [self.source.point_ids[i] for i in self.retained]
        return build_space(
            ids,
            self.dhat,
            self.nuhat,
            ids[base],
            unbounded=unbounded,
            punctured=self.source.punctured and not self.dropped_base,
            check_triangle=False,
        )

    def transform_block(self, ledger=None) -> Dict[str, Any]:
        """Metadata written next to the deformed space in the JSON format."""
        return {
            "kind": self.kind,
            "m0": self.m0,
            "sigma": self.sigma,
            "density_kind": self.density.kind,
            "density": self.density.describe(),
            "retained": self.retained.tolist(),
            "rho": self.rho.tolist(),
            "ledger": None if ledger is None else ledger.model_dump(),
            "infinity_estimates": None if self.infinity is None else self.infinity.as_dict(),
        }


def retained_indices(space: FiniteMetricMeasureSpace, density: MetricDensityProfile) -> np.ndarray:
    """Z': every point, minus the base when rho(0) is infinite."""
    keep = np.arange(space.n)
    if math.isinf(density.value_at_zero):
        keep = keep[keep != space.base]
    return keep


def deform_metric(space: FiniteMetricMeasureSpace, density: MetricDensityProfile) -> DeformedSpace:
    """Chain metric of ``density`` on Z' (no measure yet)."""
    keep = retained_indices(space, density)
    rho = np.asarray(density(space.radii[keep]), dtype=np.float64)
    dist = space.dist[np.ix_(keep, keep)]
    dhat = chain_metric(dist, rho)
    dhat.setflags(write=False)
    return DeformedSpace(source=space, retained=keep, dhat=dhat, rho=rho, density=density)


def deform_measure(
    space: FiniteMetricMeasureSpace, density: MetricDensityProfile, sigma: float
) -> np.ndarray:
    """nuhat({x}) = rho(x)^sigma * nu({x}) on Z'."""
    keep = retained_indices(space, density)
    rho = np.asarray(density(space.radii[keep]), dtype=np.float64)
    nuhat = rho**sigma * space.mass[keep]
    nuhat.setflags(write=False)
    return nuhat


def deform(
    space: FiniteMetricMeasureSpace,
    density: MetricDensityProfile,
    sigma: float,
    kind: str = "custom",
) -> DeformedSpace:
    """Metric and measure deformation by an arbitrary density."""
    metric = deform_metric(space, density)
    nuhat = deform_measure(space, density, sigma)
    return replace(metric, nuhat=nuhat, sigma=float(sigma), kind=kind)


def infinity_estimates(deformed: DeformedSpace, kappa: Optional[float] = None) -> InfinityEstimates:
    """Bracket dhat(x, infinity) for a sphericalized truncation.

    lower(x) is the integral of rho from |x| to R_inf. upper(x) is
    dhat(x, x_far) plus the spread of the far annulus {|y| >= |x_far| / kappa}
    around the farthest point x_far.
    """
    if deformed.m0 != 1.0:
        raise PreconditionError("distances to infinity are only estimated for m0=1")
    if kappa is None:
        kappa = uniform_perfectness(deformed.source, 1.0).kappa
    radii = deformed.radii
    outer = deformed.source.outer_radius
    lower = np.asarray(
        deformed.density.integral(radii, np.full(radii.shape, outer)), dtype=np.float64
    )

    far = int(np.argmax(radii))
    ring = np.flatnonzero(radii >= radii[far] / kappa)
    ring = ring[ring != far]
    fallback = ring.size == 0
    if fallback:
        order = np.argsort(-radii, kind="stable")
        ring = order[1:2]
        message = "far annulus holds only the farthest point; using the two farthest points"
        warnings.warn(message, EmptyFarAnnulusWarning, stacklevel=2)
        logger.warning(f"⚠️ {message}")
    spread = float(deformed.dhat[far, ring].max())
    upper = deformed.dhat[:, far] + spread

    if np.any(lower > upper * (1.0 + 1e-9)):
        logger.warning("⚠️ infinity lower estimate exceeds the upper estimate at some point")
    return InfinityEstimates(
        lower=lower,
        upper=upper,
        far_index=far,
        spread=spread,
        kappa=float(kappa),
        fallback=fallback,
    )


def _large_scale_check(space: FiniteMetricMeasureSpace, max_kappa: float, strict: bool) -> float:
    if space.outer_radius <= 1.0:
        raise PreconditionError(
            "truncation has no scales above 1; sphericalization needs points with |x| > 1"
        )
    perf = uniform_perfectness(space, 1.0)
    if not perf.certified(max_kappa):
        message = (
            f"uniform perfectness for r >= 1 not certified (kappa={perf.kappa:.4g} "
            f"at r={perf.witness_radius})"
        )
        if strict:
            raise NotPerfectAtLargeScales(message)
        logger.warning(f"⚠️ {message}")
    return perf.kappa


def _base_check(space: FiniteMetricMeasureSpace, max_kappa: float) -> float:
    perf = uniform_perfectness(space, 0.0)
    if not perf.certified(max_kappa):
        raise NotPerfectAtBase(
            f"base point is not uniformly perfect: kappa={perf.kappa:.4g} > {max_kappa:g} "
            f"at r={perf.witness_radius}"
        )
    return perf.kappa


def sphericalize(
    space: FiniteMetricMeasureSpace,
    sigma: float,
    *,
    strict: bool = False,
    max_kappa: float = 10.0,
) -> DeformedSpace:
    """Canonical m0=1 deformation of a truncated unbounded space, with infinity estimates.

    Raises:
        PreconditionError: If ``space`` is not flagged as an unbounded truncation.
        NotPerfectAtLargeScales: In strict mode, when kappa for r >= 1 is not certified.
    """
    if not space.unbounded:
        raise PreconditionError("sphericalize needs a truncation of an unbounded space")
    kappa = _large_scale_check(space, max_kappa, strict)
    density = canonical_density(space, 1, sigma, max_kappa)
    deformed = deform(space, density, sigma, kind="sphericalize")
    deformed = replace(deformed, infinity=infinity_estimates(deformed, kappa))
    logger.info(f"🌐 sphericalized {space.n} points (sigma={sigma:g}, kappa={kappa:.4g})")
    return deformed


def flatten(
    space: FiniteMetricMeasureSpace, sigma: float, *, max_kappa: float = 10.0
) -> DeformedSpace:
    """Canonical m0=0 deformation of a bounded space; the base point is removed.

    Raises:
        PreconditionError: If ``space`` is flagged as an unbounded truncation.
        NotPerfectAtBase: If the base point is not uniformly perfect.
    """
    if space.unbounded:
        raise PreconditionError("flatten needs a bounded space; use invert for unbounded ones")
    kappa = _base_check(space, max_kappa)
    density = canonical_density(space, 0, sigma, max_kappa)
    deformed = deform(space, density, sigma, kind="flatten")
    logger.info(f"📏 flattened {space.n} points (sigma={sigma:g}, kappa={kappa:.4g})")
    return deformed


def invert(
    space: FiniteMetricMeasureSpace, sigma: float, *, max_kappa: float = 10.0
) -> DeformedSpace:
    """Canonical m0=0 deformation of a punctured unbounded truncation.

    Raises:
        PreconditionError: Unless ``space`` is flagged unbounded and punctured.
        NotPerfectAtBase: If the base point is not uniformly perfect.
    """
    if not (space.unbounded and space.punctured):
        raise PreconditionError("invert needs an unbounded truncation punctured at the base")
    kappa = _base_check(space, max_kappa)
    density = canonical_density(space, 0, sigma, max_kappa)
    deformed = deform(space, density, sigma, kind="invert")
    logger.info(f"🔄 inverted {space.n} points (sigma={sigma:g}, kappa={kappa:.4g})")
    return deformed


def transform(
    space: FiniteMetricMeasureSpace,
    kind: str,
    sigma: float,
    m0: Optional[float] = None,
    *,
    strict: bool = False,
    max_kappa: float = 10.0,
) -> DeformedSpace:
    """Dispatch to sphericalize, flatten or invert.

    Raises:
        PreconditionError: If ``kind`` is unknown or ``m0`` is not the one ``kind`` uses.
    """
    if kind not in TRANSFORM_M0:
        raise PreconditionError(f"unknown transform {kind!r}; choose from {sorted(TRANSFORM_M0)}")
    if m0 is not None and float(m0) != TRANSFORM_M0[kind]:
        raise PreconditionError(f"{kind} uses m0={TRANSFORM_M0[kind]:g}, got m0={m0}")
    if kind == "sphericalize":
        return sphericalize(space, sigma, strict=strict, max_kappa=max_kappa)
    if kind == "flatten":
        return flatten(space, sigma, max_kappa=max_kappa)
    return invert(space, sigma, max_kappa=max_kappa)


def deform_with_gauge(
    dist: np.ndarray,
    mass: np.ndarray,
    gauge: np.ndarray,
    ball_mass: np.ndarray,
    sigma: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deform by rho(x) = 1 / (g(x) * V(x)^(1/sigma)) for a pointwise gauge g and ball mass V.

    Returns (rho, chain metric, deformed masses).
    """
    gauge = np.asarray(gauge, dtype=np.float64)
    ball_mass = np.asarray(ball_mass, dtype=np.float64)
    rho = 1.0 / (gauge * ball_mass ** (1.0 / sigma))
    return rho, chain_metric(dist, rho), rho**sigma * np.asarray(mass, dtype=np.float64)
