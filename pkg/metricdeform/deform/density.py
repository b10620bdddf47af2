"""
Metric density functions.

A density is a nonincreasing, strictly positive function rho on [0, inf)
that is finite away from 0. Each one can be evaluated pointwise (vectorised)
and integrated exactly over [a, b].
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence

import numpy as np

from metricdeform.analysis import uniform_perfectness
from metricdeform.errors import OutOfRange, ZeroBallMass
from metricdeform.space import BallProfile, FiniteMetricMeasureSpace

logger = logging.getLogger("metricdeform")


class MetricDensityProfile(ABC):
    """Base class for metric density functions."""

    kind: str = "abstract"

    @abstractmethod
    def __call__(self, t):
        """rho(t) for a scalar or an array of t >= 0."""

    @abstractmethod
    def integral(self, a, b):
        """Exact integral of rho over [a, b] (vectorised, requires a <= b)."""

    @property
    def value_at_zero(self) -> float:
        return float(self(0.0))

    def at_points(self, space: FiniteMetricMeasureSpace) -> np.ndarray:
        """rho(|x|) for every point of ``space``."""
        return np.asarray(self(space.radii), dtype=np.float64)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


def _scalar_or_array(out):
    if np.ndim(out) == 0:
        return float(out)
    return out


class CanonicalDensity(MetricDensityProfile):
    """rho(t) = 1 / (m(t) * nu(B_{m(t)})^(1/sigma)) with m(t) = t + m0.

    On each piece (r_k, r_{k+1}] of m the ball mass v is constant, so the
    integral of a piece is v^(-1/sigma) * log(m_hi / m_lo). ``integral`` uses
    an antiderivative anchored at the first positive critical radius.
    """

    kind = "canonical"

    def __init__(self, profile: BallProfile, m0: float, sigma: float):
        if sigma <= 0:
            raise OutOfRange(f"sigma must be positive, got {sigma}")
        if m0 not in (0, 1):
            raise OutOfRange(f"m0 must be 0 or 1, got {m0}")
        self.profile = profile
        self.m0 = float(m0)
        self.sigma = float(sigma)

        radii = profile.radii
        cum = profile.cumulative
        # weights[k] = v^(-1/sigma) for the ball mass v on (radii[k], radii[k+1]]
        safe = np.where(cum > 0, cum, 1.0)
        self._weights = np.where(cum > 0, safe ** (-1.0 / self.sigma), np.inf)
        # antiderivative at radii[k], k >= 1, with G(radii[1]) = 0
        steps = self._weights[1:-1] * np.log(radii[2:] / radii[1:-1])
        self._anchor = np.concatenate(([0.0], np.cumsum(steps)))

    def _ball_mass(self, m: np.ndarray) -> np.ndarray:
        v = np.asarray(self.profile.measure(m), dtype=np.float64)
        empty = np.atleast_1d((v == 0) & (m > 0))
        if empty.any():
            bad = float(np.min(np.atleast_1d(m)[empty]))
            raise ZeroBallMass(
                f"nu(B_{bad:g}) = 0 around the base point; give the base a positive mass "
                "or use m0=1"
            )
        return v

    def __call__(self, t):
        m = np.asarray(t, dtype=np.float64) + self.m0
        v = np.asarray(self._ball_mass(m), dtype=np.float64)
        with np.errstate(divide="ignore"):
            out = 1.0 / (m * v ** (1.0 / self.sigma))
        # m = 0 only at the base point when m0 = 0
        out = np.where(m > 0, out, np.inf)
        return _scalar_or_array(out)

    @property
    def value_at_zero(self) -> float:
        if self.m0 == 0:
            return math.inf
        return float(self(0.0))

    def _antiderivative(self, m: np.ndarray) -> np.ndarray:
        radii = self.profile.radii
        k = np.searchsorted(radii, m, side="left") - 1
        k_safe = np.clip(k, 0, len(radii) - 1)
        if np.any((k_safe == 0) & (m > 0) & np.isinf(self._weights[0])):
            raise ZeroBallMass("nu(B_r) = 0 for r up to the nearest neighbour of the base point")
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.where(k_safe >= 1, self._anchor[np.maximum(k_safe - 1, 0)], 0.0)
            start = np.where(k_safe >= 1, radii[k_safe], radii[1])
            out = base + self._weights[k_safe] * np.log(np.where(m > 0, m, 1.0) / start)
        return np.where(m > 0, out, -np.inf)

    def integral(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if np.any(a < 0) or np.any(b < a):
            raise OutOfRange("integral needs 0 <= a <= b")
        lo = self._antiderivative(np.atleast_1d(a + self.m0))
        hi = self._antiderivative(np.atleast_1d(b + self.m0))
        with np.errstate(invalid="ignore"):
            out = np.where(np.atleast_1d(a == b), 0.0, hi - lo)
        return _scalar_or_array(out.reshape(np.shape(a + b)))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "m0": self.m0, "sigma": self.sigma}


class TabulatedDensity(MetricDensityProfile):
    """Piecewise constant rho: ``values[k]`` on [breakpoints[k], breakpoints[k+1])."""

    kind = "tabulated"

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]):
        bp = np.asarray(breakpoints, dtype=np.float64)
        vals = np.asarray(values, dtype=np.float64)
        if bp.shape != vals.shape or bp.size == 0:
            raise OutOfRange("breakpoints and values must be nonempty and the same length")
        if bp[0] != 0.0 or np.any(np.diff(bp) <= 0):
            raise OutOfRange("breakpoints must start at 0 and increase strictly")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise OutOfRange("tabulated values must be finite and positive")
        if np.any(np.diff(vals) > 0):
            raise OutOfRange("a metric density must be nonincreasing")
        self.breakpoints = bp
        self.values = vals
        self._anchor = np.concatenate(([0.0], np.cumsum(vals[:-1] * np.diff(bp))))

    def __call__(self, t):
        k = np.searchsorted(self.breakpoints, np.asarray(t, dtype=np.float64), side="right") - 1
        return _scalar_or_array(self.values[np.maximum(k, 0)])

    def _antiderivative(self, t: np.ndarray) -> np.ndarray:
        k = np.maximum(np.searchsorted(self.breakpoints, t, side="right") - 1, 0)
        return self._anchor[k] + self.values[k] * (t - self.breakpoints[k])

    def integral(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if np.any(a < 0) or np.any(b < a):
            raise OutOfRange("integral needs 0 <= a <= b")
        return _scalar_or_array(self._antiderivative(b) - self._antiderivative(a))

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "breakpoints": self.breakpoints.tolist(),
            "values": self.values.tolist(),
        }


class PowerDensity(MetricDensityProfile):
    """rho(t) = scale * (1 + t)^(-exponent)."""

    kind = "power"

    def __init__(self, exponent: float, scale: float = 1.0):
        if exponent < 0 or scale <= 0:
            raise OutOfRange("power density needs exponent >= 0 and scale > 0")
        self.exponent = float(exponent)
        self.scale = float(scale)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        return _scalar_or_array(self.scale * (1.0 + t) ** (-self.exponent))

    def integral(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if np.any(a < 0) or np.any(b < a):
            raise OutOfRange("integral needs 0 <= a <= b")
        if self.exponent == 1.0:
            out = self.scale * (np.log1p(b) - np.log1p(a))
        else:
            e = 1.0 - self.exponent
            out = self.scale * ((1.0 + b) ** e - (1.0 + a) ** e) / e
        return _scalar_or_array(out)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "exponent": self.exponent, "scale": self.scale}


def constant_density(c: float) -> TabulatedDensity:
    """rho identically equal to ``c``."""
    return TabulatedDensity([0.0], [c])


def canonical_density(
    space: FiniteMetricMeasureSpace, m0: float, sigma: float, max_kappa: float = 10.0
) -> CanonicalDensity:
    """Canonical density of ``space`` built from the ball profile at its base point.

    For m0=0 uniform perfectness at the base is checked and a warning is
    logged when it is not certified; the transforms enforce it.

    Raises:
        ZeroBallMass: If a retained point would see an empty ball B_{m(x)}.
    """
    density = CanonicalDensity(space.profile(), m0, sigma)
    radii = space.radii
    density(radii[radii > 0] if m0 == 0 else radii)
    if m0 == 0:
        perf = uniform_perfectness(space, 0.0)
        if not perf.certified(max_kappa):
            logger.warning(
                f"⚠️ base point is not uniformly perfect (kappa={perf.kappa:.4g}); "
                "flattening bounds may not hold"
            )
    logger.debug(f"🧮 canonical density m0={m0:g} sigma={sigma:g} on {space.n} points")
    return density
