"""
Finite metric measure spaces.

A space is an immutable bundle of point ids, an exact symmetric distance
matrix, point masses and a base point. All ball questions are answered from
``BallProfile`` step functions so that estimators, densities and checkers
agree bit for bit on every ball mass.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from metricdeform.errors import DomainMismatch, SpaceValidationError, Violation

logger = logging.getLogger("metricdeform")

PointId = Union[int, str]

TRIANGLE_RTOL = 1e-12


@dataclass(frozen=True)
class BallProfile:
    """Exact step function r -> mass of the open ball B(center, r).

    ``radii`` are the distinct distances from the center in increasing order
    (``radii[0] == 0``) and ``cumulative[k]`` is the mass of the closed ball of
    radius ``radii[k]``. The open ball of radius r therefore has mass
    ``cumulative[k - 1]`` where k counts the radii strictly below r.
    """

    center: int
    radii: np.ndarray
    cumulative: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])

    def count_below(self, r) -> np.ndarray:
        """Number of critical radii strictly below r."""
        return np.searchsorted(self.radii, r, side="left")

    def measure(self, r):
        """Mass of the open ball of radius r (vectorised over r)."""
        k = self.count_below(r)
        padded = np.concatenate(([0.0], self.cumulative))
        out = padded[k]
        if np.ndim(out) == 0:
            return float(out)
        return out

    def closed_measure(self, r):
        """Mass of the closed ball of radius r."""
        k = np.searchsorted(self.radii, r, side="right")
        padded = np.concatenate(([0.0], self.cumulative))
        out = padded[k]
        if np.ndim(out) == 0:
            return float(out)
        return out

    def next_radius_above(self, r) -> Optional[float]:
        """Smallest critical radius strictly greater than r, or None."""
        k = int(np.searchsorted(self.radii, r, side="right"))
        if k >= len(self.radii):
            return None
        return float(self.radii[k])


def _profile_from_row(center: int, row: np.ndarray, mass: np.ndarray) -> BallProfile:
    order = np.argsort(row, kind="stable")
    sorted_d = row[order]
    running = np.cumsum(mass[order])
    radii, counts = np.unique(sorted_d, return_counts=True)
    ends = np.cumsum(counts) - 1
    return BallProfile(center=center, radii=radii, cumulative=running[ends])


@dataclass(frozen=True, eq=False)
class FiniteMetricMeasureSpace:
    """A validated finite metric measure space with a base point.

    Use :func:`build_space` to construct one; the constructor itself does not
    validate. ``unbounded`` marks a finite truncation of an unbounded space and
    ``punctured`` marks the base as a puncture that m0=0 transforms remove.
    """

    point_ids: Tuple[PointId, ...]
    dist: np.ndarray
    mass: np.ndarray
    base: int
    unbounded: bool = False
    punctured: bool = False
    coords: Optional[np.ndarray] = None
    _profiles: Dict[int, BallProfile] = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def n(self) -> int:
        return len(self.point_ids)

    @property
    def radii(self) -> np.ndarray:
        """Distances |x| = d(x, b) for every point."""
        return self.dist[self.base]

    @property
    def outer_radius(self) -> float:
        """R_inf, the largest distance from the base point."""
        return float(self.radii.max())

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    def index_of(self, point_id: PointId) -> int:
        try:
            return self.point_ids.index(point_id)
        except ValueError:
            raise KeyError(f"unknown point id {point_id!r}") from None

    def profile(self, center: Optional[int] = None) -> BallProfile:
        """Ball profile around ``center`` (the base point by default)."""
        center = self.base if center is None else int(center)
        cached = self._profiles.get(center)
        if cached is None:
            cached = _profile_from_row(center, self.dist[center], self.mass)
            self._profiles[center] = cached
        return cached

    @cached_property
    def pair_ball_masses(self) -> np.ndarray:
        """Matrix of nu(B(x, d(x, y))) for every ordered pair (x, y)."""
        out = np.empty_like(self.dist)
        for x in range(self.n):
            prof = self.profile(x)
            out[x] = prof.measure(self.dist[x])
        return out

    def same_as(self, other: "FiniteMetricMeasureSpace") -> bool:
        """Bit-exact equality of every field that defines the space."""
        return (
            self.point_ids == other.point_ids
            and self.base == other.base
            and self.unbounded == other.unbounded
            and self.punctured == other.punctured
            and np.array_equal(self.dist, other.dist)
            and np.array_equal(self.mass, other.mass)
        )

    def restrict(self, keep: Sequence[int], base: int) -> "FiniteMetricMeasureSpace":
        """Sub-space on ``keep`` (indices) with ``base`` given as an index into ``keep``."""
        keep = np.asarray(keep, dtype=int)
        return _freeze(
            tuple(self.point_ids[i] for i in keep),
            self.dist[np.ix_(keep, keep)],
            self.mass[keep],
            base,
            unbounded=self.unbounded,
            punctured=False,
        )


@dataclass(frozen=True)
class BallQueryResult:
    center: int
    radius: float
    members: Tuple[int, ...]
    mass: float


def _freeze(ids, dist, mass, base, unbounded=False, punctured=False, coords=None):
    dist = np.array(dist, dtype=np.float64, copy=True)
    mass = np.array(mass, dtype=np.float64, copy=True)
    dist.setflags(write=False)
    mass.setflags(write=False)
    if coords is not None:
        coords = np.array(coords, dtype=np.float64, copy=True)
        coords.setflags(write=False)
    return FiniteMetricMeasureSpace(
        point_ids=tuple(ids),
        dist=dist,
        mass=mass,
        base=int(base),
        unbounded=bool(unbounded),
        punctured=bool(punctured),
        coords=coords,
    )


def _worst_triangle(dist: np.ndarray) -> Optional[Tuple[float, Tuple[int, int, int]]]:
    """Largest relative excess d(i,j) - d(i,k) - d(k,j) over the triples."""
    n = dist.shape[0]
    worst = 0.0
    witness = None
    for k in range(n):
        through = dist[:, k, None] + dist[None, k, :]
        excess = dist - through
        violated = excess > TRIANGLE_RTOL * dist
        if not violated.any():
            continue
        rel = np.where(violated, excess / np.where(dist > 0, dist, 1.0), 0.0)
        flat = int(np.argmax(rel))
        if rel.flat[flat] > worst:
            i, j = divmod(flat, n)
            worst = float(rel.flat[flat])
            witness = (int(min(i, j)), k, int(max(i, j)))
    if witness is None:
        return None
    return worst, witness


def validate(
    ids: Sequence[PointId],
    dist: np.ndarray,
    mass: np.ndarray,
    base_index: Optional[int],
    punctured: bool = False,
    check_triangle: bool = True,
) -> List[Violation]:
    """Collect every violated axiom; an empty list means the data is a valid space."""
    problems: List[Violation] = []
    n = len(ids)
    if n < 2:
        problems.append(Violation(kind="TooFewPoints", message=f"need n >= 2, got {n}"))
    if len(set(ids)) != n:
        problems.append(Violation(kind="DuplicateIds", message="point ids must be unique"))
    if base_index is None:
        problems.append(Violation(kind="UnknownBase", message="base id is not a point id"))
    if dist.shape != (n, n) or mass.shape != (n,):
        problems.append(
            Violation(
                kind="ShapeMismatch",
                message=f"dist {dist.shape} and mass {mass.shape} do not match n={n}",
            )
        )
        return problems
    if not (np.isfinite(dist).all() and np.isfinite(mass).all()):
        problems.append(Violation(kind="NonFinite", message="distances and masses must be finite"))
        return problems

    if np.any(np.diag(dist) != 0.0):
        i = int(np.flatnonzero(np.diag(dist) != 0.0)[0])
        problems.append(
            Violation(kind="NonZeroDiagonal", message=f"d({i},{i}) != 0", witness=(i,))
        )

    asym = dist != dist.T
    if asym.any():
        i, j = (int(v) for v in np.argwhere(asym)[0])
        problems.append(
            Violation(
                kind="NonSymmetric",
                message=f"d({i},{j})={dist[i, j]!r} but d({j},{i})={dist[j, i]!r}",
                witness=(i, j),
            )
        )

    off = ~np.eye(n, dtype=bool)
    zero = off & (dist <= 0.0)
    if zero.any():
        i, j = (int(v) for v in np.argwhere(zero)[0])
        problems.append(
            Violation(
                kind="ZeroDistanceDistinctPoints",
                message=f"distinct points {i} and {j} are at distance {dist[i, j]!r}",
                witness=(i, j),
            )
        )

    bad_mass = [
        i for i in range(n) if mass[i] < 0 or (mass[i] == 0 and i != base_index)
    ]
    if bad_mass:
        problems.append(
            Violation(
                kind="NegativeMass",
                message=f"masses must be positive off the base (point {bad_mass[0]})",
                witness=tuple(bad_mass),
            )
        )
    if base_index is not None and mass[base_index] == 0 and not punctured:
        problems.append(
            Violation(
                kind="ZeroBaseMass",
                message="mass(base)=0 is only allowed for punctured spaces",
                witness=(base_index,),
            )
        )

    if check_triangle and not asym.any() and n >= 3:
        found = _worst_triangle(dist)
        if found is not None:
            rel, (i, k, j) = found
            problems.append(
                Violation(
                    kind="TriangleViolation",
                    message=(
                        f"d({i},{j})={dist[i, j]!r} exceeds d({i},{k})+d({k},{j}) "
                        f"by a relative {rel:.3e}"
                    ),
                    witness=(i, k, j),
                )
            )
    return problems


def build_space(
    ids: Sequence[PointId],
    dist,
    mass,
    base: PointId,
    *,
    unbounded: bool = False,
    punctured: bool = False,
    coords=None,
    check_triangle: bool = True,
) -> FiniteMetricMeasureSpace:
    """Validate raw data and return an immutable space.

    Args:
        ids: Point identifiers, unique.
        dist: n x n distance matrix.
        mass: Point masses.
        base: Identifier of the base point.
        unbounded: The space is a finite truncation of an unbounded space.
        punctured: The base point is a puncture (its mass may be zero).
        coords: Optional coordinates the matrix was computed from.
        check_triangle: Run the cubic triangle-inequality scan.

    Raises:
        SpaceValidationError: Listing every violated axiom.
    """
    ids = list(ids)
    dist_arr = np.asarray(dist, dtype=np.float64)
    mass_arr = np.asarray(mass, dtype=np.float64)
    base_index = ids.index(base) if base in ids else None
    problems = validate(ids, dist_arr, mass_arr, base_index, punctured, check_triangle)
    if problems:
        for problem in problems:
            logger.debug(f"❌ {problem.kind}: {problem.message}")
        raise SpaceValidationError(problems)
    return _freeze(ids, dist_arr, mass_arr, base_index, unbounded, punctured, coords)


def ball(space: FiniteMetricMeasureSpace, center: int, radius: float) -> BallQueryResult:
    """Open ball {y : d(center, y) < radius}."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    members = np.flatnonzero(space.dist[center] < radius)
    return BallQueryResult(
        center=int(center),
        radius=float(radius),
        members=tuple(int(i) for i in members),
        mass=float(space.mass[members].sum()),
    )


def radius_of(space: FiniteMetricMeasureSpace, x: int) -> float:
    """|x| = d(x, b)."""
    return float(space.dist[x, space.base])


def critical_radii(space: FiniteMetricMeasureSpace, center: Optional[int] = None) -> List[float]:
    """Distinct distances from ``center``; ball masses only jump here."""
    return [float(r) for r in space.profile(center).radii]


def validate_field(space: FiniteMetricMeasureSpace, u) -> np.ndarray:
    """Check that ``u`` is a finite scalar field on ``space`` and return it as an array."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.shape != (space.n,):
        raise DomainMismatch(f"field has shape {arr.shape}, space has {space.n} points")
    if not np.isfinite(arr).all():
        raise DomainMismatch("field entries must be finite")
    return arr
