"""
Estimators for doubling, uniform perfectness, reverse doubling and the
measure inverse.

Ball masses on a finite space are left-continuous step functions of the
radius that only jump at critical radii, so every supremum here is taken over
critical radii (evaluated at or just above the jump) and the midpoints between
them. No tolerance knobs are involved.
"""

import logging
import math
from typing import Iterable, Optional

import numpy as np

from metricdeform.analysis.models import (
    DoublingEstimate,
    PerfectnessEstimate,
    RatioWindow,
    ReverseDoublingFit,
)
from metricdeform.errors import DegenerateMeasure, FitFailed, OutOfRange
from metricdeform.space import BallProfile, FiniteMetricMeasureSpace

logger = logging.getLogger("metricdeform")

KAPPA_SLACK = 1e-9
LOGLOG_SAMPLES = 64


def doubling_constant(
    space: FiniteMetricMeasureSpace,
    centers: Optional[Iterable[int]] = None,
    r_lo: Optional[float] = None,
    r_hi: Optional[float] = None,
) -> DoublingEstimate:
    """Exact sup of nu(B(x,2r))/nu(B(x,r)) over centers and critical radii.

    On (r_k, r_{k+1}] the smaller ball is constant while the larger one is
    largest at the right end, so evaluating at the positive critical radii is
    exhaustive. ``centers`` and ``[r_lo, r_hi]`` restrict the search.
    """
    centers = range(space.n) if centers is None else [int(c) for c in centers]
    best = -1.0
    witness = (space.base, 0.0)
    checked = 0
    for x in centers:
        prof = space.profile(x)
        r = prof.radii[1:]
        if r_lo is not None:
            r = r[r >= r_lo]
        if r_hi is not None:
            r = r[r <= r_hi]
        if r.size == 0:
            continue
        small = np.atleast_1d(prof.measure(r))
        big = np.atleast_1d(prof.measure(2.0 * r))
        ok = small > 0
        if not ok.any():
            continue
        checked += 1
        ratio = np.full(r.shape, -np.inf)
        ratio[ok] = big[ok] / small[ok]
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best = float(ratio[k])
            witness = (x, float(r[k]))

    if best < 0:
        raise DegenerateMeasure("no ball with positive mass among the sampled centers")

    policy = "all positive critical radii"
    if r_lo is not None or r_hi is not None:
        policy = f"critical radii in [{r_lo}, {r_hi}]"
    logger.debug(f"📐 C_nu={best:.6g} at center {witness[0]}, r={witness[1]:.6g}")
    return DoublingEstimate(
        C_nu=max(best, 1.0),
        witness_center=witness[0],
        witness_radius=witness[1],
        radii_policy=policy,
        centers_checked=checked,
    )


def uniform_perfectness(
    space: FiniteMetricMeasureSpace,
    m0: float,
    center: Optional[int] = None,
) -> PerfectnessEstimate:
    """Smallest kappa with B(c, kappa r) minus B(c, r) nonempty for grid radii r >= m0.

    The grid is r = m0 (when m0 > 0) and every positive critical radius
    r_k >= m0 whose ball is not the whole space, evaluated just above r_k. The
    binding requirement there is r_{k+1} < kappa * r_k.
    """
    if m0 < 0:
        raise OutOfRange(f"m0 must be nonnegative, got {m0}")
    center = space.base if center is None else int(center)
    prof = space.profile(center)
    radii = prof.radii
    outer = radii[-1]

    at = []
    ratios = []
    if 0 < m0 < outer and not np.any(radii == m0):
        nxt = radii[np.searchsorted(radii, m0, side="left")]
        at.append(float(m0))
        ratios.append(float(nxt / m0))
    idx = np.flatnonzero((radii > 0) & (radii >= m0) & (radii < outer))
    at.extend(radii[idx].tolist())
    ratios.extend((radii[idx + 1] / radii[idx]).tolist())

    if ratios:
        k = int(np.argmax(ratios))
        kappa = max(ratios[k], 1.0) * (1.0 + KAPPA_SLACK)
        witness = at[k]
    else:
        kappa = 1.0 + KAPPA_SLACK
        witness = None
    return PerfectnessEstimate(
        kappa=kappa, m0=m0, center=center, witness_radius=witness, radii_checked=len(ratios)
    )


def radius_grid(prof: BallProfile, m0: float) -> np.ndarray:
    """Positive critical radii >= m0, midpoints between them, and m0 itself."""
    radii = prof.radii
    grid = np.union1d(radii, (radii[:-1] + radii[1:]) / 2.0)
    if m0 > 0:
        grid = np.union1d(grid, [m0])
    return grid[(grid > 0) & (grid >= m0)]


def certify_reverse_doubling(
    space: FiniteMetricMeasureSpace, m0: float, alpha: float
) -> tuple[float, int]:
    """Smallest Lambda >= 1 with nu(B_r)/nu(B_R) <= Lambda (r/R)^alpha on the grid.

    Pairs run over m0 <= r < R with r on the radius grid and R on the grid or
    at the limit 2 R_inf. Returns (Lambda, number of pairs checked).
    """
    prof = space.profile()
    grid = radius_grid(prof, m0)
    targets = np.append(grid, 2.0 * prof.radii[-1])
    target_mass = np.atleast_1d(prof.measure(targets))
    lam = 1.0
    pairs = 0
    for r in grid:
        vr = prof.measure(r)
        sel = (targets > r) & (target_mass > 0)
        if not sel.any():
            continue
        vals = vr / target_mass[sel] * (targets[sel] / r) ** alpha
        pairs += int(sel.sum())
        lam = max(lam, float(vals.max()))
    return lam, pairs


def loglog_slope(space: FiniteMetricMeasureSpace, m0: float = 0.0) -> Optional[float]:
    """Least-squares slope of log nu(B_r) against log r on a geometric grid."""
    prof = space.profile()
    lo = max(m0, float(prof.radii[1]))
    hi = float(prof.radii[-1])
    if hi <= lo:
        return None
    ts = np.geomspace(lo, hi, LOGLOG_SAMPLES)
    mass = np.atleast_1d(prof.measure(ts))
    ok = mass > 0
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(ts[ok]), np.log(mass[ok]), 1)[0])


def reverse_doubling_fit(
    space: FiniteMetricMeasureSpace,
    m0: float,
    perfectness: Optional[PerfectnessEstimate] = None,
    max_kappa: float = math.inf,
) -> ReverseDoublingFit:
    """Fit alpha from the smallest growth factor over scales 4 kappa apart, then certify.

    Raises:
        FitFailed: When kappa is not certified or no positive alpha exists.
    """
    perf = perfectness or uniform_perfectness(space, m0)
    if not perf.certified(max_kappa):
        raise FitFailed(f"uniform perfectness not certified (kappa={perf.kappa})")
    kappa = perf.kappa
    prof = space.profile()
    outer = float(prof.radii[-1])

    grid = radius_grid(prof, m0)
    ts = grid[grid < outer / 2.0]
    vt = np.atleast_1d(prof.measure(ts)) if ts.size else np.array([])
    ok = vt > 0
    growth = None
    if ok.any():
        growth = float(np.min(np.atleast_1d(prof.measure(4.0 * kappa * ts[ok])) / vt[ok]))
        if growth <= 1.0:
            raise FitFailed(f"ball masses do not grow over scales {4 * kappa:.3g} apart")
        alpha = math.log(growth) / math.log(4.0 * kappa)
    else:
        # no scale to measure growth on: every pair is single-scale
        alpha = 1.0

    lam, pairs = certify_reverse_doubling(space, m0, alpha)
    logger.debug(f"📈 reverse doubling alpha={alpha:.4g} Lambda={lam:.4g} ({pairs} pairs)")
    return ReverseDoublingFit(
        alpha=alpha,
        Lambda=lam,
        growth=growth,
        kappa=kappa,
        m0=m0,
        r_min=float(m0),
        r_max=2.0 * outer,
        pairs_checked=pairs,
        alpha_loglog=loglog_slope(space, m0),
    )


def measure_inverse(space: FiniteMetricMeasureSpace, t):
    """nu^{-1}(t) = sup{r >= 0 : nu(B_r) <= t}, exact on the step function.

    The supremum is the critical radius r_c where c counts the closed-ball
    masses that do not exceed t. Accepts a scalar or an array of t values.

    Raises:
        OutOfRange: If some t is negative or not below the total mass.
    """
    prof = space.profile()
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0) or np.any(t_arr >= prof.total):
        raise OutOfRange(f"t must lie in [0, {prof.total}), got {t}")
    c = np.searchsorted(prof.cumulative, t_arr, side="right")
    out = prof.radii[c]
    if np.ndim(out) == 0:
        return float(out)
    return out


def inverse_doubling_ratio(space: FiniteMetricMeasureSpace, m0: float) -> RatioWindow:
    """Window of nu^{-1}(2t)/nu^{-1}(t) over nu(B_{m0}) <= t < nu(Z)/2.

    t is also kept above the base mass so that nu^{-1}(t) > 0. Both sides are
    step functions of t jumping at the closed-ball masses S_k and at S_k / 2;
    the grid takes those breakpoints and the midpoints between them.
    """
    prof = space.profile()
    cum = prof.cumulative
    t_lo = max(prof.measure(m0) if m0 > 0 else 0.0, float(cum[0]))
    t_hi = prof.total / 2.0
    marks = np.union1d(cum, cum / 2.0)
    marks = np.union1d(marks, [t_lo])
    marks = marks[(marks >= t_lo) & (marks < t_hi)]
    if marks.size == 0:
        return RatioWindow(lo=1.0, hi=1.0, samples=0)
    ts = np.union1d(marks, (marks[:-1] + marks[1:]) / 2.0)
    ratio = measure_inverse(space, 2.0 * ts) / measure_inverse(space, ts)
    lo_k = int(np.argmin(ratio))
    hi_k = int(np.argmax(ratio))
    return RatioWindow(
        lo=float(ratio[lo_k]),
        hi=float(ratio[hi_k]),
        witness_lo=float(ts[lo_k]),
        witness_hi=float(ts[hi_k]),
        samples=int(ts.size),
    )


def _ball_masses(space: FiniteMetricMeasureSpace, radius: float) -> np.ndarray:
    return (space.dist < radius).astype(np.float64) @ space.mass


def ball_comparison_constant(
    space: FiniteMetricMeasureSpace, a: float = 2.0, C_nu: Optional[float] = None
) -> RatioWindow:
    """Window of nu(B(x,r))/nu(B(x',r')) for d(x,x') <= a r and r/a <= r' <= a r.

    Radii r run over a dyadic grid spanning the distances of the space and r'
    over {r/a, r, a r}. The predicted bound iterates the doubling constant
    until 2^k >= a (1 + a).
    """
    off = space.dist[~np.eye(space.n, dtype=bool)]
    r_min, r_max = float(off.min()), float(off.max())
    steps = int(math.ceil(math.log2(r_max / r_min))) + 2
    scales = r_min * 2.0 ** np.arange(-1, steps)

    cache = {}

    def masses(radius):
        if radius not in cache:
            cache[radius] = _ball_masses(space, radius)
        return cache[radius]

    lo, hi = math.inf, 0.0
    lo_at = hi_at = None
    samples = 0
    for r in scales:
        near = space.dist <= a * r
        own = masses(r)
        for other in (r / a, r, a * r):
            theirs = masses(other)
            sel = near & (theirs[None, :] > 0) & (own[:, None] > 0)
            if not sel.any():
                continue
            ratio = (own[:, None] / np.where(theirs > 0, theirs, 1.0)[None, :])[sel]
            samples += int(ratio.size)
            if ratio.min() < lo:
                lo, lo_at = float(ratio.min()), float(r)
            if ratio.max() > hi:
                hi, hi_at = float(ratio.max()), float(r)

    bound = None
    if C_nu is not None:
        k = int(math.ceil(math.log2(a * (1.0 + a))))
        bound = C_nu**k
    return RatioWindow(
        lo=lo, hi=hi, witness_lo=lo_at, witness_hi=hi_at, bound=bound, samples=samples
    )
