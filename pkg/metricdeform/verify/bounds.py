"""
Pairwise bound battery for a canonical deformation.

Each check yields one report with the observed window and ``passed`` for
its inequality. Constants come from the ledger, which is either fitted on
the same anchored pairs or fixed beforehand. Fitted constants pass the
ledger-based checks by construction; fixed ones can fail them.
"""

import logging
from typing import List, Optional

import numpy as np

from metricdeform.analysis import ValidAnnulus, uniform_perfectness
from metricdeform.deform import ConstantsLedger, DeformedSpace, compute_ledger
from metricdeform.verify.report import (
    ComparabilityReport,
    matrix_window,
    not_applicable,
    vector_window,
)

logger = logging.getLogger("metricdeform")

BOUND_RTOL = 1e-9


def ball_minimum_density(deformed: DeformedSpace) -> np.ndarray:
    """For each pair, the least rho over the open ball B(x, d(x, y)) within Z'."""
    dist = deformed.dist
    rho = deformed.rho
    n = deformed.n
    out = np.empty((n, n))
    for x in range(n):
        order = np.argsort(dist[x], kind="stable")
        sorted_d = dist[x, order]
        running = np.minimum.accumulate(rho[order])
        inside = np.searchsorted(sorted_d, dist[x], side="left")
        out[x] = running[np.maximum(inside - 1, 0)]
    return out


def _window_report(statement, values, mask, deformed, digest, **extra) -> ComparabilityReport:
    lo, hi, w_lo, w_hi, count = matrix_window(values, mask, deformed.retained)
    return ComparabilityReport(
        statement=statement,
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        samples=count,
        inputs_digest=digest,
        **extra,
    )


def check_metric_sandwich(deformed: DeformedSpace, digest: str = "") -> ComparabilityReport:
    """m d <= dhat <= (rho(x) + rho(y)) d on every pair; the window is dhat / (M d)."""
    off = ~np.eye(deformed.n, dtype=bool)
    dist = deformed.dist
    upper = (deformed.rho[:, None] + deformed.rho[None, :]) * dist
    lower = ball_minimum_density(deformed) * dist
    with np.errstate(divide="ignore", invalid="ignore"):
        to_upper = deformed.dhat / upper
        to_lower = deformed.dhat / lower
    low_lo, low_hi, _, _, _ = matrix_window(to_lower, off, deformed.retained)
    passed = bool(
        np.all(deformed.dhat[off] <= upper[off] * (1.0 + BOUND_RTOL))
        and np.all(deformed.dhat[off] >= lower[off] * (1.0 - BOUND_RTOL))
    )
    return _window_report(
        "metric-sandwich",
        to_upper,
        off,
        deformed,
        digest,
        passed=passed,
        windows={"over_lower": (low_lo, low_hi)},
    )


def check_integral_lower_bound(deformed: DeformedSpace, digest: str = "") -> ComparabilityReport:
    """dhat(x, y) >= integral of rho from |x| to |y| when |x| <= |y|."""
    radii = deformed.radii
    ordered = radii[:, None] <= radii[None, :]
    a = np.minimum(radii[:, None], radii[None, :])
    b = np.maximum(radii[:, None], radii[None, :])
    integral = np.asarray(deformed.density.integral(a, b), dtype=np.float64)
    mask = ordered & ~np.eye(deformed.n, dtype=bool) & (integral > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = deformed.dhat / integral
    passed = bool(np.all(ratio[mask] >= 1.0 - BOUND_RTOL))
    return _window_report("integral-lower-bound", ratio, mask, deformed, digest, passed=passed)


def chain_upper_factor(kappa: float) -> float:
    return 8.0 * kappa**3 / (kappa - 1.0)


def check_chain_upper_bound(
    deformed: DeformedSpace, max_kappa: float = 10.0, digest: str = ""
) -> ComparabilityReport:
    """dhat(x, y) <= 8 kappa^3 / (kappa - 1) * integral of rho over [|x| / kappa, |y|].

    Only applies when the source is uniformly perfect at the base for r >= m0.
    """
    statement = "chain-upper-bound"
    m0 = deformed.m0
    perf = uniform_perfectness(deformed.source, m0)
    if not perf.certified(max_kappa):
        return not_applicable(statement, f"not uniformly perfect (kappa={perf.kappa:.4g})", digest)
    kappa = perf.kappa
    radii = deformed.radii
    a = np.minimum(radii[:, None], radii[None, :])
    b = np.maximum(radii[:, None], radii[None, :])
    mask = (radii[:, None] <= radii[None, :]) & (a >= m0) & ~np.eye(deformed.n, dtype=bool)
    bound = chain_upper_factor(kappa) * np.asarray(
        deformed.density.integral(a / kappa, b), dtype=np.float64
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = deformed.dhat / bound
    passed = bool(np.all(ratio[mask] <= 1.0 + BOUND_RTOL))
    return _window_report(
        statement,
        ratio,
        mask,
        deformed,
        digest,
        passed=passed,
        details={"kappa": kappa, "factor": chain_upper_factor(kappa)},
    )


def _anchors(deformed: DeformedSpace, ledger: ConstantsLedger) -> np.ndarray:
    annulus = ValidAnnulus(*ledger.annulus)
    return annulus.contains(deformed.radii)


def check_two_regimes(
    deformed: DeformedSpace, ledger: ConstantsLedger, digest: str = ""
) -> List[ComparabilityReport]:
    """Separated pairs against scale(x), comparable pairs against rho(x) d."""
    anchor = _anchors(deformed, ledger)
    off = ~np.eye(deformed.n, dtype=bool)
    pairs = off & anchor[:, None]
    excluded = int((off & ~anchor[:, None]).sum())
    gauge = deformed.gauge
    separated = pairs & (gauge[None, :] >= 2.0 * gauge[:, None])
    crossing = separated | (pairs & (gauge[:, None] >= 2.0 * gauge[None, :]))
    comparable = pairs & ~crossing
    with np.errstate(divide="ignore", invalid="ignore"):
        to_scale = deformed.dhat / deformed.scale[:, None]
        to_rho = deformed.dhat / (deformed.rho[:, None] * deformed.dist)

    sep = _window_report(
        "separated-lower-bound", to_scale, separated, deformed, digest, excluded=excluded
    )
    sep.passed = bool(np.all(to_scale[separated] >= ledger.c2.value * (1.0 - BOUND_RTOL)))
    comp = _window_report(
        "comparable-pairs", to_rho, comparable, deformed, digest, excluded=excluded
    )
    comp.passed = bool(
        np.all(to_rho[comparable] >= ledger.c1.value * (1.0 - BOUND_RTOL))
        and np.all(to_rho[comparable] <= ledger.C1.value * (1.0 + BOUND_RTOL))
    )
    return [sep, comp]


def check_ball_shape(
    deformed: DeformedSpace, ledger: ConstantsLedger, digest: str = ""
) -> ComparabilityReport:
    """B(x, a1 r / rho(x)) inside Bhat(x, r) inside B(x, a2 r / rho(x)) for r <= c0 scale(x).

    Radii r run over the deformed critical radii around each anchor and the
    midpoints between them. The window holds the inclusion margins: dhat / r
    over the inner ball and rho(x) d / (a2 r) over the deformed ball; both
    must stay below 1.
    """
    anchor = np.flatnonzero(_anchors(deformed, ledger))
    c0, a1, a2 = ledger.c0.value, ledger.a1.value, ledger.a2.value
    margins, witnesses = [], []
    for i in anchor:
        limit = c0 * float(deformed.scale[i])
        rho = float(deformed.rho[i])
        row_hat = deformed.dhat[i]
        row = deformed.dist[i]
        radii = np.unique(row_hat)
        samples = np.union1d(radii[radii > 0], ((radii[:-1] + radii[1:]) / 2.0))
        for r in samples[samples <= limit]:
            inner = row < a1 * r / rho
            outer = row_hat < r
            margin = max(
                float(np.max(row_hat[inner]) / r),
                float(np.max(rho * row[outer]) / (a2 * r)),
            )
            margins.append(margin)
            witnesses.append([deformed.source_index(i), float(r)])
    lo, hi, w_lo, w_hi = vector_window(margins, witnesses)
    return ComparabilityReport(
        statement="ball-shape",
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        samples=len(margins),
        excluded=int(deformed.n - anchor.size),
        inputs_digest=digest,
        passed=bool(all(m < 1.0 for m in margins)),
        details={"c0": c0, "a1": a1, "a2": a2},
    )


def check_far_pairs(
    deformed: DeformedSpace, ledger: ConstantsLedger, digest: str = ""
) -> List[ComparabilityReport]:
    """Outward pairs stay within C' scale(x); close pairs have comparable gauges.

    far-pair-upper: dhat(x, y) <= C' scale(x) whenever |x| <= |y|.

    gauge-converse: over pairs of anchored points with dhat <= C2 scale(x),
    either m(x) < 2 m(y) or nu(B_{m(x)}) <= (C2 / c2)^sigma nu(B_{m(y)}).
    The window holds m(x) / m(y) over those pairs.
    """
    anchor = _anchors(deformed, ledger)
    off = ~np.eye(deformed.n, dtype=bool)
    pairs = off & anchor[:, None]
    radii = deformed.radii
    with np.errstate(divide="ignore", invalid="ignore"):
        to_scale = deformed.dhat / deformed.scale[:, None]
    outward = pairs & (radii[:, None] <= radii[None, :])
    C_prime = ledger.C_prime.value
    far = _window_report(
        "far-pair-upper",
        to_scale,
        outward,
        deformed,
        digest,
        passed=bool(np.all(to_scale[outward] <= C_prime * (1.0 + BOUND_RTOL))),
        details={"C_prime": C_prime},
    )

    C2, c2 = ledger.C2.value, ledger.c2.value
    close = pairs & anchor[None, :] & (deformed.dhat <= C2 * deformed.scale[:, None])
    gauge = deformed.gauge
    mass = deformed.gauge_mass
    swapped = close & (gauge[:, None] >= 2.0 * gauge[None, :])
    mass_bound = (C2 / c2) ** deformed.sigma
    mass_ratio = mass[:, None] / mass[None, :]
    converse = _window_report(
        "gauge-converse",
        gauge[:, None] / gauge[None, :],
        close,
        deformed,
        digest,
        passed=bool(np.all(mass_ratio[swapped] <= mass_bound * (1.0 + BOUND_RTOL))),
        cases={"close": int(close.sum()), "swapped": int(swapped.sum())},
        details={"C0": C2, "mass_bound": mass_bound},
    )
    return [far, converse]

def check_infinity_bounds(
    deformed: DeformedSpace, ledger: ConstantsLedger, digest: str = ""
) -> ComparabilityReport:
    """c2 scale(x) <= upper(x) and lower(x) <= C2 scale(x) on anchored points (m0=1).

    The main window is upper(x) / scale(x); lower(x) / scale(x) is kept in
    ``windows["lower"]``.
    """
    statement = "infinity-distance-bounds"
    if deformed.infinity is None:
        return not_applicable(statement, "no infinity estimates (m0=0)", digest)
    anchor = _anchors(deformed, ledger)
    scale = deformed.scale[anchor]
    upper = deformed.infinity.upper[anchor] / scale
    lower = deformed.infinity.lower[anchor] / scale
    points = [deformed.source_index(i) for i in np.flatnonzero(anchor)]
    lo, hi, w_lo, w_hi = vector_window(upper, points)
    low_lo, low_hi, _, _ = vector_window(lower, points)
    passed = bool(
        np.all(upper >= ledger.c2.value * (1.0 - BOUND_RTOL))
        and np.all(lower <= ledger.C2.value * (1.0 + BOUND_RTOL))
    )
    return ComparabilityReport(
        statement=statement,
        min_ratio=lo,
        max_ratio=hi,
        witness_min=None if w_lo is None else [w_lo],
        witness_max=None if w_hi is None else [w_hi],
        samples=len(points),
        excluded=int(deformed.n - len(points)),
        inputs_digest=digest,
        passed=passed,
        windows={"lower": (low_lo, low_hi)},
        flags=["fallback-spread"] if deformed.infinity.fallback else [],
    )

def check_sandwich_and_bounds(
    deformed: DeformedSpace,
    ledger: Optional[ConstantsLedger] = None,
    max_kappa: float = 10.0,
    digest: str = "",
) -> List[ComparabilityReport]:
    """Run the whole pairwise battery."""
    ledger = ledger or compute_ledger(deformed)
    reports = [
        check_metric_sandwich(deformed, digest),
        check_integral_lower_bound(deformed, digest),
        check_chain_upper_bound(deformed, max_kappa, digest),
        *check_two_regimes(deformed, ledger, digest),
        check_ball_shape(deformed, ledger, digest),
        *check_far_pairs(deformed, ledger, digest),
        check_infinity_bounds(deformed, ledger, digest),
    ]
    failed = [r.statement for r in reports if r.applicable and r.passed is False]
    if failed:
        logger.warning(f"⚠️ bound checks failed: {', '.join(failed)}")
    return reports
