"""
Doubling of the deformed measure and ball volumes of the deformed space.

Ball volumes are sampled at every critical radius of the deformed metric
around each anchored point, and at the midpoints between them.
"""

import logging
import math
from typing import List, Optional

import numpy as np

from metricdeform.analysis import (
    ValidAnnulus,
    default_annulus,
    doubling_constant,
    inverse_doubling_ratio,
    measure_inverse,
)
from metricdeform.deform import ConstantsLedger, DeformedSpace, compute_ledger
from metricdeform.verify.report import ComparabilityReport, vector_window

logger = logging.getLogger("metricdeform")


def check_doubling_preservation(
    deformed: DeformedSpace,
    annulus: Optional[ValidAnnulus] = None,
    digest: str = "",
) -> ComparabilityReport:
    """Doubling constant of the deformed measure over anchored centers.

    The report window is the single value C_nuhat; the source constant is
    kept in ``details`` for comparison.
    """
    annulus = annulus or default_annulus(deformed.source)
    anchors = np.flatnonzero(annulus.contains(deformed.radii))
    excluded = deformed.n - anchors.size
    if anchors.size == 0:
        anchors = np.arange(deformed.n)
        excluded = 0
    target = deformed.space
    estimate = doubling_constant(target, centers=anchors)
    source = doubling_constant(deformed.source)
    center = deformed.source_index(estimate.witness_center)
    logger.debug(f"📐 C_nuhat={estimate.C_nu:.4g} (C_nu={source.C_nu:.4g})")
    return ComparabilityReport(
        statement="doubling-preservation",
        min_ratio=estimate.C_nu,
        max_ratio=estimate.C_nu,
        witness_min=[center, estimate.witness_radius],
        witness_max=[center, estimate.witness_radius],
        excluded=int(excluded),
        samples=estimate.centers_checked,
        inputs_digest=digest,
        passed=math.isfinite(estimate.C_nu),
        details={"C_nu": source.C_nu, "C_nuhat": estimate.C_nu},
    )


def _sample_radii(radii: np.ndarray) -> np.ndarray:
    positive = radii[radii > 0]
    mids = (radii[:-1] + radii[1:]) / 2.0
    return np.union1d(positive, mids[mids > 0])


def _report(statement, values, witnesses, digest, excluded, **extra) -> ComparabilityReport:
    lo, hi, w_lo, w_hi = vector_window(values, witnesses)
    return ComparabilityReport(
        statement=statement,
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        samples=len(values),
        excluded=excluded,
        inputs_digest=digest,
        **extra,
    )


def check_ball_volume_regimes(
    deformed: DeformedSpace,
    ledger: Optional[ConstantsLedger] = None,
    annulus: Optional[ValidAnnulus] = None,
    digest: str = "",
) -> List[ComparabilityReport]:
    """Windows of deformed ball volumes in each radius regime.

    * small (r <= c0 scale(x)): nuhat(Bhat(x, r)) / (rho(x)^sigma nu(B(x, r / rho(x))))
    * middle (c0 scale(x) < r <= C' scale(x)): nuhat(Bhat(x, r)) m(x)^sigma
    * large (r > C' scale(x)): nuhat(Bhat(x, r)) nu^{-1}(r^-sigma)^sigma below the
      threshold c2 nu(B_{m0})^(-1/sigma), nuhat(Bhat(x, r)) / nuhat(Z') at or above half of it
    * annulus mass: nuhat({|y| >= r}) m(r)^sigma for 0 < r < R_inf / 2
    * nu^{-1} doubling: nu^{-1}(2t) / nu^{-1}(t)
    """
    ledger = ledger or compute_ledger(deformed)
    annulus = annulus or ValidAnnulus(*ledger.annulus)
    source = deformed.source
    sigma = deformed.sigma
    m0 = deformed.m0
    target = deformed.space
    total_hat = float(target.total_mass)
    c0, c2, c_prime = ledger.c0.value, ledger.c2.value, ledger.C_prime.value
    base_ball = source.profile().measure(m0) if m0 > 0 else 0.0
    threshold = c2 * base_ball ** (-1.0 / sigma) if base_ball > 0 else math.inf

    anchors = np.flatnonzero(annulus.contains(deformed.radii))
    excluded = deformed.n - anchors.size
    small, middle, large, whole = [], [], [], []
    w_small, w_middle, w_large, w_whole = [], [], [], []
    for i in anchors:
        x = deformed.source_index(i)
        scale = float(deformed.scale[i])
        rho = float(deformed.rho[i])
        gauge = float(deformed.gauge[i])
        prof = target.profile(i)
        rs = _sample_radii(prof.radii)
        vol = np.atleast_1d(prof.measure(rs))
        for r, v in zip(rs, vol):
            r = float(r)
            if r <= c0 * scale:
                base = source.profile(x).measure(r / rho)
                if base > 0:
                    small.append(v / (rho**sigma * base))
                    w_small.append([x, r])
            elif r <= c_prime * scale:
                middle.append(v * gauge**sigma)
                w_middle.append([x, r])
            elif r >= 0.5 * threshold:
                whole.append(v / total_hat)
                w_whole.append([x, r])
            if r > c_prime * scale and r <= threshold:
                t = r ** (-sigma)
                if t < source.total_mass:
                    inv = measure_inverse(source, t)
                    if inv > 0:
                        large.append(v * inv**sigma)
                        w_large.append([x, r])

    reports = [
        _report("ball-volume-small", small, w_small, digest, excluded),
        _report("ball-volume-middle", middle, w_middle, digest, excluded),
        _report("ball-volume-large", large, w_large, digest, excluded),
        _report("ball-volume-total", whole, w_whole, digest, excluded),
    ]

    # tail mass of the deformed measure outside base balls
    radii = deformed.radii
    outer = source.outer_radius
    levels = _sample_radii(source.profile().radii)
    levels = levels[levels < outer / 2.0]
    tails, w_tails = [], []
    for r in levels:
        tail = math.fsum(deformed.nuhat[radii >= r].tolist())
        tails.append(tail * (r + m0) ** sigma)
        w_tails.append([float(r)])
    reports.append(_report("annulus-mass", tails, w_tails, digest, 0))

    window = inverse_doubling_ratio(source, m0)
    reports.append(
        ComparabilityReport(
            statement="inverse-measure-doubling",
            min_ratio=window.lo,
            max_ratio=window.hi,
            witness_min=None if window.witness_lo is None else [window.witness_lo],
            witness_max=None if window.witness_hi is None else [window.witness_hi],
            samples=window.samples,
            inputs_digest=digest,
        )
    )
    for report in reports:
        if report.samples == 0:
            report.flags.append("no-samples")
    return reports
