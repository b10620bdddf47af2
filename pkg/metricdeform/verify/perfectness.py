"""Uniform perfectness of the deformed space at its new special point."""

import logging
import math

import numpy as np

from metricdeform.analysis import uniform_perfectness
from metricdeform.deform import DeformedSpace
from metricdeform.verify.report import ComparabilityReport

logger = logging.getLogger("metricdeform")

STATEMENT = "perfectness-preservation"


def perfectness_at_infinity(lower: np.ndarray, upper: np.ndarray):
    """Conservative kappa for annuli around infinity from interval distances.

    A point y certifies the annulus [s, kappa s) only if every realisation of
    its distance to infinity lies there: lower(y) >= s and upper(y) < kappa s.
    The worst s sits just above a grid value L_k, where the candidates are
    the points with lower(y) > L_k. Returns (kappa, witness level) with kappa
    infinite when fewer than two distinct positive levels exist.
    """
    levels = np.unique(lower[lower > 0])
    if levels.size < 2:
        return math.inf, None
    kappa = 1.0
    witness = None
    for level in levels[:-1]:
        ratio = float(np.min(upper[lower > level]) / level)
        if ratio > kappa:
            kappa, witness = ratio, float(level)
    return kappa * (1.0 + 1e-9), witness


def check_perfectness_preservation(
    deformed: DeformedSpace, digest: str = ""
) -> ComparabilityReport:
    """kappa of the deformed space at infinity (m0=1) or at the far point b' (m0=0).

    An infinite kappa is reported, not raised.
    """
    source_kappa = uniform_perfectness(deformed.source, deformed.m0 or 0.0).kappa
    flags = []
    if deformed.m0 == 1.0:
        if deformed.infinity is None:
            raise ValueError("sphericalized space carries no infinity estimates")
        kappa, level = perfectness_at_infinity(deformed.infinity.lower, deformed.infinity.upper)
        witness = None if level is None else [level]
        center = "infinity"
    else:
        far = deformed.default_base()
        estimate = uniform_perfectness(deformed.as_space(base=far), 1.0)
        kappa = estimate.kappa
        witness = None if estimate.witness_radius is None else [estimate.witness_radius]
        center = f"point {deformed.source_index(far)}"
        if estimate.radii_checked == 0:
            flags.append("no-scales-above-1")
    if math.isinf(kappa):
        flags.append("not-certified")
    logger.debug(f"🎯 kappa at {center} = {kappa:.4g} (source kappa {source_kappa:.4g})")
    return ComparabilityReport(
        statement=STATEMENT,
        min_ratio=kappa,
        max_ratio=kappa,
        witness_min=witness,
        witness_max=witness,
        inputs_digest=digest,
        passed=math.isfinite(kappa),
        flags=flags,
        details={"center": center, "source_kappa": source_kappa},
    )
