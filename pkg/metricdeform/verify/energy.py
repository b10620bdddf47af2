"""Comparison of Besov energies before and after a canonical deformation."""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from metricdeform.besov import BesovParams, energy_terms
from metricdeform.deform import ConstantsLedger, DeformedSpace, compute_ledger
from metricdeform.errors import SigmaMismatch
from metricdeform.verify.report import ComparabilityReport, matrix_window, within

logger = logging.getLogger("metricdeform")

STATEMENT = "besov-energy-comparability"


def pair_cases(deformed: DeformedSpace, c0: float) -> np.ndarray:
    """Label each ordered pair "2", "1a" or "1b".

    With a the endpoint of smaller m and b' the other one: "2" when
    m(b') >= 2 m(a), otherwise "1a" when dhat <= c0 * scale(a) and "1b" else.
    """
    gauge = deformed.gauge
    scale = deformed.scale
    g_x, g_y = gauge[:, None], gauge[None, :]
    small_is_x = g_x <= g_y
    g_small = np.where(small_is_x, g_x, g_y)
    g_large = np.where(small_is_x, g_y, g_x)
    s_small = np.where(small_is_x, scale[:, None], scale[None, :])
    labels = np.where(
        g_large >= 2.0 * g_small,
        "2",
        np.where(deformed.dhat <= c0 * s_small, "1a", "1b"),
    )
    return labels


def pair_ratios(deformed: DeformedSpace, params: BesovParams) -> np.ndarray:
    """Deformed over original integrand for each ordered pair of Z' (field independent)."""
    keep = deformed.retained
    source = deformed.source
    balls = source.pair_ball_masses[np.ix_(keep, keep)]
    balls_hat = deformed.space.pair_ball_masses
    exponent = params.theta * params.p
    sigma = deformed.sigma
    rho = deformed.rho
    off = ~np.eye(deformed.n, dtype=bool)
    out = np.ones_like(balls)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (
            (deformed.dist / deformed.dhat) ** exponent
            * (rho[:, None] ** sigma * rho[None, :] ** sigma)
            * balls
            / balls_hat
        )
    out[off] = ratio[off]
    return out


def check_energy_comparability(
    deformed: DeformedSpace,
    fields: Sequence[np.ndarray],
    params: BesovParams,
    *,
    allow_sigma_mismatch: bool = False,
    ledger: Optional[ConstantsLedger] = None,
    digest: str = "",
) -> ComparabilityReport:
    """Per-pair and global energy ratios of the deformed against the original space.

    The original energy is summed over pairs of Z' only; the full energy on Z
    is reported alongside. A field with both energies zero gets ratio 1 and a
    flag.

    Raises:
        SigmaMismatch: If p * theta differs from the deformation's sigma.
    """
    flags = []
    if not math.isclose(params.sigma, deformed.sigma, rel_tol=1e-12):
        message = f"p*theta={params.sigma:g} but the deformation uses sigma={deformed.sigma:g}"
        if not allow_sigma_mismatch:
            raise SigmaMismatch(message)
        logger.warning(f"⚠️ {message}")
        flags.append("sigma-mismatch")

    ledger = ledger or compute_ledger(deformed)
    keep = deformed.retained
    off = ~np.eye(deformed.n, dtype=bool)
    ratios = pair_ratios(deformed, params)
    lo, hi, w_lo, w_hi, count = matrix_window(ratios, off, keep)

    labels = pair_cases(deformed, ledger.c0.value)
    cases = {name: int((off & (labels == name)).sum()) for name in ("1a", "1b", "2")}

    anchored = off & ledger_anchor(deformed, ledger)[:, None]
    a_lo, a_hi, _, _, _ = matrix_window(ratios, anchored, keep)

    target = deformed.space
    energies: Dict[str, Dict[str, float]] = {}
    globals_ = []
    passed = True
    for k, u in enumerate(fields):
        u = np.asarray(u, dtype=np.float64)
        full_terms = energy_terms(deformed.source, u, params)
        original = math.fsum(full_terms[np.ix_(keep, keep)].ravel())
        full = math.fsum(full_terms.ravel())
        deformed_energy = math.fsum(energy_terms(target, u[keep], params).ravel())
        if original == 0.0 and deformed_energy == 0.0:
            ratio = 1.0
            flags.append(f"zero-energy:{k}")
            logger.warning(f"⚠️ field {k} has zero energy on both sides; ratio reported as 1")
        elif original == 0.0:
            ratio = math.inf
            flags.append(f"zero-original-energy:{k}")
        else:
            ratio = deformed_energy / original
            if not within(ratio, lo, hi):
                passed = False
        globals_.append(ratio)
        energies[f"field_{k}"] = {
            "original": original,
            "original_full": full,
            "deformed": deformed_energy,
            "ratio": ratio,
        }

    windows = {"annulus_pairs": (a_lo, a_hi)}
    finite = [g for g in globals_ if math.isfinite(g)]
    if finite:
        windows["global"] = (min(finite), max(finite))
    logger.debug(f"⚡ energy ratios in [{lo:.4g}, {hi:.4g}] over {count} pairs")
    return ComparabilityReport(
        statement=STATEMENT,
        min_ratio=lo,
        max_ratio=hi,
        witness_min=w_lo,
        witness_max=w_hi,
        cases=cases,
        samples=count,
        inputs_digest=digest,
        passed=passed,
        windows=windows,
        flags=flags,
        details={"energies": energies, "p": params.p, "theta": params.theta},
    )


def ledger_anchor(deformed: DeformedSpace, ledger: ConstantsLedger) -> np.ndarray:
    lo, hi = ledger.annulus
    radii = deformed.radii
    return (radii >= lo) & (radii <= hi)
