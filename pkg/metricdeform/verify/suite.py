"""Named statement groups and the runner behind ``verify``."""

import logging
from typing import Callable, Dict, List, Optional, Sequence

from joblib import Parallel, delayed

from metricdeform.analysis import ValidAnnulus, default_annulus
from metricdeform.besov import BesovParams
from metricdeform.config_manager import MetricDeformConfig
from metricdeform.deform import ConstantsLedger, DeformedSpace, compute_ledger, transform
from metricdeform.errors import PreconditionError
from metricdeform.generators import test_fields
from metricdeform.space import FiniteMetricMeasureSpace
from metricdeform.verify.bounds import check_sandwich_and_bounds
from metricdeform.verify.doubling import check_ball_volume_regimes, check_doubling_preservation
from metricdeform.verify.duality import DIRECTIONS, constant_density_duality, duality_report
from metricdeform.verify.energy import check_energy_comparability
from metricdeform.verify.perfectness import check_perfectness_preservation
from metricdeform.verify.report import (
    ComparabilityReport,
    VerificationRun,
    inputs_digest,
    not_applicable,
)

logger = logging.getLogger("metricdeform")

CONSTANT_DUALITY_VALUE = 2.0


def configured_annulus(space: FiniteMetricMeasureSpace, config: MetricDeformConfig) -> ValidAnnulus:
    return default_annulus(
        space, config.annulus.r_lo, config.annulus.r_hi, config.annulus.outer_fraction
    )


def build_ledger(deformed: DeformedSpace, config: MetricDeformConfig) -> ConstantsLedger:
    """Ledger over the configured annulus, with any fixed constants applied."""
    return compute_ledger(
        deformed,
        configured_annulus(deformed.source, config),
        slack=config.ledger.slack,
        fixed=config.ledger.fixed,
    )


class _Context:
    """Everything a statement group needs, built once per run."""

    def __init__(self, space, deformed: DeformedSpace, config: MetricDeformConfig, digest: str):
        self.space = space
        self.deformed = deformed
        self.config = config
        self.digest = digest
        self.annulus = configured_annulus(space, config)
        self.ledger = build_ledger(deformed, config)


def _energy(ctx: _Context) -> List[ComparabilityReport]:
    cfg = ctx.config
    params = BesovParams.parse(cfg.besov.p, cfg.besov.theta)
    fields = test_fields(ctx.space, cfg.verify.fields, cfg.verify.cap, cfg.verify.seed)
    report = check_energy_comparability(
        ctx.deformed,
        fields,
        params,
        allow_sigma_mismatch=cfg.besov.allow_sigma_mismatch,
        ledger=ctx.ledger,
        digest=ctx.digest,
    )
    return [report]


def _doubling(ctx: _Context) -> List[ComparabilityReport]:
    return [check_doubling_preservation(ctx.deformed, ctx.annulus, ctx.digest)]


def _ball_volumes(ctx: _Context) -> List[ComparabilityReport]:
    return check_ball_volume_regimes(ctx.deformed, ctx.ledger, ctx.annulus, ctx.digest)


def _perfectness(ctx: _Context) -> List[ComparabilityReport]:
    return [check_perfectness_preservation(ctx.deformed, ctx.digest)]


def _bounds(ctx: _Context) -> List[ComparabilityReport]:
    return check_sandwich_and_bounds(
        ctx.deformed, ctx.ledger, ctx.config.perfectness.max_kappa, ctx.digest
    )


def _duality(ctx: _Context) -> List[ComparabilityReport]:
    cfg = ctx.config
    sigma = cfg.transform.sigma
    reports = []
    for direction in DIRECTIONS:
        try:
            reports.append(
                duality_report(
                    ctx.space,
                    sigma,
                    direction,
                    strict=cfg.transform.strict_large_scale_perfectness,
                    max_kappa=cfg.perfectness.max_kappa,
                    digest=ctx.digest,
                )
            )
        except PreconditionError as e:
            reports.append(not_applicable(f"duality-{direction}", str(e), ctx.digest))
    reports.append(
        constant_density_duality(ctx.space, CONSTANT_DUALITY_VALUE, sigma, ctx.digest)
    )
    return reports


STATEMENTS: Dict[str, Callable[[_Context], List[ComparabilityReport]]] = {
    "energy": _energy,
    "doubling": _doubling,
    "ball-volumes": _ball_volumes,
    "perfectness": _perfectness,
    "bounds": _bounds,
    "duality": _duality,
}


def resolve_statements(names: Sequence[str]) -> List[str]:
    """Expand ``all`` and reject unknown names, keeping the canonical order."""
    wanted = set(names)
    if "all" in wanted:
        return list(STATEMENTS)
    unknown = sorted(wanted - set(STATEMENTS))
    if unknown:
        raise PreconditionError(
            f"unknown statement(s) {', '.join(unknown)}; choose from all, {', '.join(STATEMENTS)}"
        )
    return [name for name in STATEMENTS if name in wanted]


def default_kind(space: FiniteMetricMeasureSpace) -> str:
    """sphericalize truncations of unbounded spaces, flatten bounded ones."""
    return "sphericalize" if space.unbounded else "flatten"


def run_statements(
    space: FiniteMetricMeasureSpace,
    statements: Sequence[str] = ("all",),
    config: Optional[MetricDeformConfig] = None,
    kind: Optional[str] = None,
    threads: int = 1,
) -> VerificationRun:
    """Transform ``space`` once and run each requested statement group on it.

    Groups may run on ``threads`` worker threads; reports are merged in
    group order, then checker order, so the thread count never changes the
    report body.
    """
    config = config or MetricDeformConfig()
    names = resolve_statements(statements)
    kind = kind or default_kind(space)
    sigma = config.transform.sigma
    params = {
        "kind": kind,
        "sigma": sigma,
        "p": config.besov.p,
        "theta": config.besov.theta,
        "statements": names,
        "annulus": [config.annulus.r_lo, config.annulus.r_hi, config.annulus.outer_fraction],
        "fields": list(config.verify.fields),
        "seed": config.verify.seed,
        "fixed_constants": dict(sorted(config.ledger.fixed.items())),
    }
    digest = inputs_digest(space, **params)
    deformed = transform(
        space,
        kind,
        sigma,
        strict=config.transform.strict_large_scale_perfectness,
        max_kappa=config.perfectness.max_kappa,
    )
    ctx = _Context(space, deformed, config, digest)
    # warm the cached deformed space before workers share it
    ctx.deformed.space

    logger.debug(f"🔍 running {', '.join(names)} on {space.n} points")
    batches = Parallel(n_jobs=max(1, threads), prefer="threads")(
        delayed(STATEMENTS[name])(ctx) for name in names
    )
    reports: List[ComparabilityReport] = [r for batch in batches for r in batch]
    logger.info(f"✅ {len(reports)} reports from {', '.join(names)} ({kind}, sigma={sigma:g})")
    return VerificationRun(inputs_digest=digest, params=params, reports=reports)
