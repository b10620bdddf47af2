"""
Refinement sweeps: run statement groups over a family at several levels.

Each level is an independent job. Jobs run through joblib and the rows are
merged in (level, report order), so the thread count never changes the
output.
"""

import copy
import csv
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from joblib import Parallel, delayed
from pydantic import BaseModel, Field

from metricdeform.config_manager import MetricDeformConfig
from metricdeform.deform import transform
from metricdeform.errors import ParamOutOfRange
from metricdeform.generators import generate, make_spec
from metricdeform.verify.report import ComparabilityReport
from metricdeform.verify.suite import build_ledger, default_kind, resolve_statements, run_statements

logger = logging.getLogger("metricdeform")

LEVEL_PARAM = {
    "grid": "n",
    "cantor": "depth",
    "halfline": "n",
    "patch2d": "side",
    "punctured": "n",
}

CSV_HEADER = ["family", "depth", "statement", "min_ratio", "max_ratio"]

CALIBRATIONS = ("self", "coarsest")


class SweepRow(BaseModel):
    family: str
    level: int
    statement: str
    min_ratio: float
    max_ratio: float
    applicable: bool = True
    passed: Optional[bool] = None


class SweepResult(BaseModel):
    """Rows per (level, statement) plus the stability of each statement's window."""

    family: str
    kind: Optional[str] = None
    sigma: float
    levels: List[int]
    rows: List[SweepRow]
    stability: Dict[str, float] = Field(
        default_factory=dict,
        description="Largest relative spread of min_ratio or max_ratio across levels",
    )
    calibration: str = "self"
    constants: Dict[str, float] = Field(
        default_factory=dict, description="Ledger constants carried from the coarsest level"
    )
    reports: Dict[int, List[ComparabilityReport]] = Field(default_factory=dict)

    def window(self, statement: str) -> List[SweepRow]:
        return [row for row in self.rows if row.statement == statement]

    def widths(self, statement: str) -> List[float]:
        """max_ratio / min_ratio at each level, in level order."""
        out = []
        for row in self.window(statement):
            if row.min_ratio > 0 and math.isfinite(row.max_ratio):
                out.append(row.max_ratio / row.min_ratio)
            else:
                out.append(math.inf)
        return out

    def stable(self, statement: str, tolerance: float = 0.25) -> bool:
        return self.stability.get(statement, math.inf) < tolerance


def relative_spread(values: Sequence[float]) -> float:
    """(max - min) / max |value| over the finite values; 0 for fewer than two."""
    finite = [v for v in values if math.isfinite(v)]
    if len(finite) < 2:
        return 0.0
    top = max(abs(v) for v in finite)
    if top == 0:
        return 0.0
    return (max(finite) - min(finite)) / top


def _level_space(family, level, params, mass_policy, seed):
    return generate(make_spec(family, mass_policy, seed, **{**params, LEVEL_PARAM[family]: level}))


def calibrate(space, config: MetricDeformConfig, kind: Optional[str] = None) -> Dict[str, float]:
    """Ledger constants fitted on ``space``, ready for ``config.ledger.fixed``."""
    deformed = transform(
        space,
        kind or default_kind(space),
        config.transform.sigma,
        strict=config.transform.strict_large_scale_perfectness,
        max_kappa=config.perfectness.max_kappa,
    )
    return build_ledger(deformed, config).constants()


def _run_level(family, level, params, mass_policy, seed, statements, config, kind):
    space = _level_space(family, level, params, mass_policy, seed)
    run = run_statements(space, statements, config, kind)
    return level, run.reports


def run_sweep(
    family: str,
    levels: Sequence[int],
    statements: Sequence[str] = ("all",),
    sigma: Optional[float] = None,
    *,
    config: Optional[MetricDeformConfig] = None,
    kind: Optional[str] = None,
    mass_policy: str = "profile",
    seed: int = 0,
    threads: Optional[int] = None,
    params: Optional[Dict[str, Any]] = None,
) -> SweepResult:
    """Generate ``family`` at each level and run ``statements`` on each.

    ``sigma`` overrides ``config.transform.sigma``. The level is the family's
    refinement parameter: n for grid, halfline and punctured, depth for
    cantor and side for patch2d.

    With ``config.ledger.calibration == "coarsest"`` the ledger constants are
    fitted once on the coarsest level and every level is certified against
    them; constants already fixed in the config take precedence.

    Raises:
        ParamOutOfRange: If the family has no refinement parameter, no
            levels are given or the ledger calibration is unknown.
    """
    if family not in LEVEL_PARAM:
        raise ParamOutOfRange(
            f"family {family!r} has no refinement level; choose from {sorted(LEVEL_PARAM)}"
        )
    if not levels:
        raise ParamOutOfRange("sweep needs at least one level")
    config = copy.deepcopy(config) if config is not None else MetricDeformConfig()
    calibration = config.ledger.calibration
    if calibration not in CALIBRATIONS:
        raise ParamOutOfRange(
            f"ledger calibration must be one of {list(CALIBRATIONS)}, got {calibration!r}"
        )
    if sigma is not None:
        config.transform.sigma = float(sigma)
    names = resolve_statements(statements)
    levels = sorted(set(int(level) for level in levels))
    params = params or {}
    constants: Dict[str, float] = {}
    if calibration == "coarsest":
        coarse = _level_space(family, levels[0], params, mass_policy, seed)
        constants = calibrate(coarse, config, kind)
        config.ledger.fixed = {**constants, **config.ledger.fixed}
        logger.info(f"📒 certifying {family} against constants fitted at level {levels[0]}")
    n_jobs = config.effective_threads(threads)
    logger.info(f"🚀 sweeping {family} over {levels} with {n_jobs} worker(s)")

    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_level)(family, level, params, mass_policy, seed, names, config, kind)
        for level in levels
    )
    by_level = dict(results)

    rows: List[SweepRow] = []
    for level in levels:
        for report in by_level[level]:
            rows.append(
                SweepRow(
                    family=family,
                    level=level,
                    statement=report.statement,
                    min_ratio=report.min_ratio,
                    max_ratio=report.max_ratio,
                    applicable=report.applicable,
                    passed=report.passed,
                )
            )

    stability = {}
    for statement in dict.fromkeys(row.statement for row in rows):
        window = [row for row in rows if row.statement == statement and row.applicable]
        if not window:
            continue
        stability[statement] = max(
            relative_spread([row.min_ratio for row in window]),
            relative_spread([row.max_ratio for row in window]),
        )
    unstable = [name for name, spread in stability.items() if spread >= config.verify.window]
    if unstable:
        logger.warning(
            f"⚠️ windows moved by more than {config.verify.window:.0%}: {', '.join(unstable)}"
        )
    return SweepResult(
        family=family,
        kind=kind,
        sigma=config.transform.sigma,
        levels=levels,
        rows=rows,
        stability=stability,
        calibration=calibration,
        constants=constants,
        reports=by_level,
    )


def write_csv(result: SweepResult, path: Union[str, Path]) -> Path:
    """Ratio-vs-level plot data, one row per (level, statement)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            if not row.applicable:
                continue
            writer.writerow(
                [row.family, row.level, row.statement, repr(row.min_ratio), repr(row.max_ratio)]
            )
    logger.debug(f"📄 wrote {len(result.rows)} sweep rows to {path}")
    return path
