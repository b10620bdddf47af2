"""Regression baselines for report windows."""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from metricdeform.errors import InvalidInput
from metricdeform.verify.report import ComparabilityReport

logger = logging.getLogger("metricdeform")


class BaselineEntry(BaseModel):
    min_ratio: float
    max_ratio: float
    windows: Dict[str, Tuple[float, float]] = Field(default_factory=dict)


class Regression(BaseModel):
    statement: str
    quantity: str
    observed: float
    allowed: Tuple[float, float]

    def describe(self) -> str:
        lo, hi = self.allowed
        return f"{self.statement} {self.quantity}={self.observed:.6g} outside [{lo:.6g}, {hi:.6g}]"


def _finite(*values: float) -> bool:
    return all(v is not None and math.isfinite(v) for v in values)


class Baseline(BaseModel):
    """Blessed windows per statement; new runs may widen them by ``window`` at most."""

    window: float = Field(default=0.25, ge=0)
    statements: Dict[str, BaselineEntry] = Field(default_factory=dict)

    @classmethod
    def from_reports(
        cls, reports: Sequence[ComparabilityReport], window: float = 0.25
    ) -> "Baseline":
        entries = {}
        for report in reports:
            if not report.applicable or not _finite(report.min_ratio, report.max_ratio):
                continue
            entries[report.statement] = BaselineEntry(
                min_ratio=report.min_ratio,
                max_ratio=report.max_ratio,
                windows={k: v for k, v in report.windows.items() if _finite(*v)},
            )
        return cls(window=window, statements=entries)

    def allowed(self, lo: float, hi: float) -> Tuple[float, float]:
        return lo * (1.0 - self.window), hi * (1.0 + self.window)

    def _check(self, statement, quantity, observed, lo, hi, out: List[Regression]):
        allowed_lo, allowed_hi = self.allowed(lo, hi)
        if _finite(observed) and not (allowed_lo <= observed <= allowed_hi):
            out.append(
                Regression(
                    statement=statement,
                    quantity=quantity,
                    observed=observed,
                    allowed=(allowed_lo, allowed_hi),
                )
            )

    def compare(self, reports: Sequence[ComparabilityReport]) -> List[Regression]:
        """Regressions of ``reports`` against the blessed windows.

        A failed pass/fail check is a regression whether or not the
        statement has a baseline.
        """
        out: List[Regression] = []
        for report in reports:
            if report.applicable and report.passed is False:
                out.append(
                    Regression(
                        statement=report.statement,
                        quantity="passed",
                        observed=0.0,
                        allowed=(1.0, 1.0),
                    )
                )
            entry = self.statements.get(report.statement)
            if entry is None or not report.applicable:
                continue
            bounds = (entry.min_ratio, entry.max_ratio)
            for quantity in ("min_ratio", "max_ratio"):
                observed = getattr(report, quantity)
                self._check(report.statement, quantity, observed, *bounds, out)
            for name, (lo, hi) in entry.windows.items():
                if name not in report.windows:
                    continue
                for observed in report.windows[name]:
                    self._check(report.statement, f"windows.{name}", observed, lo, hi, out)
        for regression in out:
            logger.warning(f"⚠️ regression: {regression.describe()}")
        return out


def load_baseline(path: Union[str, Path]) -> Baseline:
    try:
        return Baseline.model_validate(json.loads(Path(path).read_text()))
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidInput(f"malformed baseline {path}: {e}") from e


def bless(
    reports: Sequence[ComparabilityReport], path: Union[str, Path], window: float = 0.25
) -> Baseline:
    """Write the windows of ``reports`` as the new baseline."""
    baseline = Baseline.from_reports(reports, window)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(baseline.model_dump(), indent=2, sort_keys=True) + "\n")
    logger.info(f"✅ blessed {len(baseline.statements)} statements into {path}")
    return baseline
