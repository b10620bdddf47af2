"""
Canonical spaces whose windows ship as regression baselines.

Bundled baselines live in ``metricdeform/baselines/<case>.json`` and are
written by ``metricdeform bless-baselines`` with the default config.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

from metricdeform.config_manager import MetricDeformConfig, PathResolver
from metricdeform.errors import ParamOutOfRange
from metricdeform.generators import generate, make_spec
from metricdeform.space import FiniteMetricMeasureSpace
from metricdeform.verify.baseline import bless
from metricdeform.verify.report import VerificationRun
from metricdeform.verify.suite import run_statements

logger = logging.getLogger("metricdeform")

BASELINE_DIR = "baselines"

CANONICAL_CASES = {
    "cantor": ("cantor", {"depth": 5}),
    "grid": ("grid", {"n": 64}),
}


def bundled_baseline_dir() -> Path:
    return PathResolver.get_project_root() / BASELINE_DIR


def bundled_baselines() -> Dict[str, Path]:
    """Shipped baseline files by case name."""
    directory = bundled_baseline_dir()
    found = {name: directory / f"{name}.json" for name in CANONICAL_CASES}
    return {name: path for name, path in found.items() if path.exists()}


def canonical_space(name: str) -> FiniteMetricMeasureSpace:
    if name not in CANONICAL_CASES:
        raise ParamOutOfRange(f"unknown case {name!r}; choose from {sorted(CANONICAL_CASES)}")
    family, params = CANONICAL_CASES[name]
    return generate(make_spec(family, **params))


def canonical_run(
    name: str, config: Optional[MetricDeformConfig] = None, threads: int = 1
) -> VerificationRun:
    """Every statement group on the canonical space ``name``."""
    return run_statements(canonical_space(name), ["all"], config, threads=threads)


def bless_canonical(
    directory: Optional[Union[str, Path]] = None,
    names: Optional[Sequence[str]] = None,
    threads: int = 1,
) -> Dict[str, Path]:
    """Bless the default-config windows of each case into ``directory``.

    ``directory`` defaults to the bundled baseline directory.
    """
    config = MetricDeformConfig()
    directory = Path(directory) if directory is not None else bundled_baseline_dir()
    written = {}
    for name in names or list(CANONICAL_CASES):
        run = canonical_run(name, config, threads)
        written[name] = directory / f"{name}.json"
        bless(run.reports, written[name], config.verify.window)
    logger.info(f"✅ blessed {', '.join(written)} into {directory}")
    return written
