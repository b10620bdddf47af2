from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from metricdeform.config_manager.path_resolver import PathResolver

THREADS_ENV = "METRICDEFORM_THREADS"

DEFAULT_FIELDS = ["coordinate", "capped_radius", "half_indicator", "lipschitz"]


# ---------- Config Schema ----------
@dataclass
class TransformConfig:
    """Deformation exponent and how strictly preconditions are enforced."""

    sigma: float = 1.0
    # raise instead of warn when sphericalization lacks large-scale perfectness
    strict_large_scale_perfectness: bool = False


@dataclass
class BesovConfig:
    """Besov energy parameters."""

    p: float = 2.0
    theta: float = 0.5
    allow_sigma_mismatch: bool = False


@dataclass
class PerfectnessConfig:
    """kappa above max_kappa counts as not uniformly perfect."""

    max_kappa: float = 10.0


@dataclass
class AnnulusConfig:
    """Valid-annulus overrides; None picks the default bound."""

    r_lo: Optional[float] = None
    r_hi: Optional[float] = None
    outer_fraction: float = 0.25


@dataclass
class LedgerConfig:
    """Ledger slack and where the certified constants come from.

    ``fixed`` replaces empirical constants (c0, a1, a2, c1, C1, c2, C2,
    C_prime) by the given values, so the checks test them instead of
    fitting them. ``calibration`` applies to sweeps: ``self`` fits each
    level on its own pairs, ``coarsest`` fits once on the coarsest level
    and certifies every finer level against those constants.
    """

    slack: float = 1e-9
    fixed: Dict[str, float] = field(default_factory=dict)
    calibration: str = "self"


@dataclass
class VerifyConfig:
    """Baseline window and the test fields used by energy checks."""

    window: float = 0.25
    fields: List[str] = field(default_factory=lambda: list(DEFAULT_FIELDS))
    cap: float = 10.0
    seed: int = 0


@dataclass
class RuntimeConfig:
    threads: int = 1


@dataclass
class LoggingConfig:
    """Logging configuration."""

    debug: bool = False
    rich_text: bool = False


@dataclass
class MetricDeformConfig:
    """Complete metricdeform configuration schema."""

    transform: TransformConfig = field(default_factory=TransformConfig)
    besov: BesovConfig = field(default_factory=BesovConfig)
    perfectness: PerfectnessConfig = field(default_factory=PerfectnessConfig)
    annulus: AnnulusConfig = field(default_factory=AnnulusConfig)
    ledger: LedgerConfig = field(default_factory=LedgerConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "MetricDeformConfig":
        """Create config from dictionary; missing sections take their defaults.

        Raises:
            TypeError: On an unknown key inside a section.
        """
        data = data or {}
        return cls(
            transform=TransformConfig(**data.get("transform", {})),
            besov=BesovConfig(**data.get("besov", {})),
            perfectness=PerfectnessConfig(**data.get("perfectness", {})),
            annulus=AnnulusConfig(**data.get("annulus", {})),
            ledger=LedgerConfig(**data.get("ledger", {})),
            verify=VerifyConfig(**data.get("verify", {})),
            runtime=RuntimeConfig(**data.get("runtime", {})),
            logging=LoggingConfig(**data.get("logging", {})),
        )

    @classmethod
    def from_yaml(cls, path: str) -> "MetricDeformConfig":
        """
        Load config from a YAML file.

        Args:
            path: Path to config file (working dir, then package dir)

        Raises:
            FileNotFoundError: If the file is in neither location
            yaml.YAMLError: If the file can't be parsed
        """
        resolved = PathResolver.resolve(path, must_exist=True)
        with open(resolved, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
        return cls.from_dict(data)

    def effective_threads(self, override: Optional[int] = None) -> int:
        """--threads beats METRICDEFORM_THREADS beats runtime.threads."""
        if override is not None:
            return max(1, int(override))
        env = os.environ.get(THREADS_ENV)
        if env:
            return max(1, int(env))
        return max(1, int(self.runtime.threads))
