"""
metricdeform - conformal deformations of finite metric measure spaces.

Sphericalization, flattening and inversion with the chain metric, the
deformed measure, discrete Besov energies and a verification suite.
"""

from importlib.metadata import version

__version__ = version("metricdeform")

from metricdeform.besov import BesovParams, besov_energy, besov_norm, besov_seminorm
from metricdeform.config_manager import MetricDeformConfig
from metricdeform.deform import (
    DeformedSpace,
    canonical_density,
    deform,
    flatten,
    invert,
    sphericalize,
    transform,
)
from metricdeform.errors import MetricDeformError, PreconditionError, SpaceValidationError
from metricdeform.generators import generate, make_spec
from metricdeform.space import FiniteMetricMeasureSpace, build_space, read_space, write_space
from metricdeform.verify import ComparabilityReport, run_statements, run_sweep

__all__ = [
    # Spaces
    "FiniteMetricMeasureSpace",
    "build_space",
    "read_space",
    "write_space",
    "generate",
    "make_spec",
    # Transforms
    "DeformedSpace",
    "canonical_density",
    "deform",
    "sphericalize",
    "flatten",
    "invert",
    "transform",
    # Energies
    "BesovParams",
    "besov_energy",
    "besov_seminorm",
    "besov_norm",
    # Verification
    "ComparabilityReport",
    "run_statements",
    "run_sweep",
    # Configuration
    "MetricDeformConfig",
    # Errors
    "MetricDeformError",
    "PreconditionError",
    "SpaceValidationError",
]
