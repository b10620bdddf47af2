from metricdeform.analysis.annulus import ValidAnnulus, default_annulus
from metricdeform.analysis.estimators import (
    ball_comparison_constant,
    certify_reverse_doubling,
    doubling_constant,
    inverse_doubling_ratio,
    loglog_slope,
    measure_inverse,
    radius_grid,
    reverse_doubling_fit,
    uniform_perfectness,
)
from metricdeform.analysis.models import (
    DoublingEstimate,
    PerfectnessEstimate,
    RatioWindow,
    ReverseDoublingFit,
)

__all__ = [
    # Estimators
    "doubling_constant",
    "uniform_perfectness",
    "reverse_doubling_fit",
    "certify_reverse_doubling",
    "loglog_slope",
    "measure_inverse",
    "inverse_doubling_ratio",
    "ball_comparison_constant",
    "radius_grid",
    # Annulus
    "ValidAnnulus",
    "default_annulus",
    # Models
    "DoublingEstimate",
    "PerfectnessEstimate",
    "ReverseDoublingFit",
    "RatioWindow",
]
