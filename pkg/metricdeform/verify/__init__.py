from metricdeform.verify.baseline import Baseline, BaselineEntry, Regression, bless, load_baseline
from metricdeform.verify.bounds import (
    ball_minimum_density,
    check_ball_shape,
    check_chain_upper_bound,
    check_far_pairs,
    check_infinity_bounds,
    check_integral_lower_bound,
    check_metric_sandwich,
    check_sandwich_and_bounds,
    check_two_regimes,
)
from metricdeform.verify.canonical import (
    CANONICAL_CASES,
    bless_canonical,
    bundled_baseline_dir,
    bundled_baselines,
    canonical_run,
    canonical_space,
)
from metricdeform.verify.doubling import check_ball_volume_regimes, check_doubling_preservation
from metricdeform.verify.duality import DIRECTIONS, constant_density_duality, duality_report
from metricdeform.verify.energy import check_energy_comparability, pair_cases, pair_ratios
from metricdeform.verify.perfectness import (
    check_perfectness_preservation,
    perfectness_at_infinity,
)
from metricdeform.verify.report import (
    ComparabilityReport,
    VerificationRun,
    inputs_digest,
    matrix_window,
    not_applicable,
    vector_window,
)
from metricdeform.verify.suite import (
    STATEMENTS,
    build_ledger,
    configured_annulus,
    default_kind,
    resolve_statements,
    run_statements,
)
from metricdeform.verify.sweep import (
    CSV_HEADER,
    LEVEL_PARAM,
    SweepResult,
    SweepRow,
    relative_spread,
    run_sweep,
    write_csv,
)

__all__ = [
    # Reports
    "ComparabilityReport",
    "VerificationRun",
    "inputs_digest",
    "matrix_window",
    "vector_window",
    "not_applicable",
    # Checkers
    "check_energy_comparability",
    "pair_cases",
    "pair_ratios",
    "check_doubling_preservation",
    "check_ball_volume_regimes",
    "check_perfectness_preservation",
    "perfectness_at_infinity",
    "ball_minimum_density",
    "check_metric_sandwich",
    "check_integral_lower_bound",
    "check_chain_upper_bound",
    "check_two_regimes",
    "check_ball_shape",
    "check_far_pairs",
    "check_infinity_bounds",
    "check_sandwich_and_bounds",
    "DIRECTIONS",
    "duality_report",
    "constant_density_duality",
    # Runners
    "STATEMENTS",
    "build_ledger",
    "configured_annulus",
    "resolve_statements",
    "default_kind",
    "run_statements",
    "LEVEL_PARAM",
    "CSV_HEADER",
    "SweepRow",
    "SweepResult",
    "relative_spread",
    "run_sweep",
    "write_csv",
    # Baselines
    "Baseline",
    "BaselineEntry",
    "Regression",
    "bless",
    "load_baseline",
    "CANONICAL_CASES",
    "canonical_space",
    "canonical_run",
    "bless_canonical",
    "bundled_baseline_dir",
    "bundled_baselines",
]
