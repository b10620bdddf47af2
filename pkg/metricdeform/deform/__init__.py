from metricdeform.deform.chain import (
    brute_force_chain_metric,
    chain_metric,
    chain_weights,
    product_weights,
    shortest_distances,
)
from metricdeform.deform.density import (
    CanonicalDensity,
    MetricDensityProfile,
    PowerDensity,
    TabulatedDensity,
    canonical_density,
    constant_density,
)
from metricdeform.deform.ledger import ConstantsLedger, LedgerConstant, PairTable, compute_ledger
from metricdeform.deform.product import FarPointBound, ProductDemoReport, product_deform_demo
from metricdeform.deform.transforms import (
    TRANSFORM_M0,
    DeformedSpace,
    InfinityEstimates,
    deform,
    deform_measure,
    deform_metric,
    deform_with_gauge,
    flatten,
    infinity_estimates,
    invert,
    retained_indices,
    sphericalize,
    transform,
)

__all__ = [
    # Densities
    "MetricDensityProfile",
    "CanonicalDensity",
    "TabulatedDensity",
    "PowerDensity",
    "canonical_density",
    "constant_density",
    # Chain metrics
    "chain_metric",
    "chain_weights",
    "product_weights",
    "shortest_distances",
    "brute_force_chain_metric",
    # Transforms
    "DeformedSpace",
    "InfinityEstimates",
    "TRANSFORM_M0",
    "deform",
    "deform_metric",
    "deform_measure",
    "deform_with_gauge",
    "retained_indices",
    "sphericalize",
    "flatten",
    "invert",
    "transform",
    "infinity_estimates",
    # Ledger
    "ConstantsLedger",
    "LedgerConstant",
    "PairTable",
    "compute_ledger",
    # Product demo
    "FarPointBound",
    "ProductDemoReport",
    "product_deform_demo",
]
