from metricdeform.generators.families import (
    Cantor,
    ClusterCounterexample,
    GeneratorSpec,
    GridPatch2D,
    GridSegment,
    PuncturedGrid,
    WeightedHalfLine,
    cantor_points,
    generate,
    make_spec,
)
from metricdeform.generators.fields import FIELD_KINDS, lipschitz_field, test_fields

__all__ = [
    # Specs
    "GeneratorSpec",
    "GridSegment",
    "Cantor",
    "WeightedHalfLine",
    "GridPatch2D",
    "ClusterCounterexample",
    "PuncturedGrid",
    "make_spec",
    # Builders
    "generate",
    "cantor_points",
    # Fields
    "FIELD_KINDS",
    "test_fields",
    "lipschitz_field",
]
