from metricdeform.space.serialization import (
    EuclideanDistance,
    MatrixDistance,
    SpaceDocument,
    SpaceFlags,
    dumps_space,
    euclidean_matrix,
    jsonable,
    load_document,
    loads_space,
    read_space,
    space_from_document,
    space_to_document,
    write_space,
)
from metricdeform.space.space import (
    BallProfile,
    BallQueryResult,
    FiniteMetricMeasureSpace,
    PointId,
    ball,
    build_space,
    critical_radii,
    radius_of,
    validate,
    validate_field,
)

__all__ = [
    # Core types
    "FiniteMetricMeasureSpace",
    "BallProfile",
    "BallQueryResult",
    "PointId",
    # Queries
    "build_space",
    "validate",
    "validate_field",
    "ball",
    "radius_of",
    "critical_radii",
    # File format
    "SpaceDocument",
    "SpaceFlags",
    "MatrixDistance",
    "EuclideanDistance",
    "euclidean_matrix",
    "jsonable",
    "dumps_space",
    "loads_space",
    "load_document",
    "read_space",
    "write_space",
    "space_from_document",
    "space_to_document",
]
