"""
JSON file format for spaces.

    {"ids": [...], "base": <id>, "masses": [...],
     "distance": {"kind": "matrix", "rows": [[...]]}
               | {"kind": "euclidean", "coords": [[...]]},
     "flags": {"unbounded": false, "punctured": false},
     "transform": {...}}

Floats are written with ``repr`` precision, so a dump/load cycle reproduces
the matrix bit for bit.
"""

import json
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError
from scipy.spatial.distance import cdist

from metricdeform.errors import InvalidInput
from metricdeform.space.space import FiniteMetricMeasureSpace, build_space


class MatrixDistance(BaseModel):
    kind: Literal["matrix"] = "matrix"
    rows: List[List[float]]


class EuclideanDistance(BaseModel):
    kind: Literal["euclidean"] = "euclidean"
    coords: List[List[float]]


class SpaceFlags(BaseModel):
    unbounded: bool = Field(default=False, description="Truncation of an unbounded space")
    punctured: bool = Field(default=False, description="Base point is a puncture")


class SpaceDocument(BaseModel):
    """On-disk representation of a space (and, optionally, how it was produced)."""

    ids: List[Union[int, str]]
    base: Union[int, str]
    masses: List[float]
    distance: Annotated[
        Union[MatrixDistance, EuclideanDistance], Field(discriminator="kind")
    ]
    flags: SpaceFlags = Field(default_factory=SpaceFlags)
    transform: Optional[Dict[str, Any]] = None


def euclidean_matrix(coords) -> np.ndarray:
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    return cdist(pts, pts)


def space_from_document(
    doc: SpaceDocument, check_triangle: bool = True
) -> FiniteMetricMeasureSpace:
    if isinstance(doc.distance, EuclideanDistance):
        coords = np.asarray(doc.distance.coords, dtype=np.float64)
        dist = euclidean_matrix(coords)
        # euclidean distances are a metric by construction
        check_triangle = False
    else:
        coords = None
        dist = np.asarray(doc.distance.rows, dtype=np.float64)
    return build_space(
        doc.ids,
        dist,
        doc.masses,
        doc.base,
        unbounded=doc.flags.unbounded,
        punctured=doc.flags.punctured,
        coords=coords,
        check_triangle=check_triangle,
    )


def space_to_document(
    space: FiniteMetricMeasureSpace, transform: Optional[Dict[str, Any]] = None
) -> SpaceDocument:
    if space.coords is not None:
        distance: Union[MatrixDistance, EuclideanDistance] = EuclideanDistance(
            coords=space.coords.reshape(space.n, -1).tolist()
        )
    else:
        distance = MatrixDistance(rows=space.dist.tolist())
    return SpaceDocument(
        ids=list(space.point_ids),
        base=space.point_ids[space.base],
        masses=space.mass.tolist(),
        distance=distance,
        flags=SpaceFlags(unbounded=space.unbounded, punctured=space.punctured),
        transform=transform,
    )


def jsonable(value: Any) -> Any:
    """Replace non-finite floats so the value survives strict JSON."""
    if isinstance(value, float):
        if math.isinf(value):
            return "Infinite" if value > 0 else "-Infinite"
        if math.isnan(value):
            return None
        return value
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return jsonable(value.item())
    return value


def dumps_space(space: FiniteMetricMeasureSpace, transform: Optional[Dict[str, Any]] = None) -> str:
    doc = space_to_document(space, transform)
    return json.dumps(jsonable(doc.model_dump(mode="python")), indent=1)


def loads_space(text: str) -> FiniteMetricMeasureSpace:
    return space_from_document(load_document(text))


def load_document(text: str) -> SpaceDocument:
    """Parse a space file.

    Raises:
        InvalidInput: If the text is not JSON or does not match the schema.
    """
    try:
        # stdlib json parses floats with correct rounding
        return SpaceDocument.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidInput(f"malformed space file: {e}") from e


def read_space(path: Union[str, Path]) -> FiniteMetricMeasureSpace:
    return loads_space(Path(path).read_text())


def write_space(
    space: FiniteMetricMeasureSpace,
    path: Union[str, Path],
    transform: Optional[Dict[str, Any]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_space(space, transform) + "\n")
    return path
