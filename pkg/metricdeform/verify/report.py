"""Report models shared by every checker."""

import hashlib
import json
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from metricdeform.space import FiniteMetricMeasureSpace, jsonable, space_to_document

RATIO_RTOL = 1e-9


class ComparabilityReport(BaseModel):
    """Observed window of one comparability statement."""

    statement: str = Field(..., description="Identifier of the checked statement")
    min_ratio: float
    max_ratio: float
    witness_min: Optional[List[float]] = Field(
        default=None, description="Pair (x, y) or (x, r) realising min_ratio"
    )
    witness_max: Optional[List[float]] = None
    cases: Dict[str, int] = Field(default_factory=dict)
    excluded: int = 0
    samples: int = 0
    inputs_digest: str = ""
    applicable: bool = True
    passed: Optional[bool] = Field(
        default=None, description="Outcome of pass/fail checks; None for pure windows"
    )
    windows: Dict[str, Tuple[float, float]] = Field(
        default_factory=dict, description="Secondary windows tracked by baselines"
    )
    flags: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _ordered(self):
        if self.applicable and self.min_ratio > self.max_ratio:
            raise ValueError(f"min_ratio {self.min_ratio} exceeds max_ratio {self.max_ratio}")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        return jsonable(self.model_dump())


class VerificationRun(BaseModel):
    """Envelope for a batch of reports on one input."""

    inputs_digest: str
    params: Dict[str, Any] = Field(default_factory=dict)
    reports: List[ComparabilityReport]
    timestamp: Optional[str] = None

    def to_json(self) -> str:
        data = jsonable(self.model_dump())
        if self.timestamp is None:
            data.pop("timestamp")
        return json.dumps(data, indent=2, sort_keys=True)

    @property
    def failed(self) -> List[ComparabilityReport]:
        return [r for r in self.reports if r.applicable and r.passed is False]


def not_applicable(statement: str, reason: str, digest: str = "") -> ComparabilityReport:
    return ComparabilityReport(
        statement=statement,
        min_ratio=math.nan,
        max_ratio=math.nan,
        applicable=False,
        inputs_digest=digest,
        flags=[reason],
    )


def inputs_digest(space: FiniteMetricMeasureSpace, **params) -> str:
    """SHA-256 of the canonical space JSON and the run parameters."""
    payload = {
        "space": jsonable(space_to_document(space).model_dump()),
        "params": jsonable(params),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def matrix_window(values: np.ndarray, mask: np.ndarray, index_map=None):
    """(lo, hi, witness_lo, witness_hi, count) of ``values`` over ``mask``.

    Witnesses are index pairs, mapped through ``index_map`` when given. Ties
    keep the first pair in row-major order.
    """
    count = int(mask.sum())
    if count == 0:
        return math.nan, math.nan, None, None, 0
    lo_flat = int(np.argmin(np.where(mask, values, np.inf)))
    hi_flat = int(np.argmax(np.where(mask, values, -np.inf)))
    cols = values.shape[1]

    def pair(flat):
        i, j = divmod(flat, cols)
        if index_map is not None:
            i, j = int(index_map[i]), int(index_map[j])
        return [i, j]

    return (
        float(values.flat[lo_flat]),
        float(values.flat[hi_flat]),
        pair(lo_flat),
        pair(hi_flat),
        count,
    )


def vector_window(values, witnesses) -> Tuple[float, float, Any, Any]:
    """(lo, hi, witness_lo, witness_hi) of a flat sample list."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return math.nan, math.nan, None, None
    lo, hi = int(np.argmin(values)), int(np.argmax(values))
    return float(values[lo]), float(values[hi]), witnesses[lo], witnesses[hi]


def within(value: float, lo: float, hi: float, rtol: float = RATIO_RTOL) -> bool:
    return lo * (1.0 - rtol) - rtol <= value <= hi * (1.0 + rtol) + rtol
