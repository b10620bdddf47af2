"""
Empirical constants of a canonical deformation.

Pairs (x, y) are ordered and anchored at x: a pair takes part when x lies in
the valid annulus, whatever y is. Witnesses are reported as source indices.
"""

import logging
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from metricdeform.analysis import ValidAnnulus, default_annulus, doubling_constant
from metricdeform.deform.transforms import DeformedSpace
from metricdeform.errors import ParamOutOfRange, PreconditionError

logger = logging.getLogger("metricdeform")

CALIBRATED = ("c0", "a1", "a2", "c1", "C1", "c2", "C2")
FIXABLE = (*CALIBRATED, "C_prime")


class LedgerConstant(BaseModel):
    value: float
    witness: Optional[Tuple[int, int]] = None
    pairs: int = 0
    validity: str = ""


class ConstantsLedger(BaseModel):
    """Constants certified over the anchored pairs of a deformed space."""

    c0: LedgerConstant = Field(
        ..., description="Radius factor below which deformed balls are Euclidean-like"
    )
    a1: LedgerConstant = Field(..., description="Inner ball-shape factor")
    a2: LedgerConstant = Field(..., description="Outer ball-shape factor")
    c1: LedgerConstant = Field(..., description="Lower factor of dhat ~ rho(x) d, comparable pairs")
    C1: LedgerConstant = Field(..., description="Upper factor of dhat ~ rho(x) d, comparable pairs")
    c2: LedgerConstant = Field(..., description="Lower factor of dhat ~ scale(x), separated pairs")
    C2: LedgerConstant = Field(..., description="Upper factor of dhat ~ scale(x), separated pairs")
    C_prime: LedgerConstant = Field(..., description="Combined two-regime constant")
    C_nu: float
    annulus: Tuple[float, float]
    anchors: int
    excluded: int
    slack: float

    def value(self, name: str) -> float:
        return getattr(self, name).value

    def constants(self, names: Sequence[str] = CALIBRATED) -> Dict[str, float]:
        return {name: self.value(name) for name in names}


class PairTable:
    """Ordered pair quantities of a canonical deformation, restricted to anchored pairs."""

    def __init__(self, deformed: DeformedSpace, annulus: ValidAnnulus):
        if deformed.m0 is None or deformed.sigma is None:
            raise PreconditionError("constants are only defined for canonical deformations")
        self.deformed = deformed
        n = deformed.n
        self.gauge = deformed.gauge
        self.scale = deformed.scale
        self.rho = deformed.rho
        self.dist = deformed.dist
        self.dhat = deformed.dhat

        self.anchor = annulus.contains(deformed.radii)
        off = ~np.eye(n, dtype=bool)
        self.pairs = off & self.anchor[:, None]
        self.excluded = int((off & ~self.anchor[:, None]).sum())

        g_x = self.gauge[:, None]
        g_y = self.gauge[None, :]
        self.separated = self.pairs & (g_y >= 2.0 * g_x)
        self.crossing = self.pairs & ((g_y >= 2.0 * g_x) | (g_x >= 2.0 * g_y))
        self.comparable = self.pairs & ~self.crossing
        with np.errstate(divide="ignore", invalid="ignore"):
            self.to_scale = self.dhat / self.scale[:, None]
            self.to_rho = self.dhat / (self.rho[:, None] * self.dist)

    def witness(self, i: int, j: int) -> Tuple[int, int]:
        return (self.deformed.source_index(i), self.deformed.source_index(j))

    def extreme(self, values: np.ndarray, mask: np.ndarray, largest: bool):
        """(value, witness, count) of the min or max of ``values`` over ``mask``."""
        count = int(mask.sum())
        if count == 0:
            return None, None, 0
        fill = -np.inf if largest else np.inf
        masked = np.where(mask, values, fill)
        flat = int(np.argmax(masked) if largest else np.argmin(masked))
        i, j = divmod(flat, masked.shape[1])
        return float(masked[i, j]), self.witness(i, j), count


def _fixed(const: LedgerConstant, name: str, fixed: Mapping[str, float]) -> LedgerConstant:
    if name not in fixed:
        return const
    return LedgerConstant(value=float(fixed[name]), pairs=const.pairs, validity="fixed")


def compute_ledger(
    deformed: DeformedSpace,
    annulus: Optional[ValidAnnulus] = None,
    C_nu: Optional[float] = None,
    slack: float = 1e-9,
    fixed: Optional[Mapping[str, float]] = None,
) -> ConstantsLedger:
    """Certify c0, a1, a2, c1, C1, c2, C2 and C' on ``deformed``.

    Constants named in ``fixed`` are taken as given instead of fitted; a
    fixed c0 also fixes the radius range a1 and a2 are fitted over.

    Raises:
        PreconditionError: If the deformation does not use a canonical density.
        ParamOutOfRange: If ``fixed`` names an unknown or non-positive constant.
    """
    fixed = dict(fixed or {})
    unknown = sorted(set(fixed) - set(FIXABLE))
    if unknown:
        raise ParamOutOfRange(f"unknown ledger constant(s) {unknown}; choose from {list(FIXABLE)}")
    bad = sorted(name for name, value in fixed.items() if not float(value) > 0)
    if bad:
        raise ParamOutOfRange(f"fixed ledger constants must be positive: {bad}")
    annulus = annulus or default_annulus(deformed.source)
    table = PairTable(deformed, annulus)
    if C_nu is None:
        C_nu = doubling_constant(deformed.source).C_nu
    lo, hi = 1.0 - slack, 1.0 + slack

    value, witness, count = table.extreme(table.to_scale, table.crossing, largest=False)
    c0_raw = 1.0 if value is None else min(value, 1.0)
    c0 = LedgerConstant(
        value=c0_raw * lo,
        witness=witness,
        pairs=count,
        validity="pairs with m(y) >= 2m(x) or m(x) >= 2m(y)",
    )
    c0 = _fixed(c0, "c0", fixed)

    near = table.pairs & (table.dhat < c0.value * table.scale[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        shape_ratio = table.rho[:, None] * table.dist / table.dhat
    value, witness, count = table.extreme(shape_ratio, near, largest=True)
    a2 = LedgerConstant(
        value=(1.0 if value is None else value) * hi,
        witness=witness,
        pairs=count,
        validity="pairs with dhat < c0 * scale(x)",
    )

    capped = np.minimum(table.dhat, c0.value * table.scale[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        inner_ratio = table.rho[:, None] * table.dist / capped
    value, witness, count = table.extreme(inner_ratio, table.pairs, largest=False)
    a1 = LedgerConstant(
        value=(1.0 if value is None else value) * lo,
        witness=witness,
        pairs=count,
        validity="all anchored pairs",
    )

    value, witness, count = table.extreme(table.to_rho, table.comparable, largest=False)
    c1 = LedgerConstant(
        value=(1.0 if value is None else value) * lo,
        witness=witness,
        pairs=count,
        validity="pairs with comparable m",
    )
    value, witness, count = table.extreme(table.to_rho, table.comparable, largest=True)
    C1 = LedgerConstant(
        value=(1.0 if value is None else value) * hi,
        witness=witness,
        pairs=count,
        validity="pairs with comparable m",
    )

    value, witness, count = table.extreme(table.to_scale, table.separated, largest=False)
    c2 = LedgerConstant(
        value=(1.0 if value is None else min(value, 1.0)) * lo,
        witness=witness,
        pairs=count,
        validity="pairs with m(y) >= 2m(x)",
    )
    value, witness, count = table.extreme(table.to_scale, table.separated, largest=True)
    C2 = LedgerConstant(
        value=(1.0 if value is None else max(value, 1.0)) * hi,
        witness=witness,
        pairs=count,
        validity="pairs with m(y) >= 2m(x)",
    )

    a1, a2 = _fixed(a1, "a1", fixed), _fixed(a2, "a2", fixed)
    c1, C1 = _fixed(c1, "c1", fixed), _fixed(C1, "C1", fixed)
    c2, C2 = _fixed(c2, "c2", fixed), _fixed(C2, "C2", fixed)

    C_prime = LedgerConstant(
        value=max(C2.value * C_nu ** (1.0 / deformed.sigma), 3.0 * C1.value),
        validity="derived from C2, C_nu and C1",
    )
    C_prime = _fixed(C_prime, "C_prime", fixed)

    ledger = ConstantsLedger(
        c0=c0,
        a1=a1,
        a2=a2,
        c1=c1,
        C1=C1,
        c2=c2,
        C2=C2,
        C_prime=C_prime,
        C_nu=C_nu,
        annulus=(annulus.r_lo, annulus.r_hi),
        anchors=int(table.anchor.sum()),
        excluded=table.excluded,
        slack=slack,
    )
    logger.debug(
        f"📒 ledger c0={c0.value:.4g} a1={a1.value:.4g} a2={a2.value:.4g} "
        f"c2={c2.value:.4g} C2={C2.value:.4g} C'={C_prime.value:.4g}"
    )
    return ledger
