from metricdeform.besov.energy import (
    BesovParams,
    EnergyResult,
    besov_energy,
    besov_norm,
    besov_seminorm,
    energy_report,
    energy_terms,
    lp_norm,
)

__all__ = [
    "BesovParams",
    "EnergyResult",
    "besov_energy",
    "besov_seminorm",
    "besov_norm",
    "lp_norm",
    "energy_terms",
    "energy_report",
]
