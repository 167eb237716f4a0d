"""Gaussian-filter ground-state estimation from cached time-evolution overlaps."""

from .errors import (
    AllDegenerate,
    ConfigError,
    DegenerateDenominator,
    QGFError,
    ResourceLimitError,
    UnderflowAnnihilated,
)
from .filters import (
    CoefficientSet,
    FilterParams,
    cosine_coefficients,
    eigenbasis_energy,
    estimate_energy,
    estimate_observable,
    filter_response,
    gaussian_coefficients,
)
from .overlap import EXACT, OverlapTable, SampledMode, compute_table, extend_table, observable_table
from .pauli import PauliSum, Spectrum, build_tfim, diagonalize
from .scan import ScanGrid, ScanResult, grid_scan, iterative_deepen
from .states import TrotterConfig, trotter_evolve

__all__ = [
    "AllDegenerate", "CoefficientSet", "ConfigError", "DegenerateDenominator", "EXACT", "FilterParams",
    "OverlapTable", "PauliSum", "QGFError", "ResourceLimitError", "SampledMode", "ScanGrid", "ScanResult",
    "Spectrum", "TrotterConfig", "UnderflowAnnihilated", "build_tfim", "compute_table", "cosine_coefficients",
    "diagonalize", "eigenbasis_energy", "estimate_energy", "estimate_observable", "extend_table",
    "filter_response", "gaussian_coefficients", "grid_scan", "iterative_deepen", "observable_table",
    "trotter_evolve",
]
