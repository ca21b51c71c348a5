"""
pyTISCasimir - finite-temperature Casimir free energy of an antiperiodic scalar field.

This package computes the free energy per unit area of a massless scalar field
with an antiperiodic spatial condition by three independent routes (periodic
decomposition, thermal lattice series and spectral zeta function), checks the
temperature inversion symmetry relations, and carries two independent oracles
for the thermal part and the zero-point constant.
"""

__version__ = "0.1.0"
__license__ = "LGPL-2.1"

from .core.casimir import (
    FreeEnergyBreakdown,
    ModeSpectrum,
    Relation,
    Route,
    Slab,
    TISReport,
    free_energy_antiperiodic,
    free_energy_periodic,
    thermal_part,
    tis_check,
)
from .core.config import ConfigLoader, EngineConfig
from .core.epstein import EpsteinForm, epstein2, epstein2_direct
from .core.exceptions import (
    CasimirError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    PoleError,
    RouteDisagreementError,
)
from .core.lattice import LatticeValue, SumControl, SumMode
from .core.oracle import OracleControl

__all__ = [
    "CasimirError",
    "ConfigError",
    "ConfigLoader",
    "ConvergenceError",
    "DomainError",
    "EngineConfig",
    "EpsteinForm",
    "ExtrapolationError",
    "FreeEnergyBreakdown",
    "LatticeValue",
    "ModeSpectrum",
    "OracleControl",
    "PoleError",
    "Relation",
    "Route",
    "RouteDisagreementError",
    "Slab",
    "SumControl",
    "SumMode",
    "TISReport",
    "epstein2",
    "epstein2_direct",
    "free_energy_antiperiodic",
    "free_energy_periodic",
    "thermal_part",
    "tis_check",
]
