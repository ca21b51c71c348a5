"""
Core numerics of the TISCasimir library.
"""

from .casimir import (
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
    zero_point_antiperiodic,
)
from .config import ConfigLoader, EngineConfig
from .epstein import EpsteinForm, epstein2, epstein2_deriv_z, epstein2_direct
from .exceptions import (
    CasimirError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    PoleError,
    RouteDisagreementError,
)
from .lattice import LatticeValue, SumControl, SumMode, f_xi, g_sum, g_unreflected
from .oracle import OracleControl, thermal_oracle, zero_point_oracle

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
    "epstein2_deriv_z",
    "epstein2_direct",
    "f_xi",
    "free_energy_antiperiodic",
    "free_energy_periodic",
    "g_sum",
    "g_unreflected",
    "thermal_oracle",
    "thermal_part",
    "tis_check",
    "zero_point_antiperiodic",
    "zero_point_oracle",
]
