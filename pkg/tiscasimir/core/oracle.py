"""
Independent cross-checks that share no code with the lattice or Epstein
machinery: a statistical-mechanics mode sum for the thermal part and a
cutoff extraction of the zero-point constant.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .casimir import ModeSpectrum, Slab
from .exceptions import ConvergenceError, DomainError, ExtrapolationError

logger = logging.getLogger(__name__)

LADDER_RUNGS = 3


@dataclass(frozen=True)
class OracleControl:
    """Cutoffs of the oracle sums and the starting cutoff length of the ladder."""

    m_max: int = 1001
    j_max: int = 1000
    delta: float = 0.04
    rel_tol: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("m_max", "j_max"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DomainError(name, value, f"'{name}' must be an integer >= 1")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise DomainError("delta", self.delta, "delta must be positive")
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0.0):
            raise DomainError("rel_tol", self.rel_tol, "rel_tol must be positive")


@dataclass(frozen=True)
class ZeroPointLadder:
    """Cutoff energies on a halving ladder and their extrapolated limit."""

    rungs: List[float]
    energies: List[float]
    limit: float
    observed_order: float


def _boltzmann_series(x: np.ndarray, j_max: int) -> np.ndarray:
    """sum_{j=1..j_max} e^{-j x} (j x + 1) / j^3 for each x."""
    j = np.arange(j_max, 0, -1, dtype=float)
    jx = j[None, :] * x[:, None]
    return np.sum(np.exp(-jx) * (jx + 1.0) / j[None, :] ** 3, axis=1)


def thermal_oracle(slab: Slab, ctl: OracleControl) -> float:
    """
    Thermal part from the free-boson mode sum over the spectrum.

    (1/beta) sum_modes integral d^2k/(2pi)^2 ln(1 - e^{-beta omega}) reduces,
    after the transverse integral and the expansion of the logarithm, to

        -(1 / (pi beta^3)) sum_{m odd <= m_max} sum_{j <= j_max} e^{-j x} (j x + 1) / j^3

    with x = beta m pi / a; the twofold degeneracy is included.

    Raises:
        ConvergenceError: If the first omitted term exceeds rel_tol of the value
    """
    spectrum = ModeSpectrum.of(slab)
    count = (ctl.m_max + 1) // 2
    x = slab.beta * spectrum.spatial_modes(count)
    per_mode = _boltzmann_series(x, ctl.j_max)
    total = float(np.sum(per_mode[::-1]))
    prefactor = -spectrum.DEGENERACY / (2.0 * math.pi * slab.beta**3)
    value = prefactor * total

    x_next = slab.beta * (2 * count + 1) * math.pi / slab.a
    j_next = ctl.j_max + 1.0
    omitted = max(
        math.exp(-j_next * x[0]) * (j_next * x[0] + 1.0) / j_next**3,
        math.exp(-x_next) * (x_next + 1.0),
    )
    omitted *= abs(prefactor)
    logger.debug("thermal_oracle(%r): first omitted term %.3g", slab, omitted)
    if omitted > ctl.rel_tol * abs(value):
        raise ConvergenceError("thermal_oracle", count * ctl.j_max, omitted)
    return value


def raw_cutoff_energy(a: float, delta: float) -> float:
    """
    Exponentially regulated zero-point energy per unit area.

    (1/2pi) d^2/d delta^2 [S(delta) / delta] with S = sum_{m odd} e^{-delta m pi / a}
    = 1 / (2 sinh(pi delta / a)); the derivatives are taken in closed form.
    """
    if not (a > 0.0 and delta > 0.0):
        raise DomainError("delta" if a > 0.0 else "a", delta if a > 0.0 else a)
    k = math.pi / a
    y = k * delta
    csch = 1.0 / math.sinh(y)
    coth = 1.0 / math.tanh(y)
    s0 = 0.5 * csch
    s1 = -0.5 * k * csch * coth
    s2 = 0.5 * k**2 * csch * (coth**2 + csch**2)
    h2 = s2 / delta - 2.0 * s1 / delta**2 + 2.0 * s0 / delta**3
    return h2 / (2.0 * math.pi)


def cutoff_energy(a: float, delta: float) -> float:
    """Cutoff energy with the bulk divergence 3a / (2 pi^2 delta^4) removed."""
    return raw_cutoff_energy(a, delta) - 3.0 * a / (2.0 * math.pi**2 * delta**4)


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """
    Richardson extrapolation of a sequence computed at steps h, h/r, h/r^2, ...

    step_ratio is the factor by which the leading error shrinks between
    neighbouring entries (r^p for an error of order p).
    """
    if not values:
        raise DomainError("values", values, "at least one value is needed")
    level = [float(v) for v in values]
    for m in range(1, len(level)):
        mult = step_ratio**m
        level = [(mult * level[i + 1] - level[i]) / (mult - 1.0) for i in range(len(level) - 1)]
    return level[0]


def zero_point_ladder(a: float, ctl: OracleControl) -> ZeroPointLadder:
    """
    Cutoff energies at delta, delta/2, delta/4 extrapolated to delta -> 0.

    Raises:
        ExtrapolationError: If successive differences change sign or do not shrink
    """
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError("a", a)
    if ctl.delta > 0.1 * a:
        logger.warning("zero_point_oracle: delta=%g is not small against a=%g", ctl.delta, a)
    rungs = [ctl.delta / 2.0**i for i in range(LADDER_RUNGS)]
    energies = [cutoff_energy(a, d) for d in rungs]
    diffs = [energies[i] - energies[i + 1] for i in range(LADDER_RUNGS - 1)]
    same_sign = all(d > 0.0 for d in diffs) or all(d < 0.0 for d in diffs)
    shrinking = all(abs(diffs[i + 1]) < abs(diffs[i]) for i in range(len(diffs) - 1))
    if not (same_sign and shrinking):
        raise ExtrapolationError("zero_point_oracle", energies)
    # O(delta^2) error: halving delta shrinks it fourfold.
    limit = richardson_limit(4.0, energies)
    order = math.log2(abs(diffs[0]) / abs(diffs[1]))
    logger.debug("zero_point_ladder(a=%g): %r -> %r, order %.3f", a, energies, limit, order)
    return ZeroPointLadder(rungs=rungs, energies=energies, limit=limit, observed_order=order)


def zero_point_oracle(a: float, ctl: OracleControl) -> float:
    """Zero-point constant extracted from the cutoff energy ladder."""
    return zero_point_ladder(a, ctl).limit
