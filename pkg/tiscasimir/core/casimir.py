"""
Free energy per unit area of a massless scalar field with an antiperiodic
spatial condition of period a at inverse temperature beta.

Natural units (hbar = c = k_B = 1). Every free energy here is the Helmholtz
free energy per unit transverse area, so results scale as 1 / length^3.

Three routes assemble the same total:

- decomposition: F = F1 - F2, two periodic-field free energies of periods 2a
  and a built on the lattice kernel g;
- f_series: F = E0 - f(xi) / (pi beta^3) with the zero-point constant
  E0 = 7 pi^2 / (720 a^3);
- zeta: F = (H(0) + H'(0)) / (8 pi beta) from the spectral zeta function,
  written with Riemann zeta values and positive-quadrant Epstein sums.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .epstein import EpsteinForm, epstein2, epstein2_quadrant, epstein2_slope, quadrant_slope
from .exceptions import DomainError, RouteDisagreementError
from .lattice import (
    ROUNDOFF,
    ZETA3,
    ZETA4,
    LatticeValue,
    SumControl,
    f_xi,
    g_remainder,
    g_sum,
    g_unreflected,
)
from .specfun import riemann_zeta, riemann_zeta_deriv

logger = logging.getLogger(__name__)

# Cross-route comparisons allow this multiple of the combined error estimates.
AGREEMENT_FACTOR = 10.0

# Above this reduced temperature the low-temperature correction is out of regime.
LOW_TEMPERATURE_LIMIT = 0.2

# Relative agreement required between the duality route and the mode sum.
ORACLE_AGREEMENT = 1e-9


def _positive(field: str, value: float) -> float:
    number = float(value)
    if not (math.isfinite(number) and number > 0.0):
        raise DomainError(
            field, value, f"'{field}' must be a positive finite number, got {value!r}"
        )
    return number


@dataclass(frozen=True)
class Slab:
    """Geometry and temperature: antiperiod a and inverse temperature beta."""

    a: float
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    def xi(self) -> float:
        """Reduced temperature a / (pi beta)."""
        return self.a / (math.pi * self.beta)

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    @classmethod
    def from_xi(cls, a: float, xi: float) -> "Slab":
        a = _positive("a", a)
        return cls(a=a, beta=a / (math.pi * _positive("xi", xi)))

    @classmethod
    def from_temperature(cls, a: float, temperature: float) -> "Slab":
        return cls(a=a, beta=1.0 / _positive("T", temperature))

    def scaled(self, factor: float) -> "Slab":
        return Slab(a=factor * self.a, beta=factor * self.beta)


@dataclass(frozen=True)
class ModeSpectrum:
    """
    Spectrum of the Euclidean operator on the slab.

    Spatial modes mu_m = (2m - 1) pi / a, each twice degenerate (n and -n-1 of
    the antiperiodic tower coincide); Matsubara frequencies 2 pi l / beta;
    transverse momenta form a continuum kappa^2 = k1^2 + k2^2.
    """

    a: float
    beta: float

    DEGENERACY = 2

    @classmethod
    def of(cls, slab: Slab) -> "ModeSpectrum":
        return cls(a=slab.a, beta=slab.beta)

    def spatial_modes(self, count: int) -> np.ndarray:
        m = np.arange(1, count + 1, dtype=float)
        return (2.0 * m - 1.0) * math.pi / self.a

    def matsubara(self, ell: np.ndarray) -> np.ndarray:
        return 2.0 * math.pi * np.asarray(ell, dtype=float) / self.beta

    def eigenvalue(self, kappa2: float, m: int, ell: int) -> float:
        """omega_l^2 + mu_m^2 + kappa^2 for m >= 1."""
        if m < 1:
            raise DomainError("m", m, "spatial mode index starts at 1")
        mu = (2 * m - 1) * math.pi / self.a
        omega = 2.0 * math.pi * ell / self.beta
        return omega**2 + mu**2 + kappa2


class Route(str, Enum):
    DECOMPOSITION = "decomposition"
    F_SERIES = "f_series"
    ZETA = "zeta"


class Relation(str, Enum):
    F1_RELATION = "F1_relation"
    F2_RELATION_CORRECTED = "F2_relation_corrected"
    F2_RELATION_AS_PRINTED = "F2_relation_as_printed"
    G_REFLECTION = "g_reflection"


@dataclass(frozen=True)
class FreeEnergyBreakdown:
    """Zero-point term, periodic pieces, thermal part and total for one slab."""

    slab: Slab
    e0: float
    f1: float
    f2: float
    thermal: float
    total: float
    route: Route
    est_error: float

    @property
    def xi(self) -> float:
        return self.slab.xi()


@dataclass(frozen=True)
class TISReport:
    """Both sides of a temperature inversion relation and their residuals."""

    relation: Relation
    xi: float
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    fixed_point: bool = False


@dataclass(frozen=True)
class HighTemperatureFit:
    """Least-squares coefficients of a^3 F = c4 (aT)^4 + c1 (aT) + c0."""

    c4: float
    c1: float
    c0: float
    max_rel_residual: float


def xi_of(slab: Slab) -> float:
    return slab.xi()


def zero_point_antiperiodic(a: float) -> float:
    """Zero-temperature Casimir energy per unit area, 7 pi^2 / (720 a^3)."""
    a = _positive("a", a)
    return 7.0 * math.pi**2 / (720.0 * a**3)


def zero_point_as_printed(a: float) -> float:
    """Zero-point constant with pi in place of pi^2, 7 pi / (720 a^3), kept for reports."""
    a = _positive("a", a)
    return 7.0 * math.pi / (720.0 * a**3)


def constant_discrepancy(a: float) -> Tuple[float, float, float]:
    """Corrected constant, misprinted constant and their ratio (which is pi)."""
    corrected = zero_point_antiperiodic(a)
    printed = zero_point_as_printed(a)
    return corrected, printed, corrected / printed


def _scaled(value: LatticeValue, factor: float) -> LatticeValue:
    return LatticeValue(
        value=factor * value.value,
        est_error=abs(factor) * value.est_error,
        terms_used=value.terms_used,
    )


def _periodic(a: float, xi: float, ctl: SumControl) -> LatticeValue:
    """-g(pi xi) / (2 pi^2 a^3): periodic field of period a at reduced temperature xi."""
    return _scaled(g_sum(math.pi * xi, ctl), -1.0 / (2.0 * math.pi**2 * a**3))


def free_energy_periodic(slab: Slab, ctl: SumControl) -> float:
    """
    Free energy per unit area of a periodic field with spatial period a.

    Returns:
        -g(pi xi) / (2 pi^2 a^3)
    """
    return _periodic(slab.a, slab.xi(), ctl).value


def _f1(slab: Slab, ctl: SumControl) -> LatticeValue:
    return _scaled(g_sum(2.0 * math.pi * slab.xi(), ctl), -1.0 / (16.0 * math.pi**2 * slab.a**3))


def _f2(slab: Slab, ctl: SumControl) -> LatticeValue:
    return _periodic(slab.a, slab.xi(), ctl)


def f1(slab: Slab, ctl: SumControl) -> float:
    """F1 = -g(2 pi xi) / (16 pi^2 a^3), the periodic field of period 2a."""
    return _f1(slab, ctl).value


def f2(slab: Slab, ctl: SumControl) -> float:
    """F2 = -g(pi xi) / (2 pi^2 a^3), the periodic field of period a."""
    return _f2(slab, ctl).value


def _thermal(slab: Slab, ctl: SumControl) -> LatticeValue:
    return _scaled(f_xi(slab.xi(), ctl), -1.0 / (math.pi * slab.beta**3))


def thermal_part(slab: Slab, ctl: SumControl) -> float:
    """
    Thermal part of the free energy, -f(xi) / (pi beta^3).

    Negative for every finite beta and exponentially small, of order
    exp(-pi beta / a), at low temperature.
    """
    return _thermal(slab, ctl).value


def _zeta_periodic(form: EpsteinForm, beta: float) -> Tuple[float, float]:
    """Periodic free energy from its own Epstein function at z = -1, with an estimate."""
    value = epstein2(form)
    slope, slope_est = epstein2_slope(form)
    log_pi = math.log(math.pi)
    energy = math.pi**2 * (value - 2.0 * log_pi * value + slope) / (8.0 * math.pi * beta)
    est = math.pi**2 * slope_est / (8.0 * math.pi * beta) + ROUNDOFF * abs(energy)
    return energy, est


def _zeta_route(slab: Slab) -> Tuple[float, float, float, float]:
    """
    Spectral zeta function route.

    The eigenvalues pi^2 (k^2 / a^2 + 4 l^2 / beta^2) with k odd give, after
    the transverse integral, zeta(s) / L^2 = H(s) / (4 pi (s - 1)) with

        H(s) = 2 u(s) zeta_R(2s - 2) + 4 pi^(2-2s) [Q(s-1; A) - Q(s-1; B)],
        u(s) = (pi / a)^(2-2s) (1 - 2^(2-2s)),

    A = (1/a^2, 4/beta^2), B = (4/a^2, 4/beta^2) and Q the positive-quadrant
    Epstein sum. Then F = -zeta'(0) / (2 beta) = (H(0) + H'(0)) / (8 pi beta).
    """
    a, beta = slab.a, slab.beta
    form_a = EpsteinForm(-1.0, 1.0 / a**2, 4.0 / beta**2)
    form_b = EpsteinForm(-1.0, 4.0 / a**2, 4.0 / beta**2)

    k2 = (math.pi / a) ** 2
    u0 = -3.0 * k2
    du0 = (6.0 * math.log(math.pi / a) + 8.0 * math.log(2.0)) * k2
    zr = riemann_zeta(-2.0)
    dzr = riemann_zeta_deriv(-2.0)

    q_a, q_b = epstein2_quadrant(form_a), epstein2_quadrant(form_b)
    # Quadrant derivative from the full one: the axis terms carry zeta(2z) and zeta'(2z).
    slope_a, est_a = epstein2_slope(form_a)
    slope_b, est_b = epstein2_slope(form_b)
    dq_a = quadrant_slope(form_a, slope_a)
    dq_b = quadrant_slope(form_b, slope_b)

    log_pi = math.log(math.pi)
    pieces = [
        2.0 * u0 * zr,
        4.0 * math.pi**2 * (q_a - q_b),
        2.0 * (du0 * zr + 2.0 * u0 * dzr),
        4.0 * math.pi**2 * (-2.0 * log_pi * (q_a - q_b) + (dq_a - dq_b)),
    ]
    scale = 1.0 / (8.0 * math.pi * beta)
    total = scale * math.fsum(pieces)

    f1_value, f1_est = _zeta_periodic(form_a, beta)
    f2_value, f2_est = _zeta_periodic(form_b, beta)
    est = scale * (math.pi**2 * (est_a + est_b) + 64.0 * ROUNDOFF * sum(abs(p) for p in pieces))
    logger.debug("zeta route at %r: H pieces %r, est %.3g", slab, pieces, est)
    return total, f1_value, f2_value, max(est, f1_est + f2_est)


def free_energy_antiperiodic(
    slab: Slab, route: Route, ctl: SumControl
) -> FreeEnergyBreakdown:
    """
    Free energy per unit area of the antiperiodic field by the chosen route.

    Args:
        slab: Antiperiod and inverse temperature
        route: decomposition, f_series or zeta
        ctl: Truncation policy for the lattice sums

    Returns:
        FreeEnergyBreakdown with e0, f1, f2, thermal, total and est_error

    Raises:
        ConvergenceError: If a lattice sum does not converge
    """
    route = Route(route)
    e0 = zero_point_antiperiodic(slab.a)

    if route is Route.ZETA:
        total, f1_value, f2_value, est = _zeta_route(slab)
        return FreeEnergyBreakdown(
            slab=slab,
            e0=e0,
            f1=f1_value,
            f2=f2_value,
            thermal=total - e0,
            total=total,
            route=route,
            est_error=est,
        )

    piece1 = _f1(slab, ctl)
    piece2 = _f2(slab, ctl)
    if route is Route.DECOMPOSITION:
        total = piece1.value - piece2.value
        thermal = total - e0
        est = piece1.est_error + piece2.est_error + ROUNDOFF * abs(total)
    else:
        therm = _thermal(slab, ctl)
        thermal = therm.value
        total = e0 + thermal
        est = therm.est_error + ROUNDOFF * abs(total)
    logger.debug("%s route at %r: total %r (est %.3g)", route.value, slab, total, est)
    return FreeEnergyBreakdown(
        slab=slab,
        e0=e0,
        f1=piece1.value,
        f2=piece2.value,
        thermal=thermal,
        total=total,
        route=route,
        est_error=est,
    )


def compare_routes(
    slab: Slab,
    routes: Sequence[Route],
    ctl: SumControl,
    floor: float = 0.0,
) -> Dict[Route, FreeEnergyBreakdown]:
    """
    Evaluate several routes and check that their totals agree.

    Args:
        slab: Antiperiod and inverse temperature
        routes: Routes to evaluate
        ctl: Truncation policy
        floor: Extra relative allowance added to the agreement threshold

    Returns:
        Mapping from route to its breakdown

    Raises:
        RouteDisagreementError: If two totals differ beyond AGREEMENT_FACTOR
            times their combined error estimates
    """
    results = {Route(r): free_energy_antiperiodic(slab, Route(r), ctl) for r in routes}
    names = list(results)
    for i, first in enumerate(names):
        for second in names[i + 1 :]:
            x, y = results[first], results[second]
            tolerance = AGREEMENT_FACTOR * (x.est_error + y.est_error)
            tolerance += floor * max(abs(x.total), abs(y.total))
            if abs(x.total - y.total) > tolerance:
                raise RouteDisagreementError(
                    {first.value: x.total, second.value: y.total}, tolerance
                )
    return results


def _profile(which: int, xi: float, ctl: SumControl) -> float:
    """
    Dimensionless profiles a^3 F1 and a^3 F2 as functions of xi.

    Evaluated without the reflection of g, so an inversion relation between
    two profile values compares two independent remainder sums.
    """
    if which == 1:
        return -g_unreflected(2.0 * math.pi * xi, ctl).value / (16.0 * math.pi**2)
    return -g_unreflected(math.pi * xi, ctl).value / (2.0 * math.pi**2)


def tis_check(relation: Relation, xi: float, ctl: SumControl) -> TISReport:
    """
    Evaluate both sides of a temperature inversion relation.

    - F1_relation: F1(xi) = (2 pi xi)^4 F1(1 / (4 pi^2 xi)), fixed point 1 / (2 pi)
    - F2_relation_corrected: F2(xi) = (pi xi)^4 F2(1 / (pi^2 xi)), fixed point 1 / pi
    - F2_relation_as_printed: F2(xi) = (pi xi)^4 F1(1 / (pi^2 xi))
    - g_reflection: g(eta) = eta^4 g(1 / eta) with xi read as eta, fixed point 1

    F1 and F2 are the dimensionless profiles a^3 F1, a^3 F2. At the fixed point
    the dual argument is the argument itself and both sides coincide exactly.
    Both sides use g_unreflected, so neither is derived from the other.
    """
    relation = Relation(relation)
    xi = _positive("xi", xi)

    if relation is Relation.G_REFLECTION:
        fixed = 1.0
        scale = 1.0
    elif relation is Relation.F1_RELATION:
        fixed = 1.0 / (2.0 * math.pi)
        scale = 2.0 * math.pi
    else:
        fixed = 1.0 / math.pi
        scale = math.pi

    at_fixed = math.isclose(xi, fixed, rel_tol=1e-13)
    if at_fixed:
        dual, prefactor = xi, 1.0
    else:
        dual, prefactor = 1.0 / (scale**2 * xi), (scale * xi) ** 4

    if relation is Relation.G_REFLECTION:
        lhs = g_unreflected(xi, ctl).value
        rhs = prefactor * g_unreflected(dual, ctl).value
    elif relation is Relation.F1_RELATION:
        lhs = _profile(1, xi, ctl)
        rhs = prefactor * _profile(1, dual, ctl)
    elif relation is Relation.F2_RELATION_CORRECTED:
        lhs = _profile(2, xi, ctl)
        rhs = prefactor * _profile(2, dual, ctl)
    else:
        lhs = _profile(2, xi, ctl)
        rhs = prefactor * _profile(1, dual, ctl)

    abs_residual = abs(lhs - rhs)
    scale_value = max(abs(lhs), abs(rhs))
    rel_residual = abs_residual / scale_value if scale_value > 0.0 else 0.0
    return TISReport(
        relation=relation,
        xi=xi,
        lhs=lhs,
        rhs=rhs,
        abs_residual=abs_residual,
        rel_residual=rel_residual,
        fixed_point=at_fixed,
    )


def high_temperature_expansion(slab: Slab) -> List[Tuple[str, float]]:
    """
    Algebraic high-temperature terms of the antiperiodic free energy.

    From g(eta) = 2 zeta(4) eta^4 + pi zeta(3) eta + O(exp(-2 pi eta)):

    - stefan_boltzmann: -pi^2 a T^4 / 90
    - linear: 3 zeta(3) T / (8 pi a^2)
    - constant: 0; the zero-point constant is the inversion image of the
      Stefan-Boltzmann term, not a high-temperature term

    Meaningful for aT of about 5 and above; the neglected part is of order
    exp(-2 pi a T).
    """
    a, t = slab.a, slab.temperature
    return [
        ("stefan_boltzmann", -ZETA4 * a * t**4 / math.pi**2),
        ("linear", 3.0 * ZETA3 * t / (8.0 * math.pi * a**2)),
        ("constant", 0.0),
    ]


def _high_temperature_remainder(which: int, xi: float, ctl: SumControl) -> LatticeValue:
    """Exponentially small part of the profile a^3 F_which at high temperature."""
    if which == 1:
        return _scaled(g_remainder(2.0 * math.pi * xi, ctl), -1.0 / (16.0 * math.pi**2))
    return _scaled(g_remainder(math.pi * xi, ctl), -1.0 / (2.0 * math.pi**2))


def low_temperature_correction(slab: Slab, ctl: SumControl) -> float:
    """
    Thermal correction at low temperature by transporting high temperature.

    The inversion relations map F1 at xi to (2 pi xi)^4 F1 at 1 / (4 pi^2 xi)
    and F2 at xi to (pi xi)^4 F2 at 1 / (pi^2 xi), both high temperatures when
    xi is small. The transported algebraic terms give the zero-point constant
    and two xi^3 terms that cancel; what remains is the transported
    exponentially small part, which is the thermal correction. The result is
    checked against the free-boson mode sum of the oracle module, which shares
    no lattice code with it.

    Raises:
        RouteDisagreementError: If the duality value and the mode sum disagree
        ConvergenceError: If the mode sum does not converge
    """
    xi = slab.xi()
    if xi >= LOW_TEMPERATURE_LIMIT:
        logger.warning(
            "low_temperature_correction used at xi=%.4g, above %.2g", xi, LOW_TEMPERATURE_LIMIT
        )
    high1 = _high_temperature_remainder(1, 1.0 / (4.0 * math.pi**2 * xi), ctl)
    high2 = _high_temperature_remainder(2, 1.0 / (math.pi**2 * xi), ctl)
    pref1 = (2.0 * math.pi * xi) ** 4
    pref2 = (math.pi * xi) ** 4
    cube = slab.a**3
    value = (pref1 * high1.value - pref2 * high2.value) / cube
    est = (pref1 * high1.est_error + pref2 * high2.est_error) / cube + ROUNDOFF * abs(value)

    # Deferred: the oracle module builds on Slab and ModeSpectrum from here.
    from .oracle import OracleControl, thermal_oracle

    reference = thermal_oracle(slab, OracleControl())
    tolerance = AGREEMENT_FACTOR * est + ORACLE_AGREEMENT * abs(reference)
    logger.debug("low_temperature_correction(%r): %r vs mode sum %r", slab, value, reference)
    if abs(value - reference) > tolerance:
        raise RouteDisagreementError({"duality": value, "mode_sum": reference}, tolerance)
    return value


def fit_high_temperature(
    a: float,
    at_values: Sequence[float],
    ctl: SumControl,
    route: Route = Route.F_SERIES,
) -> HighTemperatureFit:
    """
    Fit full evaluations to a^3 F = c4 (aT)^4 + c1 (aT) + c0.

    Args:
        a: Antiperiod
        at_values: Values of aT to evaluate, at least three
        ctl: Truncation policy
        route: Route used for the full evaluations

    Returns:
        HighTemperatureFit with the coefficients and the worst relative residual
    """
    a = _positive("a", a)
    at = np.asarray([_positive("aT", v) for v in at_values], dtype=float)
    if at.size < 3:
        raise DomainError("at_values", list(at_values), "at least three points are needed")
    totals = np.array(
        [
            free_energy_antiperiodic(Slab(a=a, beta=a / v), route, ctl).total * a**3
            for v in at
        ]
    )
    # Columns scaled to unit size for conditioning.
    top = float(at.max())
    design = np.column_stack([(at / top) ** 4, at / top, np.ones_like(at)])
    coeffs, *_ = np.linalg.lstsq(design, totals, rcond=None)
    c4 = float(coeffs[0]) / top**4
    c1 = float(coeffs[1]) / top
    c0 = float(coeffs[2])
    fitted = c4 * at**4 + c1 * at + c0
    worst = float(np.max(np.abs(fitted - totals) / np.abs(totals)))
    return HighTemperatureFit(c4=c4, c1=c1, c0=c0, max_rel_residual=worst)


def breakdown_summary(result: FreeEnergyBreakdown) -> Dict[str, object]:
    """Flat mapping of a breakdown in the column order used for output."""
    return {
        "xi": result.xi,
        "a": result.slab.a,
        "beta": result.slab.beta,
        "e0": result.e0,
        "f1": result.f1,
        "f2": result.f2,
        "thermal": result.thermal,
        "total": result.total,
        "route": result.route.value,
        "est_error": result.est_error,
    }
