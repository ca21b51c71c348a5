"""
Two-dimensional Epstein zeta function

    E2(z; a1, a2) = sum'_{n1, n2} (a1 n1^2 + a2 n2^2)^(-z)

with the origin excluded. Direct summation covers z > 1; the analytic
continuation to every real z != 1 splits the Mellin integral of the theta
function at the symmetric point t0 = (a1 a2)^(-1/2), so both halves are sums
of upper incomplete gamma functions with the same decay.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, special

from .exceptions import ConvergenceError, DomainError, PoleError
from .lattice import ROUNDOFF, LatticeValue, SumControl
from .specfun import gamma_real, riemann_zeta, riemann_zeta_deriv, upper_incomplete_gamma_array

logger = logging.getLogger(__name__)

# Incomplete gamma arguments beyond this cutoff contribute below exp(-60).
THETA_CUTOFF = 60.0

# Step of the five-point stencil in z.
Z_STEP = 1e-3

# Distance from a Gamma pole below which the regular rearrangement is used.
POLE_GUARD = 0.05

# Below this |z| the continuation returns its limit E2(0) = -1.
ZERO_GUARD = 1e-15

_DIRECT_START = 16
_CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class EpsteinForm:
    """Argument package (z; a1, a2) of the Epstein function."""

    z: float
    a1: float
    a2: float

    def __post_init__(self) -> None:
        for name in ("z", "a1", "a2"):
            value = getattr(self, name)
            if not math.isfinite(float(value)):
                raise DomainError(name, value, f"'{name}' must be finite")
            object.__setattr__(self, name, float(value))
        if self.a1 <= 0.0:
            raise DomainError("a1", self.a1, "a1 must be positive")
        if self.a2 <= 0.0:
            raise DomainError("a2", self.a2, "a2 must be positive")
        if self.z == 1.0:
            raise PoleError("epstein2", self.z)

    def dual(self) -> "EpsteinForm":
        """The form (1 - z; 1/a1, 1/a2) on the other side of the functional equation."""
        return EpsteinForm(1.0 - self.z, 1.0 / self.a1, 1.0 / self.a2)

    def scaled(self, factor: float) -> "EpsteinForm":
        return EpsteinForm(self.z, factor * self.a1, factor * self.a2)

    def swapped(self) -> "EpsteinForm":
        return EpsteinForm(self.z, self.a2, self.a1)

    def at(self, z: float) -> "EpsteinForm":
        return EpsteinForm(z, self.a1, self.a2)


def _quadrant_power_sum(a1: float, a2: float, z: float, n1_max: int, n2_max: int) -> float:
    """Primed sum of (a1 n1^2 + a2 n2^2)^(-z) over |n1| <= n1_max, |n2| <= n2_max."""
    n2 = np.arange(1, n2_max + 1, dtype=float)
    n1 = np.arange(1, n1_max + 1, dtype=float)
    axes = 2.0 * float(np.sum((a1 * n1[::-1] ** 2) ** -z))
    axes += 2.0 * float(np.sum((a2 * n2[::-1] ** 2) ** -z))
    chunk = max(1, _CHUNK_ELEMENTS // max(n2_max, 1))
    interior = 0.0
    for start in range(n1_max, 0, -chunk):
        rows = np.arange(max(start - chunk + 1, 1), start + 1, dtype=float)[::-1]
        block = a1 * rows[:, None] ** 2 + a2 * n2[None, ::-1] ** 2
        interior += float(np.sum(np.power(block, -z)))
    return axes + 4.0 * interior


def _continuum_remainder(a1: float, a2: float, z: float, m1: float, m2: float) -> float:
    """Midpoint Euler-Maclaurin estimate of the sum outside [-m1, m1] x [-m2, m2]."""

    def weight(theta: float) -> float:
        return float((a1 * math.cos(theta) ** 2 + a2 * math.sin(theta) ** 2) ** -z)

    theta_c = math.atan2(m2, m1)
    quad_opts = {"epsabs": 0.0, "epsrel": 1e-13, "limit": 200}
    i1, _ = integrate.quad(
        lambda t: weight(t) * (m1 / math.cos(t)) ** (2.0 - 2.0 * z), 0.0, theta_c, **quad_opts
    )
    i2, _ = integrate.quad(
        lambda t: weight(t) * (m2 / math.sin(t)) ** (2.0 - 2.0 * z),
        theta_c,
        0.5 * math.pi,
        **quad_opts,
    )
    outside = 4.0 * (i1 + i2) / (2.0 * z - 2.0)

    e1, _ = integrate.quad(lambda y: (a1 * m1**2 + a2 * y**2) ** (-z - 1.0), 0.0, m2, **quad_opts)
    e2, _ = integrate.quad(lambda x: (a1 * x**2 + a2 * m2**2) ** (-z - 1.0), 0.0, m1, **quad_opts)
    boundary = 8.0 * z * (m1 * a1 * e1 + m2 * a2 * e2)
    return outside - boundary / 24.0


def _direct_at(form: EpsteinForm, n: int) -> Tuple[float, int, int]:
    """Rectangle sum plus continuum remainder, rectangle matched to the form's aspect."""
    # sqrt(a1) M1 ~ sqrt(a2) M2 keeps the rectangle close to a level set of the form.
    ratio = math.sqrt(form.a2 / form.a1)
    m = n + 0.5
    if ratio >= 1.0:
        n1, n2 = int(round(m * ratio - 0.5)), n
    else:
        n1, n2 = n, int(round(m / ratio - 0.5))
    body = _quadrant_power_sum(form.a1, form.a2, form.z, n1, n2)
    rest = _continuum_remainder(form.a1, form.a2, form.z, n1 + 0.5, n2 + 0.5)
    return body + rest, n1, n2


def epstein2_direct(form: EpsteinForm, ctl: SumControl) -> LatticeValue:
    """
    Epstein function by direct lattice summation, valid for z > 1.

    The rectangle is doubled until two successive values agree to ctl.rel_tol.

    Args:
        form: Epstein argument package
        ctl: Truncation policy

    Returns:
        LatticeValue of E2(z; a1, a2)

    Raises:
        DomainError: If z <= 1
        ConvergenceError: If the per-index cap is reached or the estimate stalls
    """
    if form.z <= 1.0:
        raise DomainError("z", form.z, "direct Epstein summation requires z > 1")
    n = _DIRECT_START
    previous, _, _ = _direct_at(form, n)
    last_est = math.inf
    while True:
        n *= 2
        current, n1, n2 = _direct_at(form, n)
        terms = max(n1, n2)
        est = abs(current - previous) + ROUNDOFF * abs(current)
        logger.debug("epstein2_direct(%r): N=(%d, %d) est %.3g", form, n1, n2, est)
        if est <= ctl.rel_tol * abs(current):
            return LatticeValue(value=current, est_error=est, terms_used=terms)
        if est >= last_est or 2 * terms > ctl.max_terms:
            raise ConvergenceError("epstein2_direct", terms, est)
        previous, last_est = current, est


def _theta_arguments(b1: float, b2: float) -> np.ndarray:
    """Values pi (b1 n1^2 + b2 n2^2) <= THETA_CUTOFF over the primed lattice."""
    k1 = int(math.floor(math.sqrt(THETA_CUTOFF / (math.pi * b1))))
    k2 = int(math.floor(math.sqrt(THETA_CUTOFF / (math.pi * b2))))
    n1 = np.arange(-k1, k1 + 1, dtype=float)
    n2 = np.arange(-k2, k2 + 1, dtype=float)
    x = math.pi * (b1 * n1[:, None] ** 2 + b2 * n2[None, :] ** 2)
    keep = (x > 0.0) & (x <= THETA_CUTOFF)
    return np.sort(x[keep])[::-1]


def _theta_sums(form: EpsteinForm) -> Tuple[float, float, float]:
    """The two incomplete-gamma sums of the continuation and the split point t0."""
    z, a1, a2 = form.z, form.a1, form.a2
    t0 = 1.0 / math.sqrt(a1 * a2)
    r = math.sqrt(a1 / a2)
    # pi Q t0 and pi Q~ / t0 written through the aspect only.
    x1 = _theta_arguments(r, 1.0 / r)
    x2 = _theta_arguments(1.0 / r, r)
    sigma1 = float(np.sum(np.power(x1 / t0, -z) * upper_incomplete_gamma_array(z, x1)))
    sigma2 = float(np.sum(np.power(x2 * t0, z - 1.0) * upper_incomplete_gamma_array(1.0 - z, x2)))
    return sigma1, sigma2, t0


def epstein2(form: EpsteinForm) -> float:
    """
    Analytic continuation of the Epstein function to real z != 1.

    E2 = pi^z [ (S1 + c S2 + c t0^(z-1) / (z-1)) / Gamma(z) - t0^z / Gamma(z+1) ]
    with c = t0 = (a1 a2)^(-1/2). Finite at z = 0 (value -1) and at the
    non-positive integers.

    Raises:
        PoleError: At z = 1
    """
    if abs(form.z) < ZERO_GUARD:
        return -1.0
    sigma1, sigma2, t0 = _theta_sums(form)
    z = form.z
    c = t0
    regular = sigma1 + c * sigma2 + c * t0 ** (z - 1.0) / (z - 1.0)
    return math.pi**z * (
        float(special.rgamma(z)) * regular - t0**z * float(special.rgamma(z + 1.0))
    )


def epstein2_completed(form: EpsteinForm) -> float:
    """
    Completed function pi^(-z) Gamma(z) E2(z), in its regular rearrangement.

    Raises:
        PoleError: At z = 0 and z = 1
    """
    if form.z == 0.0:
        raise PoleError("epstein2_completed", form.z)
    sigma1, sigma2, t0 = _theta_sums(form)
    z = form.z
    c = t0
    return sigma1 + c * sigma2 + c * t0 ** (z - 1.0) / (z - 1.0) - t0**z / z


def epstein2_slope(form: EpsteinForm) -> Tuple[float, float]:
    """Five-point z-derivative and its error estimate from halving the resolution."""
    z, h = form.z, Z_STEP
    if abs(z - 1.0) < 4.0 * h:
        raise PoleError("epstein2_deriv_z", z, f"stencil at z={z!r} reaches the pole at z=1")
    f = {k: epstein2(form.at(z + k * h)) for k in (-4, -2, -1, 1, 2, 4)}
    fine = (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12.0 * h)
    coarse = (f[-4] - 8.0 * f[-2] + 8.0 * f[2] - f[4]) / (24.0 * h)
    noise = 16.0 * ROUNDOFF * max(abs(v) for v in f.values()) / h
    return fine, abs(fine - coarse) + noise


def epstein2_deriv_z(form: EpsteinForm) -> float:
    """
    Derivative of the continued Epstein function in z.

    Raises:
        PoleError: Within a few stencil steps of z = 1
    """
    value, est = epstein2_slope(form)
    logger.debug("epstein2_deriv_z(%r) = %r (est %.3g)", form, value, est)
    return value


def epstein2_quadrant(form: EpsteinForm) -> float:
    """
    Positive-quadrant sum over n1, n2 >= 1, continued in z.

    Obtained from the full primed sum by removing both axes:
    E2 = 4 Q + 2 (a1^-z + a2^-z) zeta(2z).
    """
    z, a1, a2 = form.z, form.a1, form.a2
    axes = 2.0 * (a1**-z + a2**-z) * riemann_zeta(2.0 * z)
    return (epstein2(form) - axes) / 4.0


def quadrant_slope(form: EpsteinForm, full_slope: float) -> float:
    """Quadrant z-derivative from the z-derivative of the full primed sum."""
    z, a1, a2 = form.z, form.a1, form.a2
    powers = a1**-z + a2**-z
    log_powers = math.log(a1) * a1**-z + math.log(a2) * a2**-z
    return (
        full_slope
        + 2.0 * log_powers * riemann_zeta(2.0 * z)
        - 4.0 * powers * riemann_zeta_deriv(2.0 * z)
    ) / 4.0


def epstein2_quadrant_deriv_z(form: EpsteinForm) -> float:
    """z-derivative of epstein2_quadrant."""
    return quadrant_slope(form, epstein2_deriv_z(form))


def _near_gamma_pole(z: float) -> bool:
    return z < POLE_GUARD and abs(z - round(z)) < POLE_GUARD


def _completed_side(form: EpsteinForm) -> float:
    if _near_gamma_pole(form.z):
        return epstein2_completed(form)
    return math.pi**-form.z * gamma_real(form.z) * epstein2(form)


def functional_equation_residual(form: EpsteinForm) -> float:
    """
    Relative residual of

        pi^-z Gamma(z) E2(z; a1, a2) = (a1 a2)^(-1/2) pi^(z-1) Gamma(1-z) E2(1-z; 1/a1, 1/a2)

    Near the Gamma poles each side is taken from the regular rearrangement.

    Raises:
        PoleError: At z = 0 and z = 1
    """
    if form.z == 0.0:
        raise PoleError("functional_equation_residual", form.z)
    lhs = _completed_side(form)
    rhs = _completed_side(form.dual()) / math.sqrt(form.a1 * form.a2)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0.0 else 0.0
