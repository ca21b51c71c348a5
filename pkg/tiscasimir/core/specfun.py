"""
Real-argument special functions: Gamma, Riemann zeta, Dirichlet eta and the
upper incomplete gamma function.

Every function accepts plain floats and returns plain floats. The incomplete
gamma function also has an array form used by the Epstein continuation.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import special

from .exceptions import DomainError, PoleError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

# Number of Borwein terms; the truncation error is below 3 / (3 + sqrt(8))**n.
BORWEIN_TERMS = 30

# Step of the five-point derivative stencil.
DERIV_STEP = 1e-3

_CF_MAX_ITER = 500
_CF_BIG = 4.503599627370496e15
_CF_BIGINV = 2.22044604925031308085e-16
_MACHEP = 1.11022302462515654042e-16

# Orders closer than this to a non-positive integer have their Gamma pole
# cancelled against the matching series term.
POLE_PAIR_GUARD = 1e-3

_SERIES_TERMS = 40
_LOG_GAMMA_TERMS = 10


def _check_finite(field: str, x: float) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise DomainError(field, x, f"'{field}' must be finite, got {x!r}")
    return value


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    """sin(pi * x) with the argument reduced exactly before scaling by pi."""
    r = math.fmod(x, 2.0)
    if r == 0.0 or abs(r) == 1.0:
        return 0.0
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def gamma_real(x: float) -> float:
    """
    Gamma function on the real axis.

    Args:
        x: Real argument

    Returns:
        Gamma(x)

    Raises:
        PoleError: If x is zero or a negative integer
    """
    x = _check_finite("x", x)
    if _is_nonpositive_integer(x):
        raise PoleError("gamma", x)
    return float(special.gamma(x))


@lru_cache(maxsize=4)
def _borwein_weights(n: int) -> Tuple[float, ...]:
    """Weights (d_k - d_n) / d_n of the Borwein eta algorithm, built exactly."""
    ds = [0] * (n + 1)
    d = 1
    s = ds[0] = 1
    for i in range(1, n + 1):
        d = d * 4 * (n + i - 1) * (n - i + 1)
        d //= (2 * i) * (2 * i - 1)
        s += d
        ds[i] = s
    return tuple(float(Fraction(ds[k] - ds[n], ds[n])) for k in range(n))


def _eta_borwein(s: float) -> float:
    weights = np.asarray(_borwein_weights(BORWEIN_TERMS))
    k = np.arange(BORWEIN_TERMS, dtype=float)
    signs = np.where(np.arange(BORWEIN_TERMS) % 2 == 0, 1.0, -1.0)
    return float(-np.sum(signs * weights * np.power(k + 1.0, -s)))


def riemann_zeta(s: float) -> float:
    """
    Riemann zeta function on the real axis, analytically continued to s < 1.

    For s > 1 the Dirichlet series is summed by scipy; on (-1, 1) the value
    comes from the Borwein eta series; for s <= -1 the functional equation is
    applied.

    Args:
        s: Real argument

    Returns:
        zeta(s)

    Raises:
        PoleError: At s = 1
    """
    s = _check_finite("s", s)
    if s == 1.0:
        raise PoleError("riemann_zeta", s)
    if s > 1.0:
        return float(special.zeta(s, 1.0))
    # zeta(1 - s) has its pole next to s = 0; the eta series has none.
    if s > -1.0:
        return _eta_borwein(s) / -math.expm1((1.0 - s) * LN2)
    if s == math.floor(s) and int(s) % 2 == 0:
        return 0.0
    # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    reflected = float(special.zeta(1.0 - s, 1.0))
    prefactor = math.exp(s * LN2 + (s - 1.0) * math.log(math.pi))
    return prefactor * _sinpi(0.5 * s) * float(special.gamma(1.0 - s)) * reflected


def riemann_zeta_deriv(s: float) -> float:
    """
    Derivative of the Riemann zeta function by a five-point central stencil.

    The step is DERIV_STEP, reduced near the pole so that no stencil point
    reaches s = 1.

    Raises:
        PoleError: At s = 1
    """
    s = _check_finite("s", s)
    if s == 1.0:
        raise PoleError("riemann_zeta_deriv", s)
    h = min(DERIV_STEP, abs(s - 1.0) / 4.0)
    return (
        riemann_zeta(s - 2.0 * h)
        - 8.0 * riemann_zeta(s - h)
        + 8.0 * riemann_zeta(s + h)
        - riemann_zeta(s + 2.0 * h)
    ) / (12.0 * h)


def dirichlet_eta(s: float) -> float:
    """
    Dirichlet eta function eta(s) = (1 - 2^(1-s)) zeta(s), entire in s.

    Args:
        s: Real argument

    Returns:
        eta(s), with eta(1) = ln 2
    """
    s = _check_finite("s", s)
    if s == 1.0:
        return LN2
    if -1.0 < s <= 1.0:
        return _eta_borwein(s)
    return -math.expm1((1.0 - s) * LN2) * riemann_zeta(s)


def _gamma_cf(s: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for Gamma(s, x) / (x^s e^-x), vectorized over x >= 1."""
    y = np.full_like(x, 1.0 - s)
    z = x + y + 1.0
    c = np.zeros_like(x)
    pkm2 = np.ones_like(x)
    qkm2 = x.copy()
    pkm1 = x + 1.0
    qkm1 = z * x
    ans = pkm1 / qkm1
    for _ in range(_CF_MAX_ITER):
        c += 1.0
        y += 1.0
        z += 2.0
        yc = y * c
        pk = pkm1 * z - pkm2 * yc
        qk = qkm1 * z - qkm2 * yc
        nonzero = qk != 0.0
        r = np.where(nonzero, pk / np.where(nonzero, qk, 1.0), ans)
        t = np.where(nonzero, np.abs((ans - r) / r), 1.0)
        ans = r
        pkm2, pkm1 = pkm1, pk
        qkm2, qkm1 = qkm1, qk
        big = np.abs(pk) > _CF_BIG
        if np.any(big):
            pkm2 = np.where(big, pkm2 * _CF_BIGINV, pkm2)
            pkm1 = np.where(big, pkm1 * _CF_BIGINV, pkm1)
            qkm2 = np.where(big, qkm2 * _CF_BIGINV, qkm2)
            qkm1 = np.where(big, qkm1 * _CF_BIGINV, qkm1)
        if np.all(t <= _MACHEP):
            break
    return ans


def _log_gamma_one_minus(eps: float) -> float:
    """ln Gamma(1 - eps) from its Taylor series, for |eps| < POLE_PAIR_GUARD."""
    total = np.euler_gamma * eps
    for k in range(2, _LOG_GAMMA_TERMS):
        total += float(special.zeta(k, 1.0)) * eps**k / k
    return total


def _gamma_series(s: float, x: np.ndarray) -> np.ndarray:
    """
    Gamma(s, x) for x < 1 as Gamma(s) minus the lower series.

    Gamma(s, x) = Gamma(s) - sum_k (-1)^k x^(s+k) / (k! (s + k)). Writing
    s = -n - eps with n the nearest non-positive integer, the pole of Gamma(s)
    and the k = n term both go like 1/eps; for |eps| < POLE_PAIR_GUARD they
    are combined in closed form,

        Gamma(s) - term_n = ((-1)^n / n!) (R - x^-eps) / (-eps),
        R = Gamma(1 - eps) / prod_{m=1..n} (1 + eps / m),

    with R - x^-eps evaluated through expm1 of the log ratio.
    """
    n = max(int(round(-s)), 0)
    eps = -s - n
    paired = abs(eps) < POLE_PAIR_GUARD
    k = np.arange(n + _SERIES_TERMS, dtype=float)
    if paired:
        k = k[k != n]
    coef = np.where(k % 2 == 0, 1.0, -1.0) * special.rgamma(k + 1.0) / (s + k)
    log_x = np.log(x)
    lower = np.sum(coef[None, :] * np.exp((s + k)[None, :] * log_x[:, None]), axis=1)
    if not paired:
        return np.asarray(special.gamma(s) - lower, dtype=float)
    sign = (-1.0) ** n / math.factorial(n)
    if abs(eps) < _MACHEP:
        # Limit eps -> 0: ((-1)^n / n!) (psi(n + 1) - ln x).
        harmonic = sum(1.0 / m for m in range(1, n + 1))
        head = sign * (harmonic - np.euler_gamma - log_x)
    else:
        log_r = _log_gamma_one_minus(eps) - sum(math.log1p(eps / m) for m in range(1, n + 1))
        head = sign * np.exp(-eps * log_x) * np.expm1(log_r + eps * log_x) / -eps
    return np.asarray(head - lower, dtype=float)


def upper_incomplete_gamma_array(s: float, x: np.ndarray) -> np.ndarray:
    """
    Upper incomplete gamma Gamma(s, x) for one order and an array of x > 0.

    Raises:
        DomainError: If any x is not strictly positive
    """
    s = _check_finite("s", s)
    x = np.asarray(x, dtype=float)
    if x.size and not np.all(x > 0.0):
        raise DomainError("x", float(np.min(x)), "upper_incomplete_gamma requires x > 0")
    if s > POLE_PAIR_GUARD:
        return np.asarray(special.gammaincc(s, x) * special.gamma(s), dtype=float)
    out = np.empty_like(x)
    large = x >= 1.0
    if np.any(large):
        xl = x[large]
        out[large] = _gamma_cf(s, xl) * np.exp(s * np.log(xl) - xl)
    if np.any(~large):
        out[~large] = _gamma_series(s, x[~large])
    return out


def upper_incomplete_gamma(s: float, x: float) -> float:
    """
    Upper incomplete gamma function Gamma(s, x) = integral_x^inf t^(s-1) e^-t dt.

    Any real order is accepted. Orders above POLE_PAIR_GUARD use the
    regularized scipy function; smaller orders use a continued fraction for
    x >= 1 and the lower series with its pole term paired below that.

    Args:
        s: Real order
        x: Positive lower limit

    Returns:
        Gamma(s, x)

    Raises:
        DomainError: If x <= 0
    """
    x = _check_finite("x", x)
    if x <= 0.0:
        raise DomainError("x", x, "upper_incomplete_gamma requires x > 0")
    return float(upper_incomplete_gamma_array(s, np.array([x]))[0])
