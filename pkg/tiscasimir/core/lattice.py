"""
Primed double lattice sums behind the free-energy profiles.

The common kernel is

    g(eta) = sum'_{l, n} eta^4 / (l^2 + eta^2 n^2)^2

with the origin excluded. The accelerated mode resums the l-index in closed
form and isolates the algebraic part 2 zeta(4) eta^4 + pi zeta(3) eta, leaving
an exponentially convergent remainder. The naive mode truncates the raw
double sum (plus its continuum tails) and serves as an oracle.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .exceptions import ConvergenceError, DomainError
from .specfun import dirichlet_eta, riemann_zeta

logger = logging.getLogger(__name__)

ZETA3 = riemann_zeta(3.0)
ZETA4 = riemann_zeta(4.0)

# Sum over n != 0 of (-1)^n / n^4, i.e. -2 eta(4) = -7 pi^4 / 360.
S0 = -2.0 * dirichlet_eta(4.0)

ROUNDOFF = 2.0 * float(np.finfo(float).eps)

_NAIVE_START = 16
_NAIVE_ROW_PAD = 6.0
_CHUNK_ELEMENTS = 1 << 20


class SumMode(str, Enum):
    """Evaluation strategy for infinite lattice sums."""

    NAIVE = "naive"
    ACCELERATED = "accelerated"


@dataclass(frozen=True)
class SumControl:
    """Truncation policy shared by every infinite sum and continuation."""

    rel_tol: float = 1e-12
    max_terms: int = 200_000
    mode: SumMode = SumMode.ACCELERATED

    def __post_init__(self) -> None:
        if not (isinstance(self.rel_tol, (int, float)) and 0.0 < self.rel_tol <= 1e-3):
            raise DomainError("rel_tol", self.rel_tol, "rel_tol must lie in (0, 1e-3]")
        if isinstance(self.max_terms, bool) or not isinstance(self.max_terms, int):
            raise DomainError("max_terms", self.max_terms, "max_terms must be an integer")
        if self.max_terms < 8:
            raise DomainError("max_terms", self.max_terms, "max_terms must be at least 8")
        try:
            object.__setattr__(self, "mode", SumMode(self.mode))
        except ValueError:
            raise DomainError("mode", self.mode, f"Unknown sum mode {self.mode!r}") from None


@dataclass(frozen=True)
class LatticeValue:
    """A truncated sum together with its error estimate."""

    value: float
    est_error: float
    terms_used: int


def _check_positive(field: str, x: float) -> float:
    value = float(x)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(field, x, f"'{field}' must be a positive finite number, got {x!r}")
    return value


def _remainder(c: np.ndarray) -> np.ndarray:
    """inner_sum_sq(c) - pi / (2 c^3), exponentially small in c."""
    q = np.exp(-2.0 * math.pi * c)
    om = -np.expm1(-2.0 * math.pi * c)
    return (math.pi / c**3) * q / om + (2.0 * math.pi**2 / c**2) * q / om**2


def inner_sum_sq(c: float) -> float:
    """
    Full-line sum over l of 1 / (l^2 + c^2)^2.

    Closed form (pi / (2 c^3)) coth(pi c) + (pi^2 / (2 c^2)) csch^2(pi c),
    written so that the exponentially small part is added to pi / (2 c^3).

    Raises:
        DomainError: If c <= 0
    """
    c = _check_positive("c", c)
    return math.pi / (2.0 * c**3) + float(_remainder(np.array([c]))[0])


def g_asymptotic(eta: float) -> float:
    """Algebraic part of g: 2 zeta(4) eta^4 + pi zeta(3) eta."""
    eta = _check_positive("eta", eta)
    return 2.0 * ZETA4 * eta**4 + math.pi * ZETA3 * eta


def g_remainder(eta: float, ctl: SumControl) -> LatticeValue:
    """
    Exponentially small part of g: 2 eta^4 sum_{n>=1} R(eta n).

    Terms are added in blocks; after each block the tail is bounded by a
    geometric series with ratio exp(-2 pi eta).

    Args:
        eta: Positive lattice aspect
        ctl: Truncation policy

    Returns:
        LatticeValue of the remainder

    Raises:
        ConvergenceError: If max_terms is reached first
    """
    eta = _check_positive("eta", eta)
    q = math.exp(-2.0 * math.pi * eta)
    block = max(8, int(math.ceil(math.log(1e3 / ctl.rel_tol) / (2.0 * math.pi * eta))))
    partial = 0.0
    n_done = 0
    tail = 0.0
    while True:
        if n_done >= ctl.max_terms:
            raise ConvergenceError("g_remainder", n_done, 2.0 * eta**4 * tail)
        stop = min(n_done + block, ctl.max_terms)
        n = np.arange(n_done + 1, stop + 1, dtype=float)
        terms = _remainder(eta * n)
        # Smallest terms first.
        partial += float(np.sum(terms[::-1]))
        n_done = stop
        last = float(terms[-1])
        tail = last * q / (1.0 - q) if q < 1.0 else math.inf
        if tail <= ctl.rel_tol * partial or partial == 0.0:
            break
    scale = 2.0 * eta**4
    value = scale * partial
    est = scale * (tail + ROUNDOFF * partial)
    logger.debug("g_remainder(%r): %d terms, est %.3g", eta, n_done, est)
    return LatticeValue(value=value, est_error=est, terms_used=n_done)


def g_unreflected(eta: float, ctl: SumControl) -> LatticeValue:
    """
    g(eta) from the resummed form at eta itself, never through g(1/eta).

    The remainder needs about 1/eta terms per decade of accuracy, so this is
    slow for small eta; inversion checks use it to evaluate each side of a
    relation from its own remainder sum. Naive mode defers to g_sum.

    Raises:
        DomainError: If eta <= 0
        ConvergenceError: If max_terms is reached before rel_tol
    """
    eta = _check_positive("eta", eta)
    if ctl.mode is SumMode.NAIVE:
        return g_sum(eta, ctl)
    rem = g_remainder(eta, ctl)
    value = g_asymptotic(eta) + rem.value
    result = LatticeValue(
        value=value, est_error=rem.est_error + ROUNDOFF * value, terms_used=rem.terms_used
    )
    if result.est_error > ctl.rel_tol * abs(value):
        raise ConvergenceError("g_unreflected", result.terms_used, result.est_error)
    return result


def _g_accelerated(eta: float, ctl: SumControl) -> LatticeValue:
    if eta >= 1.0:
        rem = g_remainder(eta, ctl)
        value = g_asymptotic(eta) + rem.value
        est = rem.est_error
    else:
        # g(eta) = eta^4 g(1/eta)
        rem = g_remainder(1.0 / eta, ctl)
        value = 2.0 * ZETA4 + math.pi * ZETA3 * eta**3 + eta**4 * rem.value
        est = eta**4 * rem.est_error
    return LatticeValue(value=value, est_error=est + ROUNDOFF * value, terms_used=rem.terms_used)


def _row_tail(c: np.ndarray, x: float) -> np.ndarray:
    """Midpoint Euler-Maclaurin estimate of sum_{l > x - 1/2} 1 / (l^2 + c^2)^2."""
    u = (c / x) ** 2
    small = u < 1.0
    integral = np.empty_like(c)
    integral[small] = special.hyp2f1(2.0, 1.5, 2.5, -u[small]) / (3.0 * x**3)
    cl = c[~small]
    dl = x**2 + cl**2
    integral[~small] = np.arctan(cl / x) / (2.0 * cl**3) - x / (2.0 * cl**2 * dl)
    d = x**2 + c**2
    d1 = -4.0 * x / d**3
    d3 = 72.0 * x / d**4 - 192.0 * x**3 / d**5
    return integral + d1 / 24.0 - 7.0 * d3 / 5760.0


def _naive_rows(eta: float, ell_cut: int, row_cut: int, alternating: bool) -> float:
    """Truncated primed sum over |l| <= ell_cut, |n| <= row_cut, with continuum tails."""
    ell = np.arange(1, ell_cut + 1, dtype=float)
    x = ell_cut + 0.5
    eta4 = eta**4
    zero = np.zeros(1)
    row0 = 2.0 * float(np.sum(ell[::-1] ** -4)) + 2.0 * float(_row_tail(zero, x)[0])
    total = eta4 * row0

    chunk = max(1, _CHUNK_ELEMENTS // ell_cut)
    rows = 0.0
    for start in range(1, row_cut + 1, chunk):
        n = np.arange(start, min(start + chunk, row_cut + 1), dtype=float)
        c = eta * n
        body = np.sum(1.0 / (ell[None, ::-1] ** 2 + c[:, None] ** 2) ** 2, axis=1)
        row = 1.0 / c**4 + 2.0 * body + 2.0 * _row_tail(c, x)
        if alternating:
            row = np.where(n % 2 == 0, row, -row)
        rows += float(np.sum(row))
    total += 2.0 * eta4 * rows

    # Rows beyond row_cut carry only their continuum part pi / (2 (eta n)^3).
    if alternating:
        sign = -1.0 if (row_cut + 1) % 2 else 1.0
        hurwitz = special.zeta(3.0, (row_cut + 1) / 2.0) - special.zeta(3.0, (row_cut + 2) / 2.0)
        total += math.pi * eta * sign * float(hurwitz) / 8.0
    else:
        total += math.pi * eta * float(special.zeta(3.0, row_cut + 1.0))
    return total


def _naive_sum(eta: float, ctl: SumControl, alternating: bool) -> LatticeValue:
    """Grow both cutoffs together by doubling until successive sums agree."""
    label = "alternating lattice sum" if alternating else "g_sum"
    pad = int(math.ceil(_NAIVE_ROW_PAD / eta))
    ell_cut = _NAIVE_START
    previous = _naive_rows(eta, ell_cut, ell_cut + pad, alternating)
    last_est = math.inf
    while True:
        ell_cut *= 2
        row_cut = ell_cut + pad
        terms = max(ell_cut, row_cut)
        if terms > ctl.max_terms:
            raise ConvergenceError(label, terms, last_est)
        current = _naive_rows(eta, ell_cut, row_cut, alternating)
        est = abs(current - previous) + ROUNDOFF * abs(current)
        logger.debug("%s naive: L=%d N=%d est %.3g", label, ell_cut, row_cut, est)
        if est <= ctl.rel_tol * abs(current):
            return LatticeValue(value=current, est_error=est, terms_used=terms)
        if est >= last_est:
            raise ConvergenceError(label, terms, est)
        previous, last_est = current, est


def g_sum(eta: float, ctl: SumControl) -> LatticeValue:
    """
    The kernel g(eta) of the periodic-field free energy.

    Args:
        eta: Positive lattice aspect
        ctl: Truncation policy; ctl.mode selects naive or accelerated evaluation

    Returns:
        LatticeValue of g(eta)

    Raises:
        DomainError: If eta <= 0
        ConvergenceError: If max_terms is reached before rel_tol
    """
    eta = _check_positive("eta", eta)
    if ctl.mode is SumMode.NAIVE:
        result = _naive_sum(eta, ctl, alternating=False)
    else:
        result = _g_accelerated(eta, ctl)
    if result.est_error > ctl.rel_tol * abs(result.value):
        raise ConvergenceError("g_sum", result.terms_used, result.est_error)
    return result


def _alternating_excess(eta: float, ctl: SumControl) -> LatticeValue:
    """S - S0 with S = g(2 eta) / 8 - g(eta), free of cancellation."""
    if eta >= 1.0:
        rem1 = g_remainder(eta, ctl)
        rem2 = g_remainder(2.0 * eta, ctl)
        algebraic = 2.0 * ZETA4 * eta**4 - 0.75 * math.pi * ZETA3 * eta + 1.75 * ZETA4
        value = algebraic + rem2.value / 8.0 - rem1.value
        est = rem2.est_error / 8.0 + rem1.est_error + ROUNDOFF * (abs(algebraic) + abs(value))
    else:
        # Reflected forms: the algebraic parts of both g values cancel exactly.
        rem1 = g_remainder(1.0 / eta, ctl)
        rem2 = g_remainder(0.5 / eta, ctl)
        eta4 = eta**4
        value = 2.0 * eta4 * rem2.value - eta4 * rem1.value
        est = eta4 * (2.0 * rem2.est_error + rem1.est_error) + ROUNDOFF * abs(value)
    terms = max(rem1.terms_used, rem2.terms_used)
    return LatticeValue(value=value, est_error=est, terms_used=terms)


def f_xi(xi: float, ctl: SumControl) -> LatticeValue:
    """
    Thermal profile f(xi) = (S(xi) - S0) / (2 pi^4 xi^3).

    S is the primed alternating double sum; accelerated mode uses the even/odd
    split S = g(2 pi xi) / 8 - g(pi xi).

    Raises:
        DomainError: If xi <= 0
        ConvergenceError: If max_terms is reached before rel_tol
    """
    xi = _check_positive("xi", xi)
    eta = math.pi * xi
    if ctl.mode is SumMode.NAIVE:
        raw = _naive_sum(eta, ctl, alternating=True)
        excess = LatticeValue(
            value=raw.value - S0,
            est_error=raw.est_error + ROUNDOFF * abs(S0),
            terms_used=raw.terms_used,
        )
    else:
        excess = _alternating_excess(eta, ctl)
        if excess.est_error > ctl.rel_tol * abs(excess.value):
            raise ConvergenceError("f_xi", excess.terms_used, excess.est_error)
    scale = 1.0 / (2.0 * math.pi**4 * xi**3)
    return LatticeValue(
        value=scale * excess.value,
        est_error=scale * excess.est_error,
        terms_used=excess.terms_used,
    )
