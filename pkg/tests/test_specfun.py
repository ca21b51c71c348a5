"""
Tests for the special functions module.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiscasimir.core.exceptions import DomainError, PoleError
from tiscasimir.core.specfun import (
    dirichlet_eta,
    gamma_real,
    riemann_zeta,
    riemann_zeta_deriv,
    upper_incomplete_gamma,
    upper_incomplete_gamma_array,
)

mpmath.mp.dps = 30


def _close(value, expected, rel=1e-12, abs_tol=0.0):
    return math.isclose(value, float(expected), rel_tol=rel, abs_tol=abs_tol)


class TestGammaReal:
    """Test cases for gamma_real."""

    def test_classical_values(self):
        """Test Gamma at 1, 1/2 and 5."""
        assert gamma_real(1.0) == pytest.approx(1.0, rel=1e-15)
        assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma_real(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_negative_non_integer(self):
        """Test Gamma between the poles."""
        for x in (-0.5, -1.5, -2.25, -7.9):
            assert _close(gamma_real(x), mpmath.gamma(x))

    @pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -10.0])
    def test_poles(self, x):
        """Test that the non-positive integers raise PoleError."""
        with pytest.raises(PoleError):
            gamma_real(x)

    def test_non_finite_argument(self):
        """Test that NaN is rejected."""
        with pytest.raises(DomainError):
            gamma_real(float("nan"))


class TestRiemannZeta:
    """Test cases for riemann_zeta and its derivative."""

    def test_classical_values(self):
        """Test closed-form values."""
        assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-14)
        assert riemann_zeta(4.0) == pytest.approx(math.pi**4 / 90.0, rel=1e-14)
        assert riemann_zeta(0.0) == pytest.approx(-0.5, rel=1e-14)
        assert riemann_zeta(-1.0) == pytest.approx(-1.0 / 12.0, rel=1e-13)
        assert riemann_zeta(-3.0) == pytest.approx(1.0 / 120.0, rel=1e-13)

    def test_trivial_zeros(self):
        """Test that negative even integers give exactly zero."""
        for s in (-2.0, -4.0, -10.0):
            assert riemann_zeta(s) == 0.0

    def test_pole(self):
        """Test that s = 1 raises PoleError."""
        with pytest.raises(PoleError):
            riemann_zeta(1.0)
        with pytest.raises(PoleError):
            riemann_zeta_deriv(1.0)

    def test_critical_strip(self):
        """Test the continuation between 0 and 1."""
        for s in (0.1, 0.5, 0.9, 0.999):
            assert _close(riemann_zeta(s), mpmath.zeta(s))

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=-10.0, max_value=30.0))
    def test_matches_reference(self, s):
        """Test agreement with an arbitrary-precision reference on [-10, 30]."""
        if abs(s - 1.0) < 1e-6:
            return
        assert _close(riemann_zeta(s), mpmath.zeta(s), rel=1e-12, abs_tol=1e-300)

    @pytest.mark.parametrize("s", [-1e-6, -1e-8, -1e-10, -2.57e-11, -1e-13, -1e-300, 1e-13])
    def test_near_zero(self, s):
        """Test that no digits are lost on either side of s = 0."""
        assert _close(riemann_zeta(s), mpmath.zeta(s), rel=1e-12)

    @pytest.mark.parametrize("s", [-0.999, -0.75, -0.25])
    def test_between_minus_one_and_zero(self, s):
        """Test the eta series route on (-1, 0)."""
        assert _close(riemann_zeta(s), mpmath.zeta(s), rel=1e-12)

    def test_derivative(self):
        """Test zeta' against known values."""
        assert riemann_zeta_deriv(0.0) == pytest.approx(-0.5 * math.log(2.0 * math.pi), rel=1e-8)
        expected = -float(mpmath.zeta(3)) / (4.0 * math.pi**2)
        assert riemann_zeta_deriv(-2.0) == pytest.approx(expected, rel=1e-8)
        expected = float(mpmath.zeta(3, derivative=1))
        assert riemann_zeta_deriv(3.0) == pytest.approx(expected, rel=1e-8)


class TestDirichletEta:
    """Test cases for dirichlet_eta."""

    def test_values(self):
        """Test eta at 0, 1 and 4."""
        assert dirichlet_eta(0.0) == pytest.approx(0.5, rel=1e-14)
        assert dirichlet_eta(1.0) == pytest.approx(math.log(2.0), rel=1e-15)
        assert dirichlet_eta(4.0) == pytest.approx(7.0 * math.pi**4 / 720.0, rel=1e-14)

    def test_negative_argument(self):
        """Test the continuation to negative s."""
        for s in (-0.5, -1.0, -3.5):
            assert _close(dirichlet_eta(s), mpmath.altzeta(s), rel=1e-11)

    @pytest.mark.parametrize("s", [-1e-6, -1e-10, -1e-13, -0.5])
    def test_just_below_zero(self, s):
        """Test eta to full precision just below s = 0."""
        assert _close(dirichlet_eta(s), mpmath.altzeta(s), rel=1e-12)


class TestUpperIncompleteGamma:
    """Test cases for the upper incomplete gamma function."""

    @pytest.mark.parametrize("s", [2.5, 1.0, 0.5, 0.0, -0.5, -1.0, -2.5])
    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 5.0, 30.0])
    def test_matches_reference(self, s, x):
        """Test against mpmath for positive, zero and negative orders."""
        assert _close(upper_incomplete_gamma(s, x), mpmath.gammainc(s, a=x), rel=1e-10)

    def test_order_one(self):
        """Test Gamma(1, x) = exp(-x)."""
        assert upper_incomplete_gamma(1.0, 3.0) == pytest.approx(math.exp(-3.0), rel=1e-14)

    @pytest.mark.parametrize(
        "s",
        [-1e-6, -1e-10, -1e-17, 1e-17, 1e-310, 5e-4, -2.0 + 1e-9, -2.0 - 1e-9, -3.0, -6.0 + 1e-12],
    )
    @pytest.mark.parametrize("x", [1e-6, 0.3, 0.5, 0.999, 2.0])
    def test_orders_near_poles(self, s, x):
        """Test orders next to non-positive integers, where Gamma(s) has a pole."""
        value = upper_incomplete_gamma(s, x)
        assert math.isfinite(value)
        assert _close(value, mpmath.gammainc(s, a=x), rel=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(min_value=-6.0, max_value=6.0),
        st.floats(min_value=1e-6, max_value=50.0),
    )
    def test_reference_grid(self, s, x):
        """Test agreement with mpmath for s in [-6, 6] and x in [1e-6, 50]."""
        expected = mpmath.gammainc(s, a=x)
        assert _close(upper_incomplete_gamma(s, x), expected, rel=1e-10, abs_tol=1e-300)

    def test_array_matches_scalar(self):
        """Test that the vectorized form agrees with the scalar form."""
        x = np.array([0.2, 0.9, 1.0, 4.0, 55.0])
        values = upper_incomplete_gamma_array(-1.5, x)
        for xi, value in zip(x, values):
            assert value == pytest.approx(upper_incomplete_gamma(-1.5, float(xi)), rel=1e-15)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_non_positive_x(self, x):
        """Test that x <= 0 raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            upper_incomplete_gamma(0.5, x)
        assert exc_info.value.field == "x"
