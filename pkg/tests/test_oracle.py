"""
Tests for the independent oracles.
"""

import logging
import math

import pytest

from tiscasimir.core import oracle
from tiscasimir.core.casimir import Slab, thermal_part, zero_point_antiperiodic
from tiscasimir.core.exceptions import ConvergenceError, DomainError, ExtrapolationError
from tiscasimir.core.lattice import SumControl
from tiscasimir.core.oracle import (
    OracleControl,
    cutoff_energy,
    raw_cutoff_energy,
    richardson_limit,
    thermal_oracle,
    zero_point_ladder,
    zero_point_oracle,
)


class TestOracleControl:
    """Test cases for OracleControl validation."""

    def test_defaults(self):
        """Test the default cutoffs."""
        ctl = OracleControl()
        assert (ctl.m_max, ctl.j_max, ctl.delta) == (1001, 1000, 0.04)

    @pytest.mark.parametrize(
        "kwargs", [{"m_max": 0}, {"j_max": 2.5}, {"delta": 0.0}, {"rel_tol": -1.0}, {"m_max": True}]
    )
    def test_invalid(self, kwargs):
        """Test that invalid cutoffs raise DomainError."""
        with pytest.raises(DomainError):
            OracleControl(**kwargs)


class TestThermalOracle:
    """Test cases for the mode-sum oracle."""

    def setup_method(self):
        """Set up controls."""
        self.ctl = OracleControl()
        self.sums = SumControl(rel_tol=1e-12)

    @pytest.mark.parametrize("xi", [0.05, 0.2, 1.0, 3.0, 5.0])
    def test_matches_thermal_part(self, xi):
        """Test the mode sum against the lattice thermal part."""
        slab = Slab.from_xi(1.0, xi)
        expected = thermal_part(slab, self.sums)
        assert thermal_oracle(slab, self.ctl) == pytest.approx(expected, rel=1e-8)

    def test_negative(self):
        """Test that the thermal part from the mode sum is negative."""
        assert thermal_oracle(Slab(a=2.0, beta=1.0), self.ctl) < 0.0

    def test_truncation_detected(self):
        """Test that a too-short Boltzmann series raises ConvergenceError."""
        with pytest.raises(ConvergenceError) as exc_info:
            thermal_oracle(Slab.from_xi(1.0, 5.0), OracleControl(j_max=2))
        assert exc_info.value.quantity == "thermal_oracle"

    def test_plateau_under_doubling(self):
        """Test that doubling j_max at a = 1, beta = 0.5 leaves the value unchanged."""
        slab = Slab(a=1.0, beta=0.5)
        base = thermal_oracle(slab, OracleControl(j_max=1000))
        doubled = thermal_oracle(slab, OracleControl(j_max=2000))
        assert abs(doubled - base) < 1e-12 * abs(base)


class TestZeroPointOracle:
    """Test cases for the cutoff extraction of the zero-point constant."""

    def setup_method(self):
        """Set up controls."""
        self.ctl = OracleControl()

    def test_matches_constant(self):
        """Test the extrapolated limit against 7 pi^2 / (720 a^3)."""
        for a in (1.0, 2.0):
            expected = zero_point_antiperiodic(a)
            assert zero_point_oracle(a, self.ctl) == pytest.approx(expected, abs=1e-6)

    def test_ladder(self):
        """Test that the ladder converges at second order."""
        ladder = zero_point_ladder(1.0, self.ctl)
        assert ladder.rungs == [0.04, 0.02, 0.01]
        assert len(ladder.energies) == 3
        assert abs(ladder.observed_order - 2.0) < 0.05

    def test_cutoff_energy_approaches_constant(self):
        """Test that the subtracted cutoff energy tends to the constant."""
        far = abs(cutoff_energy(1.0, 0.1) - zero_point_antiperiodic(1.0))
        near = abs(cutoff_energy(1.0, 0.01) - zero_point_antiperiodic(1.0))
        assert near < far / 50.0

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_divergent_part(self, a):
        """Test that E(delta) delta^4 tends to 3 a / (2 pi^2)."""
        bulk = 3.0 * a / (2.0 * math.pi**2)
        coarse = abs(raw_cutoff_energy(a, 1e-2) * 1e-2**4 - bulk)
        fine = raw_cutoff_energy(a, 1e-3) * 1e-3**4
        assert fine == pytest.approx(bulk, rel=1e-6)
        assert abs(fine - bulk) < coarse

    def test_non_monotone_ladder(self, monkeypatch):
        """Test that an oscillating ladder raises ExtrapolationError."""
        def oscillating(a, d):
            return math.cos(math.pi * round(math.log2(1.0 / d)))

        monkeypatch.setattr(oracle, "cutoff_energy", oscillating)
        with pytest.raises(ExtrapolationError) as exc_info:
            zero_point_ladder(1.0, self.ctl)
        assert len(exc_info.value.values) == 3

    def test_large_cutoff_warning(self, caplog):
        """Test that a cutoff not small against a is logged."""
        with caplog.at_level(logging.WARNING, logger="tiscasimir.core.oracle"):
            zero_point_oracle(0.3, self.ctl)
        assert "not small" in caplog.text


class TestRichardson:
    """Test cases for richardson_limit."""

    def test_exact_for_even_polynomial(self):
        """Test that c + k h^2 + m h^4 is extrapolated exactly."""

        def value(h):
            return 1.5 + 3.0 * h**2 - 7.0 * h**4

        values = [value(0.1), value(0.05), value(0.025)]
        assert richardson_limit(4.0, values) == pytest.approx(1.5, rel=1e-12)

    def test_empty(self):
        """Test that an empty sequence raises DomainError."""
        with pytest.raises(DomainError):
            richardson_limit(4.0, [])
