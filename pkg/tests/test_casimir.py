"""
Tests for the free-energy routes, inversion relations and asymptotics.
"""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiscasimir.core import casimir, lattice
from tiscasimir.core.casimir import (
    ModeSpectrum,
    Relation,
    Route,
    Slab,
    breakdown_summary,
    compare_routes,
    constant_discrepancy,
    f1,
    f2,
    fit_high_temperature,
    free_energy_antiperiodic,
    free_energy_periodic,
    high_temperature_expansion,
    low_temperature_correction,
    thermal_part,
    tis_check,
    zero_point_antiperiodic,
    zero_point_as_printed,
)
from tiscasimir.core.exceptions import DomainError, RouteDisagreementError
from tiscasimir.core.lattice import ZETA3, LatticeValue, SumControl

E0_UNIT = 7.0 * math.pi**2 / 720.0


class TestSlab:
    """Test cases for Slab and ModeSpectrum."""

    def test_reduced_temperature(self):
        """Test xi = a / (pi beta) and the alternative constructors."""
        slab = Slab(a=2.0, beta=0.5)
        assert slab.xi() == pytest.approx(4.0 / math.pi)
        assert Slab.from_xi(2.0, slab.xi()).beta == pytest.approx(0.5, rel=1e-15)
        assert Slab.from_temperature(2.0, 2.0) == slab

    @pytest.mark.parametrize(
        "a, beta, field", [(0.0, 1.0, "a"), (1.0, -1.0, "beta"), (math.inf, 1.0, "a")]
    )
    def test_invalid(self, a, beta, field):
        """Test that invalid geometry names the offending field."""
        with pytest.raises(DomainError) as exc_info:
            Slab(a=a, beta=beta)
        assert exc_info.value.field == field
        assert field in str(exc_info.value)

    def test_spectrum(self):
        """Test spatial modes, Matsubara frequencies and eigenvalues."""
        spectrum = ModeSpectrum.of(Slab(a=1.0, beta=2.0))
        assert np.allclose(spectrum.spatial_modes(3), [math.pi, 3.0 * math.pi, 5.0 * math.pi])
        assert np.allclose(spectrum.matsubara(np.array([0, 1])), [0.0, math.pi])
        assert spectrum.eigenvalue(1.0, 2, 1) == pytest.approx(math.pi**2 + 9.0 * math.pi**2 + 1.0)
        with pytest.raises(DomainError):
            spectrum.eigenvalue(0.0, 0, 0)


class TestZeroPoint:
    """Test cases for the zero-temperature constant."""

    def test_value(self):
        """Test E0 = 7 pi^2 / (720 a^3)."""
        assert zero_point_antiperiodic(1.0) == pytest.approx(7.0 * math.pi**2 / 720.0, rel=1e-14)
        assert zero_point_antiperiodic(1.0) == pytest.approx(0.0959544872, abs=1e-10)
        assert zero_point_antiperiodic(2.0) == pytest.approx(E0_UNIT / 8.0, rel=1e-15)

    def test_printed_constant(self):
        """Test that the misprinted constant differs by a factor of pi."""
        corrected, printed, ratio = constant_discrepancy(1.0)
        assert printed == zero_point_as_printed(1.0)
        assert corrected == pytest.approx(printed * math.pi, rel=1e-15)
        assert ratio == pytest.approx(math.pi, rel=1e-15)

    def test_low_temperature_limit(self):
        """Test that every lattice route reaches E0 as xi -> 0."""
        slab = Slab.from_xi(1.0, 1e-4)
        for route in (Route.DECOMPOSITION, Route.F_SERIES):
            result = free_energy_antiperiodic(slab, route, SumControl())
            assert result.total == pytest.approx(E0_UNIT, abs=1e-8)
            assert result.e0 == zero_point_antiperiodic(1.0)


class TestRoutes:
    """Test cases for the three free-energy routes."""

    def setup_method(self):
        """Set up the truncation policy."""
        self.ctl = SumControl(rel_tol=1e-12)

    @pytest.mark.parametrize("xi", [0.05, 0.3, 1.0, 4.0, 20.0])
    def test_lattice_routes_agree(self, xi):
        """Test decomposition against the thermal series."""
        slab = Slab.from_xi(1.0, xi)
        decomposition = free_energy_antiperiodic(slab, Route.DECOMPOSITION, self.ctl)
        series = free_energy_antiperiodic(slab, Route.F_SERIES, self.ctl)
        assert series.total == pytest.approx(decomposition.total, rel=1e-10)
        assert series.thermal == pytest.approx(decomposition.thermal, rel=1e-8, abs=1e-14)

    @pytest.mark.parametrize("a, beta", [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (0.5, 3.0)])
    def test_zeta_route(self, a, beta):
        """Test the spectral zeta route against the lattice routes."""
        slab = Slab(a=a, beta=beta)
        zeta = free_energy_antiperiodic(slab, Route.ZETA, self.ctl)
        series = free_energy_antiperiodic(slab, Route.F_SERIES, self.ctl)
        assert zeta.total == pytest.approx(series.total, rel=1e-7)
        assert zeta.f1 == pytest.approx(series.f1, rel=1e-7)
        assert zeta.f2 == pytest.approx(series.f2, rel=1e-7)
        assert zeta.route is Route.ZETA

    def test_compare_routes(self):
        """Test that all three routes are returned and agree."""
        results = compare_routes(Slab(a=1.0, beta=1.0), list(Route), self.ctl)
        assert list(results) == [Route.DECOMPOSITION, Route.F_SERIES, Route.ZETA]
        totals = [r.total for r in results.values()]
        assert max(totals) - min(totals) <= 1e-7 * abs(totals[0])

    def test_decomposition_into_periodic_fields(self):
        """Test F(a) = F_per(2a) - F_per(a)."""
        for a, beta in [(1.0, 1.0), (0.5, 0.2), (3.0, 1.5)]:
            slab = Slab(a=a, beta=beta)
            total = free_energy_antiperiodic(slab, Route.F_SERIES, self.ctl).total
            doubled = free_energy_periodic(Slab(a=2.0 * a, beta=beta), self.ctl)
            periodic = doubled - free_energy_periodic(slab, self.ctl)
            assert total == pytest.approx(periodic, rel=1e-11)
            assert f1(slab, self.ctl) - f2(slab, self.ctl) == pytest.approx(total, rel=1e-11)

    def test_thermal_monotone(self):
        """Test that the thermal part is negative and decreases with temperature."""
        grid = np.geomspace(0.05, 20.0, 25)
        values = [thermal_part(Slab.from_xi(1.0, float(xi)), self.ctl) for xi in grid]
        assert all(v < 0.0 for v in values)
        assert all(later < earlier for earlier, later in zip(values, values[1:]))

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=0.05, max_value=10.0), st.floats(min_value=0.2, max_value=5.0))
    def test_scaling(self, xi, a):
        """Test that a^3 F depends on xi only."""
        reference = free_energy_antiperiodic(Slab.from_xi(1.0, xi), Route.F_SERIES, self.ctl).total
        scaled = free_energy_antiperiodic(Slab.from_xi(a, xi), Route.F_SERIES, self.ctl).total
        assert scaled * a**3 == pytest.approx(reference, rel=1e-11)

    def test_summary_columns(self):
        """Test the flat output mapping."""
        result = free_energy_antiperiodic(Slab(a=1.0, beta=1.0), Route.DECOMPOSITION, self.ctl)
        summary = breakdown_summary(result)
        assert list(summary) == [
            "xi",
            "a",
            "beta",
            "e0",
            "f1",
            "f2",
            "thermal",
            "total",
            "route",
            "est_error",
        ]
        assert summary["route"] == "decomposition"
        assert summary["total"] == result.e0 + result.thermal


class TestInversionSymmetry:
    """Test cases for the temperature inversion relations."""

    def setup_method(self):
        """Set up the truncation policy."""
        self.ctl = SumControl(rel_tol=1e-12)
        self.grid = [float(x) for x in np.geomspace(0.02, 50.0, 15)]

    @pytest.mark.parametrize("relation", [Relation.F1_RELATION, Relation.F2_RELATION_CORRECTED])
    def test_relations_hold(self, relation):
        """Test the F1 and corrected F2 relations."""
        for xi in self.grid:
            assert tis_check(relation, xi, self.ctl).rel_residual <= 1e-10

    def test_fixed_points(self):
        """Test that fixed points are flagged and exact."""
        fixed = {
            Relation.F1_RELATION: 1.0 / (2.0 * math.pi),
            Relation.F2_RELATION_CORRECTED: 1.0 / math.pi,
            Relation.G_REFLECTION: 1.0,
        }
        for relation, xi in fixed.items():
            report = tis_check(relation, xi, self.ctl)
            assert report.fixed_point
            assert report.abs_residual == 0.0

    def test_printed_relation_fails(self):
        """Test that F1 on the right-hand side of the F2 relation does not hold."""
        report = tis_check(Relation.F2_RELATION_AS_PRINTED, 1.0, self.ctl)
        assert report.rel_residual > 1e-3
        assert report.relation is Relation.F2_RELATION_AS_PRINTED

    def test_kernel_reflection(self):
        """Test the g reflection with the argument read as eta."""
        report = tis_check(Relation.G_REFLECTION, 3.0, self.ctl)
        assert report.rel_residual <= 1e-11
        assert not report.fixed_point

    def test_detects_wrong_remainder(self, monkeypatch):
        """Test that the relations fail when the remainder sum is wrong."""
        original = lattice.g_remainder

        def skewed(eta, ctl):
            value = original(eta, ctl)
            return LatticeValue(1.001 * value.value, value.est_error, value.terms_used)

        monkeypatch.setattr(lattice, "g_remainder", skewed)
        for relation in (Relation.F1_RELATION, Relation.F2_RELATION_CORRECTED):
            assert tis_check(relation, 0.05, self.ctl).rel_residual > 1e-5
        assert tis_check(Relation.G_REFLECTION, 0.3, self.ctl).rel_residual > 1e-5

    def test_invalid_argument(self):
        """Test that xi <= 0 raises DomainError."""
        with pytest.raises(DomainError):
            tis_check(Relation.F1_RELATION, 0.0, self.ctl)


class TestAsymptotics:
    """Test cases for the high- and low-temperature regimes."""

    def setup_method(self):
        """Set up the truncation policy."""
        self.ctl = SumControl(rel_tol=1e-12)

    def test_high_temperature_terms(self):
        """Test the three-term expansion at aT = 30."""
        slab = Slab.from_temperature(1.0, 30.0)
        terms = dict(high_temperature_expansion(slab))
        assert list(terms) == ["stefan_boltzmann", "linear", "constant"]
        assert terms["stefan_boltzmann"] == pytest.approx(-math.pi**2 * 30.0**4 / 90.0, rel=1e-14)
        assert terms["constant"] == 0.0
        full = free_energy_antiperiodic(slab, Route.F_SERIES, self.ctl).total
        assert math.fsum(terms.values()) == pytest.approx(full, rel=1e-6)

    def test_fit(self):
        """Test fitted coefficients against the Stefan-Boltzmann and linear terms."""
        fit = fit_high_temperature(1.0, np.linspace(20.0, 50.0, 7), self.ctl)
        assert fit.c4 == pytest.approx(-math.pi**2 / 90.0, rel=1e-3)
        assert fit.c1 == pytest.approx(3.0 * ZETA3 / (8.0 * math.pi), rel=1e-2)
        assert fit.max_rel_residual < 1e-8

    def test_fit_needs_three_points(self):
        """Test that fewer than three temperatures raise DomainError."""
        with pytest.raises(DomainError):
            fit_high_temperature(1.0, [10.0, 20.0], self.ctl)

    @pytest.mark.parametrize("xi", [0.05, 0.1, 0.15])
    def test_low_temperature_correction(self, xi):
        """Test that the transported high-temperature remainder is the thermal part."""
        slab = Slab.from_xi(1.0, xi)
        assert low_temperature_correction(slab, self.ctl) == pytest.approx(
            thermal_part(slab, self.ctl), rel=1e-9
        )

    def test_low_temperature_detects_wrong_remainder(self, monkeypatch):
        """Test that a corrupted remainder sum is caught by the mode-sum comparison."""
        original = casimir.g_remainder

        def skewed(eta, ctl):
            value = original(eta, ctl)
            return LatticeValue(1.001 * value.value, value.est_error, value.terms_used)

        monkeypatch.setattr(casimir, "g_remainder", skewed)
        with pytest.raises(RouteDisagreementError):
            low_temperature_correction(Slab.from_xi(1.0, 0.1), self.ctl)

    def test_low_temperature_regime_warning(self, caplog):
        """Test that use above the low-temperature regime is logged."""
        with caplog.at_level(logging.WARNING, logger="tiscasimir.core.casimir"):
            low_temperature_correction(Slab.from_xi(1.0, 0.5), self.ctl)
        assert "low_temperature_correction" in caplog.text
