"""Tests for accumulators, hypothesis monitors and blow-up fits."""

import math
from dataclasses import replace

import numpy as np
import pytest

from mcflab.errors import InsufficientSamples, MissingAccumulator
from mcflab.models.base import StopReason
from mcflab.models.config_models import FlowConfig, MonitorSet
from mcflab.utils.flow_utils import run_flow
from mcflab.utils.geometry_utils import AnalyticSphere, compute_geometry
from mcflab.utils.monitor_utils import (
    NormAccumulator,
    build_monitor_report,
    column_name,
    dichotomy_fit,
    estimate_blowup_time,
    holder_bound,
    hypothesis_monitor,
    rescaled_lower_bound,
    spatial_integral,
    update_accumulators,
    widening_fit,
)
from mcflab.utils.oracle_utils import make_initial


class TestAccumulators:
    """Test the running space-time integrals."""

    def test_column_name(self):
        """Test CSV column names drop trailing zeros."""
        assert column_name(("A", 4.0)) == "acc_A_4"
        assert column_name(("H", 2.5)) == "acc_H_2.5"

    def test_update_adds_weighted_integral(self):
        """Test one update adds dt times the spatial integral."""
        frame = compute_geometry(AnalyticSphere(1.0, 2))
        acc = update_accumulators(NormAccumulator.empty([("H", 2.0)]), frame, 0.01)
        assert acc.value("H", 2.0) == pytest.approx(0.01 * 16 * math.pi, rel=1e-14)
        assert acc.snapshots[("H", 2.0)] == pytest.approx(math.sqrt(16 * math.pi), rel=1e-14)

    def test_zero_dt_unchanged(self):
        """Test dt = 0 leaves the accumulator untouched."""
        frame = compute_geometry(AnalyticSphere(1.0, 2))
        acc = NormAccumulator.empty([("A", 3.0)])
        assert update_accumulators(acc, frame, 0.0) is acc

    def test_negative_dt_rejected(self):
        """Test a negative time weight is an error."""
        frame = compute_geometry(AnalyticSphere(1.0, 2))
        with pytest.raises(ValueError):
            update_accumulators(NormAccumulator.empty([("A", 3.0)]), frame, -1.0)

    def test_missing_pair(self):
        """Test asking for an unregistered pair raises."""
        with pytest.raises(MissingAccumulator):
            NormAccumulator.empty([("A", 2.0)]).value("H", 2.0)

    def test_spatial_integral_sphere(self):
        """Test ∫|A|^n dμ on a round sphere is n^{n/2}|S^n| for any radius."""
        for radius in (0.1, 1.0, 7.0):
            frame = compute_geometry(AnalyticSphere(radius, 2))
            assert spatial_integral(frame, "A", 2.0) == pytest.approx(2 * 4 * math.pi, rel=1e-12)


class TestHypothesisMonitor:
    """Test per-frame hypothesis diagnostics."""

    def test_sphere(self):
        """Test min κ = 1/r and pinching 1/n on a round sphere."""
        row = hypothesis_monitor(compute_geometry(AnalyticSphere(2.0, 3)))
        assert row.min_kappa == pytest.approx(0.5, rel=1e-15)
        assert row.max_pinching == pytest.approx(1.0 / 3.0, rel=1e-14)
        assert row.violations == []

    def test_ellipse(self, ellipse):
        """Test min κ = b/a² = 0.25 on the ellipse."""
        row = hypothesis_monitor(compute_geometry(ellipse))
        assert row.min_kappa == pytest.approx(0.25, abs=1e-2)

    def test_dumbbell_saddle_neck(self):
        """Test the dumbbell neck has negative axial curvature."""
        dumbbell = make_initial("dumbbell", {"neck": 0.2, "bulb": 1.0}, m=512, n=2)
        row = hypothesis_monitor(compute_geometry(dumbbell), c_bound=0.1)
        assert row.min_kappa < 0
        assert "kappa_below_bound" in row.violations

    def test_shifted_trace(self):
        """Test κ_i <= H + (n - 1)C when the lower bound holds."""
        row = hypothesis_monitor(compute_geometry(AnalyticSphere(1.0, 3)), c_bound=0.0)
        assert row.shifted_excess <= 0
        profile = make_initial("spheroid", {"a": 1.5, "b": 1.0}, m=128, n=2)
        row = hypothesis_monitor(compute_geometry(profile), c_bound=1.0)
        assert row.shifted_excess <= 0

    def test_pinching_only_when_mean_convex(self):
        """Test no pinching ratio is reported when H is not positive."""
        dumbbell = make_initial("dumbbell", {"neck": 0.2, "bulb": 1.0}, m=512, n=2)
        row = hypothesis_monitor(compute_geometry(dumbbell))
        assert (row.max_pinching is None) == (row.min_H <= 0)

    def test_rescaled_lower_bound(self):
        """Test -C becomes -C / sqrt(Q) after zooming."""
        assert rescaled_lower_bound(2.0, 4.0) == -1.0
        with pytest.raises(ValueError):
            rescaled_lower_bound(1.0, 0.0)

    @pytest.mark.parametrize("kind,params,n", [
        ("circle", {"r0": 1.0}, None),
        ("ellipse", {"a": 1.5, "b": 1.0}, None),
        ("ellipse", {"a": 2.0, "b": 1.0}, None),
        ("spheroid", {"a": 1.5, "b": 1.0}, 2),
    ])
    def test_pinching_monotone(self, kind, params, n):
        """Test max |A|²/H² does not increase along convex flows."""
        traj = run_flow(make_initial(kind, params, m=64, n=n), FlowConfig(t_cap=0.05))
        ratios = [row.max_pinching for row in traj.monitor_rows]
        assert all(r is not None for r in ratios)
        assert all(b <= a + 1e-6 for a, b in zip(ratios, ratios[1:]))

    @pytest.mark.slow
    @pytest.mark.parametrize("kind,params,n", [
        ("ellipse", {"a": 2.0, "b": 1.0}, None),
        ("spheroid", {"a": 1.5, "b": 1.0}, 2),
    ])
    def test_pinching_monotone_fine(self, kind, params, n):
        """Test max |A|²/H² does not increase at 512 samples."""
        initial = make_initial(kind, params, m=512, n=n)
        traj = run_flow(initial, FlowConfig(t_cap=0.05, record_stride=10))
        ratios = [row.max_pinching for row in traj.monitor_rows]
        assert all(r is not None for r in ratios)
        assert all(b <= a + 1e-6 for a, b in zip(ratios, ratios[1:]))


class TestBlowupFits:
    """Test blow-up time estimates and the integrability dichotomy."""

    def test_oracle_blowup_time(self, sphere_blowup):
        """Test the sphere oracle supplies T = 1/(2n)."""
        t_est, source = estimate_blowup_time(sphere_blowup(2))
        assert source == "oracle"
        assert t_est == 0.25

    def test_extrapolated_blowup_time(self, sphere_blowup, unit_circle):
        """Test the 1/(T - t) ansatz recovers T from the records alone."""
        traj = replace(sphere_blowup(2), initial=unit_circle)
        t_est, source = estimate_blowup_time(traj)
        assert source == "extrapolated"
        assert t_est == pytest.approx(0.25, rel=1e-6)

    def test_finite_side(self, sphere_blowup):
        """Test n = 1, α = 2 extrapolates to 2π within 1%."""
        fit = dichotomy_fit(sphere_blowup(1), "H", 2.0)
        assert fit.kind == "finite"
        assert fit.fitted_exponent == pytest.approx(-0.5, abs=0.02)
        assert fit.finite_estimate == pytest.approx(2 * math.pi, rel=1e-2)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_logarithmic_side(self, sphere_blowup, n):
        """Test α = n + 2 gives rate exponent -1 and logarithmic growth."""
        fit = dichotomy_fit(sphere_blowup(n), "H", float(n + 2))
        assert fit.kind == "logarithmic"
        assert fit.fitted_exponent == pytest.approx(-1.0, abs=0.05)
        assert fit.rate_monotone

    def test_critical_a_norm(self, sphere_blowup):
        """Test the |A| accumulator diverges at α = n + 2 on the 2-sphere."""
        fit = dichotomy_fit(sphere_blowup(2), "A", 4.0)
        assert fit.kind == "logarithmic"

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_power_side(self, sphere_blowup, n):
        """Test α = n + 3 diverges with exponent (α - n)/2 - 1 = 0.5."""
        fit = dichotomy_fit(sphere_blowup(n), "H", float(n + 3))
        assert fit.kind == "power"
        assert fit.divergence_exponent == pytest.approx(0.5, abs=0.05)

    @pytest.mark.parametrize("alpha_offset", [0, 1, 2, 3])
    def test_scaling_exponent(self, sphere_blowup, alpha_offset):
        """Test the spatial integrand scales like (T - t)^{(n - α)/2}."""
        n = 2
        alpha = float(n + alpha_offset)
        fit = dichotomy_fit(sphere_blowup(n), "H", alpha)
        assert fit.fitted_exponent == pytest.approx(fit.expected_exponent, abs=0.02)

    def test_widening(self):
        """Test coarse steps force the fit to widen past one decade."""
        monitors = MonitorSet(quantities=["H"], alphas=[3.0])
        traj = run_flow(AnalyticSphere(1.0, 1), FlowConfig(t_cap=0.5, c_stab=0.2), monitors)
        with pytest.raises(InsufficientSamples):
            dichotomy_fit(traj, "H", 3.0)
        fit = widening_fit(traj, "H", 3.0)
        assert fit.decades >= 2.0
        assert fit.widened
        assert fit.fitted_exponent == pytest.approx(-1.0, abs=0.05)

    def test_requires_blowup(self):
        """Test a smooth run cannot be fitted."""
        traj = run_flow(AnalyticSphere(1.0, 2), FlowConfig(t_cap=0.1), MonitorSet(alphas=[4.0]))
        with pytest.raises(InsufficientSamples):
            dichotomy_fit(traj, "H", 4.0)

    def test_unregistered_pair(self, sphere_blowup):
        """Test fitting an untracked exponent raises."""
        with pytest.raises(MissingAccumulator):
            dichotomy_fit(sphere_blowup(2), "H", 7.5)


class TestHolderBound:
    """Test the Hölder reduction to the critical exponent."""

    def test_critical_norm_bounded(self):
        """Test ‖H‖_{n+2} <= ‖H‖_α V^{1/(n+2) - 1/α} for α > n + 2."""
        monitors = MonitorSet(quantities=["H"], alphas=[4.0, 5.0, 6.0])
        traj = run_flow(AnalyticSphere(1.0, 2), FlowConfig(t_cap=0.2), monitors)
        for alpha in (5.0, 6.0):
            low, high = holder_bound(traj, "H", alpha, 4.0)
            assert low <= high * (1 + 1e-12)

    def test_exponent_order(self, sphere_blowup):
        """Test the critical exponent may not exceed alpha."""
        with pytest.raises(ValueError):
            holder_bound(sphere_blowup(2), "H", 3.0, 4.0)

    def test_report_checks(self, sphere_blowup):
        """Test the report checks every exponent above n + 2 against the critical one."""
        report = build_monitor_report(sphere_blowup(2))
        assert {(c.quantity, c.alpha) for c in report.holder} == {("A", 5.0), ("H", 5.0)}
        for check in report.holder:
            assert check.critical == 4.0
            assert check.holds
            assert check.critical_norm <= check.bound * (1 + 1e-12)

    def test_no_checks_below_critical(self, sphere_blowup):
        """Test runs without exponents above n + 2 report no checks."""
        assert build_monitor_report(sphere_blowup(2, alphas=(2.0, 3.0, 4.0))).holder == []


class TestMonitorReport:
    """Test the assembled monitor report."""

    def test_blowup_report(self, sphere_blowup):
        """Test the report lists fits at the critical exponent."""
        report = build_monitor_report(sphere_blowup(2), c_bound=1.0)
        assert report.stop_reason is StopReason.CURVATURE_BLOWUP
        assert report.tightest_c == 0.0
        assert {(f.quantity, f.alpha) for f in report.dichotomy} == {("A", 4.0), ("H", 4.0)}
        assert report.rescaled_lower_bound < 0
        assert abs(report.rescaled_lower_bound) < 1e-3
        assert report.events == []
        assert len(report.accumulators) == 8
        assert all(entry.snapshot is not None for entry in report.accumulators)

    def test_kappa_event(self):
        """Test crossing below -C is reported as an event."""
        dumbbell = make_initial("dumbbell", {"neck": 0.2, "bulb": 1.0}, m=128, n=2)
        traj = run_flow(dumbbell, FlowConfig(t_cap=1e-4), MonitorSet(alphas=[2.0], C_bound=0.1))
        report = build_monitor_report(traj)
        assert report.c_bound == 0.1
        assert report.events[0].kind == "kappa_below_bound"
        assert report.events[0].step == 0
        assert report.tightest_c > 0.1
        assert np.isfinite(report.rows[0].shifted_excess)
