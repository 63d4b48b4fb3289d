"""Tests for the shrinking-sphere closed forms and the shape factory."""

import math

import numpy as np
import pytest

from mcflab.errors import BadShapeParameters
from mcflab.utils.geometry_utils import AnalyticSphere, PlaneCurve, Revolution
from mcflab.utils.oracle_utils import (
    SphereSolution,
    make_initial,
    sphere_norm_quadrature,
    sphere_spacetime_norm,
)


class TestSphereSolution:
    """Test the round shrinking sphere."""

    def test_singular_time(self):
        """Test T = r0² / (2n)."""
        assert SphereSolution(2, 1.0).T == 0.25
        assert SphereSolution(3, 2.0).T == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_radius_law(self):
        """Test r(t)² = r0² - 2nt."""
        solution = SphereSolution(2, 1.0)
        assert solution.radius(0.125) == pytest.approx(math.sqrt(0.5), rel=1e-15)
        assert solution.H(0.125) == pytest.approx(2.0 / math.sqrt(0.5), rel=1e-15)
        assert solution.A2(0.125) == pytest.approx(4.0, rel=1e-14)

    def test_radius_derivative(self):
        """Test dr/dt = -n / r = -H(t)."""
        solution = SphereSolution(3, 1.0)
        t, h = 0.1, 1e-6
        derivative = (solution.radius(t + h) - solution.radius(t - h)) / (2 * h)
        assert derivative == pytest.approx(-solution.H(t), rel=1e-6)

    def test_area(self):
        """Test the area of the unit 2-sphere at t = 0."""
        assert SphereSolution(2, 1.0).area(0.0) == pytest.approx(4 * math.pi, rel=1e-15)

    @pytest.mark.parametrize("n,r0", [(0, 1.0), (2, 0.0), (2, -1.0)])
    def test_invalid(self, n, r0):
        """Test n >= 1 and r0 > 0 are required."""
        with pytest.raises(BadShapeParameters):
            SphereSolution(n, r0)


class TestSpacetimeNorm:
    """Test the closed-form space-time integrals."""

    def test_circle_finite_limit(self):
        """Test ∫∫κ² ds dt over the whole circle flow is 2π."""
        assert sphere_spacetime_norm(1, 1.0, 2.0, 0.5) == pytest.approx(2 * math.pi, rel=1e-14)

    def test_sphere_h_squared(self):
        """Test ∫∫H² dμ dt to the singular time is 4π for the unit 2-sphere."""
        assert sphere_spacetime_norm(2, 1.0, 2.0, 0.25) == pytest.approx(4 * math.pi, rel=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("offset", [0.0, 1.0])
    def test_divergent_at_singular_time(self, n, offset):
        """Test α >= n + 2 diverges at t = T."""
        T = SphereSolution(n, 1.0).T
        assert math.isinf(sphere_spacetime_norm(n, 1.0, n + 2 + offset, T))
        assert math.isinf(sphere_norm_quadrature(n, 1.0, n + 2 + offset, T))

    def test_logarithmic_growth(self):
        """Test the critical integral grows like log(T / (T - t))."""
        value = sphere_spacetime_norm(2, 1.0, 4.0, 0.2)
        prefactor = sphere_spacetime_norm(2, 1.0, 4.0, 0.125) / math.log(2.0)
        assert value == pytest.approx(prefactor * math.log(5.0), rel=1e-13)

    def test_a_quantity_factor(self):
        """Test |A| = H / sqrt(n) on the sphere."""
        h = sphere_spacetime_norm(3, 1.0, 4.0, 0.1, "H")
        a = sphere_spacetime_norm(3, 1.0, 4.0, 0.1, "A")
        assert a == pytest.approx(3.0**-2 * h, rel=1e-14)

    @pytest.mark.parametrize("n,alpha,t_end", [
        (2, 3.0, 0.25),
        (2, 4.0, 0.2),
        (3, 2.5, 1.0 / 6.0),
        (1, 6.0, 0.3),
    ])
    def test_quadrature_agrees(self, n, alpha, t_end):
        """Test the closed form against independent quadrature."""
        exact = sphere_spacetime_norm(n, 1.0, alpha, t_end)
        assert sphere_norm_quadrature(n, 1.0, alpha, t_end) == pytest.approx(exact, rel=1e-8)

    @pytest.mark.parametrize("t_end", [0.0, -0.1, 0.3])
    def test_t_end_range(self, t_end):
        """Test t_end must lie in (0, T]."""
        with pytest.raises(ValueError):
            sphere_spacetime_norm(2, 1.0, 2.0, t_end)

    def test_alpha_positive(self):
        """Test alpha must be positive."""
        with pytest.raises(ValueError):
            sphere_spacetime_norm(2, 1.0, 0.0, 0.1)


class TestMakeInitial:
    """Test the initial-shape factory."""

    def test_kinds(self):
        """Test every kind builds its representation."""
        assert isinstance(make_initial("circle", {"r0": 2.0}, m=32), PlaneCurve)
        assert isinstance(make_initial("ellipse", {"a": 2.0, "b": 1.0}, m=32), PlaneCurve)
        assert isinstance(make_initial("sphere_profile", {}, m=32, n=3), Revolution)
        assert isinstance(make_initial("spheroid", {"a": 1.0, "b": 2.0}, m=32), Revolution)
        sphere = make_initial("sphere", {"r0": 3.0}, n=4)
        assert isinstance(sphere, AnalyticSphere)
        assert (sphere.radius, sphere.n) == (3.0, 4)

    def test_sizes_from_params(self):
        """Test m and n may be given inside params."""
        profile = make_initial("sphere_profile", {"r0": 1.0, "m": 40, "n": 3})
        assert profile.m == 40
        assert profile.n == 3

    def test_dumbbell_neck(self):
        """Test the dumbbell is thinnest at its middle."""
        dumbbell = make_initial("dumbbell", {"neck": 0.2, "bulb": 1.0}, m=513, n=2)
        rho = np.asarray(dumbbell.rho)
        assert rho[256] == pytest.approx(0.2, rel=1e-12)
        assert rho.max() > 0.8
        assert rho[0] == rho[-1] == 0.0

    def test_dumbbell_neck_thinner_than_bulb(self):
        """Test the neck must be thinner than the bulbs."""
        with pytest.raises(BadShapeParameters):
            make_initial("dumbbell", {"neck": 1.0, "bulb": 1.0}, m=64, n=2)

    @pytest.mark.parametrize("kind,params", [
        ("ellipse", {"a": 1.0}),
        ("circle", {"r0": -1.0}),
        ("circle", {"r0": float("nan")}),
        ("spheroid", {"a": 1.0, "b": "wide"}),
        ("torus", {}),
    ])
    def test_bad_parameters(self, kind, params):
        """Test missing, non-positive and unknown inputs."""
        with pytest.raises(BadShapeParameters):
            make_initial(kind, params, m=32)

    def test_too_few_samples(self):
        """Test invalid immersions surface as shape errors."""
        with pytest.raises(BadShapeParameters):
            make_initial("circle", {"r0": 1.0}, m=4)
