"""Shrinking-sphere closed forms and the initial-shape factory."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import quad

from ..errors import BadShapeParameters, InvalidImmersion
from .geometry_utils import AnalyticSphere, Immersion, PlaneCurve, Revolution, unit_sphere_area

logger = logging.getLogger(__name__)

DEFAULT_CURVE_SAMPLES = 256
DEFAULT_PROFILE_SAMPLES = 512
NECK_WIDTH = 0.25


@dataclass(frozen=True)
class SphereSolution:
    """Round sphere of initial radius r0 shrinking under the flow in R^{n+1}."""
    n: int
    r0: float

    def __post_init__(self):
        if self.n < 1 or not self.r0 > 0:
            raise BadShapeParameters(f"need n >= 1 and r0 > 0, got n={self.n}, r0={self.r0}")

    @property
    def T(self) -> float:
        """Singular time r0² / (2n)."""
        return self.r0**2 / (2.0 * self.n)

    def radius(self, t: float) -> float:
        return math.sqrt(self.r0**2 - 2.0 * self.n * t)

    def H(self, t: float) -> float:
        return self.n / self.radius(t)

    def A2(self, t: float) -> float:
        return self.n / self.radius(t) ** 2

    def area(self, t: float) -> float:
        return unit_sphere_area(self.n) * self.radius(t) ** self.n

    def spatial_integral(self, t: float, alpha: float, quantity: str = "H") -> float:
        """∫_M |q|^alpha dμ at time t, from the geometric closed forms."""
        return self.integral_at_radius(self.radius(t), alpha, quantity)

    def integral_at_radius(self, r: float, alpha: float, quantity: str = "H") -> float:
        value = self.n / r if quantity == "H" else math.sqrt(self.n) / r
        return value**alpha * unit_sphere_area(self.n) * r**self.n


def _quantity_factor(n: int, alpha: float, quantity: str) -> float:
    if quantity == "H":
        return 1.0
    if quantity == "A":
        return n ** (-0.5 * alpha)
    raise ValueError(f"unknown quantity {quantity!r}")


def sphere_spacetime_norm(n: int, r0: float, alpha: float, t_end: float, quantity: str = "H") -> float:
    """∫₀^t_end ∫_M |q|^alpha dμ dt on the shrinking sphere, in closed form.

    Returns ``math.inf`` when t_end = T and alpha >= n + 2.
    """
    solution = SphereSolution(n, r0)
    T = solution.T
    if not 0 < t_end <= T:
        raise ValueError(f"t_end must lie in (0, T={T}], got {t_end}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    p = 0.5 * (n - alpha)
    prefactor = n**alpha * unit_sphere_area(n) * (2.0 * n) ** p * _quantity_factor(n, alpha, quantity)
    remaining = T - t_end
    if p <= -1.0 and remaining <= 0.0:
        return math.inf
    if p == -1.0:
        return prefactor * math.log(T / remaining)
    return prefactor * (T ** (p + 1.0) - remaining ** (p + 1.0)) / (p + 1.0)


def sphere_norm_quadrature(n: int, r0: float, alpha: float, t_end: float, quantity: str = "H") -> float:
    """Independent scipy quadrature of the same integral from r(t), H(t) and area(t)."""
    solution = SphereSolution(n, r0)
    T = solution.T
    p = 0.5 * (n - alpha)
    if t_end >= T:
        if p <= -1.0:
            return math.inf
        # algebraic end-point weight (T - t)^p carries the singularity
        def smooth_part(t: float) -> float:
            tau = max(T - t, 1e-200 * T)
            r = math.sqrt(2.0 * n * tau)
            return solution.integral_at_radius(r, alpha, quantity) / tau**p

        value, _ = quad(smooth_part, 0.0, T, weight="alg", wvar=(0.0, p), epsrel=1e-12, limit=200)
        return value
    value, _ = quad(
        lambda t: solution.spatial_integral(t, alpha, quantity),
        0.0, t_end, epsrel=1e-12, epsabs=0.0, limit=200,
    )
    return value


def _positive(params: Dict[str, Any], name: str, default: Optional[float] = None) -> float:
    value = params.get(name, default)
    if value is None:
        raise BadShapeParameters(f"missing shape parameter {name!r}")
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise BadShapeParameters(f"shape parameter {name!r} must be positive, got {value}")
    return value


def _profile(x: np.ndarray, rho: np.ndarray, n: int) -> Revolution:
    rho = np.array(rho, dtype=float)
    rho[0] = rho[-1] = 0.0
    if rho[1:-1].min() <= 0:
        raise BadShapeParameters("profile radius must be positive away from the poles")
    return Revolution(x, rho, n)


def make_initial(kind: str, params: Optional[Dict[str, Any]] = None, m: Optional[int] = None,
                 n: Optional[int] = None) -> Immersion:
    """Build a canonical initial shape.

    Kinds and their parameters: ``circle(r0)``, ``ellipse(a, b)``,
    ``sphere_profile(r0)``, ``dumbbell(neck, bulb)``, ``spheroid(a, b)``,
    ``sphere(r0)``. Profiles and spheres also take n; curves and profiles take m.
    """
    params = dict(params or {})
    if m is None:
        m = params.pop("m", None)
    if n is None:
        n = params.pop("n", None)

    try:
        if kind in ("circle", "ellipse"):
            m = int(m or DEFAULT_CURVE_SAMPLES)
            theta = 2.0 * np.pi * np.arange(m) / m
            if kind == "circle":
                a = b = _positive(params, "r0", 1.0)
            else:
                a, b = _positive(params, "a"), _positive(params, "b")
            return PlaneCurve.from_points(np.column_stack((a * np.cos(theta), b * np.sin(theta))))

        if kind == "sphere":
            return AnalyticSphere(_positive(params, "r0", 1.0), int(n or 2))

        if kind in ("sphere_profile", "spheroid", "dumbbell"):
            m = int(m or DEFAULT_PROFILE_SAMPLES)
            n = int(n or 2)
            u = np.pi * np.arange(m) / (m - 1)
            c, s = np.cos(u), np.sin(u)
            if kind == "sphere_profile":
                r0 = _positive(params, "r0", 1.0)
                return _profile(-r0 * c, r0 * s, n)
            if kind == "spheroid":
                a, b = _positive(params, "a"), _positive(params, "b")
                return _profile(-a * c, b * s, n)

            neck, bulb = _positive(params, "neck"), _positive(params, "bulb")
            if neck >= bulb:
                raise BadShapeParameters(f"dumbbell neck {neck} must be thinner than bulb {bulb}")
            blend = bulb - (bulb - neck) * np.exp(-((c / NECK_WIDTH) ** 2))
            return _profile(-3.0 * bulb * c, s * blend, n)
    except InvalidImmersion as e:
        raise BadShapeParameters(str(e)) from e
    except (TypeError, ValueError) as e:
        raise BadShapeParameters(f"bad parameters for {kind}: {e}") from e

    raise BadShapeParameters(f"unknown shape kind {kind!r}")
