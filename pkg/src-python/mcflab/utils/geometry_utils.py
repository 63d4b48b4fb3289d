"""Closed hypersurface representations and their discrete geometry.

Three representations are supported:

* ``PlaneCurve``: a closed polygon in R², the n = 1 case.
* ``Revolution``: a hypersurface of revolution in R^{n+1}, stored as its meridian
  curve (x_j, rho_j) sampled on a uniform parameter grid u_j = pi j / (m - 1) with
  both endpoints on the axis.
* ``AnalyticSphere``: a round sphere of radius r, evaluated in closed form.

Orientation: nu is the outward unit normal, so convex shapes have H > 0 and the
flow velocity is -H nu.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import gamma

from ..errors import DegenerateGeometry, InvalidImmersion, LengthMismatch, UnsupportedRepresentation

logger = logging.getLogger(__name__)

SEGMENT_FLOOR = 1e-14
RADIUS_FLOOR = 1e-12

CURVE = "curve"
REVOLUTION = "revolution"
SPHERE = "sphere"


@lru_cache(maxsize=None)
def unit_sphere_area(n: int) -> float:
    """|S^n|, the area of the unit n-sphere in R^{n+1}."""
    return float(2.0 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2))


@lru_cache(maxsize=None)
def unit_ball_volume(k: int) -> float:
    """Volume of the unit ball in R^k."""
    return float(math.pi ** (k / 2) / gamma(k / 2 + 1))


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Closed polygon, counter-clockwise, at least 8 vertices."""
    points: np.ndarray
    n: int = field(default=1, init=False)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidImmersion(f"plane curve needs an (m, 2) array, got shape {points.shape}")
        if points.shape[0] < 8:
            raise InvalidImmersion(f"plane curve needs at least 8 vertices, got {points.shape[0]}")
        if not np.all(np.isfinite(points)):
            raise InvalidImmersion("plane curve has non-finite coordinates")
        object.__setattr__(self, "points", _frozen(points))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @classmethod
    def from_points(cls, points) -> "PlaneCurve":
        """Validate a user polygon and orient it counter-clockwise."""
        points = np.asarray(points, dtype=float)
        curve = cls(points)
        edges = np.roll(curve.points, -1, axis=0) - curve.points
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if lengths.min() <= SEGMENT_FLOOR:
            raise InvalidImmersion("plane curve has repeated consecutive vertices")
        unit = edges / lengths[:, None]
        turn = np.einsum("ij,ij->i", unit, np.roll(unit, -1, axis=0))
        if turn.min() <= -1.0 + 1e-12:
            raise InvalidImmersion("plane curve folds back onto itself")
        if signed_area(curve.points) < 0:
            return cls(curve.points[::-1])
        return curve


@dataclass(frozen=True, eq=False)
class Revolution:
    """Hypersurface of revolution about the x axis, given by its meridian."""
    x: np.ndarray
    rho: np.ndarray
    n: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if x.ndim != 1 or x.shape != rho.shape:
            raise InvalidImmersion("profile arrays must be 1-D and of equal length")
        if self.n < 2:
            raise InvalidImmersion(f"revolution needs n >= 2, got {self.n}")
        if x.size < 16:
            raise InvalidImmersion(f"profile needs at least 16 samples, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(rho))):
            raise InvalidImmersion("profile has non-finite coordinates")
        if rho[0] != 0.0 or rho[-1] != 0.0:
            raise InvalidImmersion("profile must start and end on the axis")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "rho", _frozen(rho))

    @property
    def m(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class AnalyticSphere:
    """Round sphere of radius ``radius`` in R^{n+1}."""
    radius: float
    n: int

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidImmersion(f"sphere radius must be positive, got {self.radius}")
        if self.n < 1:
            raise InvalidImmersion(f"sphere dimension must be >= 1, got {self.n}")

    @property
    def m(self) -> int:
        return 1


Immersion = Union[PlaneCurve, Revolution, AnalyticSphere]


@dataclass(frozen=True, eq=False)
class GeometryFrame:
    """Per-sample geometry of an immersion at time t.

    ``kappa`` holds the distinct principal curvatures per sample (one column for
    curves, axial and rotational columns for revolutions, one for spheres) and
    ``multiplicity`` how often each column repeats among the n principal values.
    ``g`` holds the matching metric components in the same layout.
    """
    kind: str
    n: int
    t: float
    g: np.ndarray
    kappa: np.ndarray
    multiplicity: Tuple[int, ...]
    H: np.ndarray
    A2: np.ndarray
    nu: np.ndarray
    tangent: np.ndarray
    dmu: np.ndarray
    seg: np.ndarray
    du: float
    h_min: float
    rho: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.H.size

    @cached_property
    def area(self) -> float:
        return float(self.dmu.sum())

    @cached_property
    def max_A2(self) -> float:
        return float(self.A2.max())

    @cached_property
    def max_H2(self) -> float:
        return float(np.max(self.H * self.H))

    @cached_property
    def min_kappa(self) -> float:
        return float(self.kappa.min())

    @cached_property
    def min_H(self) -> float:
        return float(self.H.min())

    def principal_curvatures(self) -> np.ndarray:
        """All n principal curvatures per sample, shape (m, n)."""
        return np.repeat(self.kappa, self.multiplicity, axis=1)


def signed_area(points: np.ndarray) -> float:
    """Shoelace area of a closed polygon (positive when counter-clockwise)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def compute_geometry(imm: Immersion, t: float = 0.0) -> GeometryFrame:
    """Evaluate metric, normal, curvatures and area weights of an immersion."""
    if isinstance(imm, PlaneCurve):
        return _curve_frame(imm, t)
    if isinstance(imm, Revolution):
        return _revolution_frame(imm, t)
    if isinstance(imm, AnalyticSphere):
        return _sphere_frame(imm, t)
    raise UnsupportedRepresentation(f"no geometry for {type(imm).__name__}")


def _curve_frame(curve: PlaneCurve, t: float) -> GeometryFrame:
    # points are C-contiguous (m, 2), so they view as m complex numbers x + iy
    z = curve.points.view(np.complex128)[:, 0]
    m = z.size
    du = 2.0 * np.pi / m

    padded = np.concatenate((z[-1:], z, z[:1]))
    forward, backward = padded[2:], padded[:-2]
    seg = np.abs(forward - z)
    h_min = float(seg.min())
    if h_min < SEGMENT_FLOOR:
        raise DegenerateGeometry(f"segment length {h_min:.3e} below floor")

    # undivided differences: d1 = 2 du z_u, d2 = du² z_uu
    d1 = forward - backward
    d2 = forward + backward - 2.0 * z
    chord = np.abs(d1)
    kappa = 4.0 * (d1.conj() * d2).imag / chord**3

    tangent = d1 / chord
    nu = tangent * -1j
    speed = chord / (2.0 * du)
    dmu = 0.5 * (seg + np.concatenate((seg[-1:], seg[:-1])))

    return GeometryFrame(
        kind=CURVE,
        n=1,
        t=t,
        g=(speed * speed)[:, None],
        kappa=kappa[:, None],
        multiplicity=(1,),
        H=kappa,
        A2=kappa * kappa,
        nu=nu.view(np.float64).reshape(m, 2),
        tangent=tangent.view(np.float64).reshape(m, 2),
        dmu=dmu,
        seg=seg,
        du=du,
        h_min=h_min,
    )


def _revolution_frame(rev: Revolution, t: float) -> GeometryFrame:
    x, rho, n = rev.x, rev.rho, rev.n
    du = np.pi / (rev.m - 1)

    seg = np.hypot(np.diff(x), np.diff(rho))
    if seg.min() < SEGMENT_FLOOR:
        raise DegenerateGeometry(f"segment length {seg.min():.3e} below floor")
    if rho[1:-1].min() < RADIUS_FLOOR:
        raise DegenerateGeometry(f"profile radius {rho[1:-1].min():.3e} below floor")

    # Ghost nodes mirror the meridian through the axis: x even, rho odd.
    xe = np.concatenate(([x[1]], x, [x[-2]]))
    re = np.concatenate(([-rho[1]], rho, [-rho[-2]]))
    x_u = (xe[2:] - xe[:-2]) / (2.0 * du)
    rho_u = (re[2:] - re[:-2]) / (2.0 * du)
    x_uu = (xe[2:] - 2.0 * x + xe[:-2]) / du**2
    rho_uu = (re[2:] - 2.0 * rho + re[:-2]) / du**2

    s = np.hypot(x_u, rho_u)
    k_axial = (rho_u * x_uu - x_u * rho_uu) / s**3
    k_rot = np.empty_like(k_axial)
    k_rot[1:-1] = x_u[1:-1] / (s[1:-1] * rho[1:-1])
    k_rot[0], k_rot[-1] = k_axial[0], k_axial[-1]

    tangent = np.column_stack((x_u, rho_u)) / s[:, None]
    nu = np.column_stack((-rho_u, x_u)) / s[:, None]

    dmu = np.empty_like(x)
    dmu[1:-1] = unit_sphere_area(n - 1) * rho[1:-1] ** (n - 1) * 0.5 * (seg[:-1] + seg[1:])
    cap = unit_ball_volume(n)
    dmu[0] = cap * (0.5 * seg[0]) ** n
    dmu[-1] = cap * (0.5 * seg[-1]) ** n

    H = k_axial + (n - 1) * k_rot
    return GeometryFrame(
        kind=REVOLUTION,
        n=n,
        t=t,
        g=np.column_stack((s**2, rho**2)),
        kappa=np.column_stack((k_axial, k_rot)),
        multiplicity=(1, n - 1),
        H=H,
        A2=k_axial**2 + (n - 1) * k_rot**2,
        nu=nu,
        tangent=tangent,
        dmu=dmu,
        seg=seg,
        du=du,
        h_min=float(seg.min()),
        rho=rho,
    )


def _sphere_frame(sphere: AnalyticSphere, t: float) -> GeometryFrame:
    r, n = sphere.radius, sphere.n
    k = 1.0 / r
    return GeometryFrame(
        kind=SPHERE,
        n=n,
        t=t,
        g=np.array([[r * r]]),
        kappa=np.array([[k]]),
        multiplicity=(n,),
        H=np.array([n * k]),
        A2=np.array([n * k * k]),
        nu=np.array([[1.0, 0.0]]),
        tangent=np.array([[0.0, 1.0]]),
        dmu=np.array([unit_sphere_area(n) * r**n]),
        seg=np.empty(0),
        du=0.0,
        h_min=math.inf,
    )


def _as_field(frame: GeometryFrame, values) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim == 0:
        return np.full(frame.m, float(array))
    if array.shape != (frame.m,):
        raise LengthMismatch(f"field has shape {array.shape}, frame has {frame.m} samples")
    return array


def area_integral(frame: GeometryFrame, values) -> float:
    """∫_M f dμ with the frame's quadrature weights."""
    return float(np.dot(_as_field(frame, values), frame.dmu))


def laplace_beltrami(frame: GeometryFrame, values) -> np.ndarray:
    """Finite-volume Laplace-Beltrami operator of a per-sample field."""
    if frame.kind == SPHERE:
        array = np.atleast_1d(np.asarray(values, dtype=float))
        if np.all(array == array[0]):
            return np.zeros(frame.m)
        raise UnsupportedRepresentation("analytic sphere only carries constant fields")

    f = _as_field(frame, values)
    if frame.kind == CURVE:
        seg = frame.seg
        flux_ahead = (np.roll(f, -1) - f) / seg
        flux_behind = (f - np.roll(f, 1)) / np.roll(seg, 1)
        return (flux_ahead - flux_behind) / frame.dmu

    rho_mid = 0.5 * (frame.rho[:-1] + frame.rho[1:])
    flux = rho_mid ** (frame.n - 1) * np.diff(f) / frame.seg
    net = np.zeros_like(f)
    net[:-1] += flux
    net[1:] -= flux
    return unit_sphere_area(frame.n - 1) * net / frame.dmu


def surface_gradient(frame: GeometryFrame, values, parity: str = "even") -> np.ndarray:
    """Arclength derivative of a field along the curve or meridian.

    ``parity`` says how the field continues through the axis on revolutions:
    "even" for scalars such as curvatures, "odd" for the profile radius.
    """
    if frame.kind == SPHERE:
        return np.zeros(frame.m)

    f = _as_field(frame, values)
    if frame.kind == CURVE:
        f_u = (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * frame.du)
    else:
        sign = 1.0 if parity == "even" else -1.0
        fe = np.concatenate(([sign * f[1]], f, [sign * f[-2]]))
        f_u = (fe[2:] - fe[:-2]) / (2.0 * frame.du)
    return f_u / np.sqrt(frame.g[:, 0])


def equivalent_radius(imm: Immersion) -> float:
    """Size of an immersion expressed as a radius."""
    if isinstance(imm, PlaneCurve):
        centroid = imm.points.mean(axis=0)
        return float(np.hypot(*(imm.points - centroid).T).mean())
    if isinstance(imm, AnalyticSphere):
        return imm.radius
    area = compute_geometry(imm).area
    return (area / unit_sphere_area(imm.n)) ** (1.0 / imm.n)
