"""Finite-difference residuals of the curvature evolution equations.

Each residual is the centred time derivative of a quantity over kept frames
k-1, k, k+1 minus the right-hand side of its evolution equation evaluated on
frame k:

    metric   ∂g_ij/∂t = -2 H h_ij
    normal   ∂nu/∂t   = ∇H
    h        ∂h_ij/∂t = Δh_ij - 2 H h_il g^lm h_mj + |A|² h_ij
    H        ∂H/∂t    = ΔH + |A|² H
    A2       ∂|A|²/∂t = Δ|A|² - 2 |∇A|² + 2 |A|⁴

and, for mean-convex flows, the pinching ratio P = |A|²/H²:

    ∂P/∂t = ΔP + (2/H) <∇H, ∇P> - (2/H⁴) |H ∇h - ∇H h|²
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import IndexOutOfRange, NonPositiveH, RedistributionActive
from .flow_utils import FlowTrajectory, KeptFrame
from .geometry_utils import CURVE, REVOLUTION, SPHERE, GeometryFrame, laplace_beltrami, surface_gradient

logger = logging.getLogger(__name__)

EQUATIONS = ("metric", "normal", "h", "H", "A2")
POLE_MARGIN = 4


@dataclass(frozen=True)
class PinchingResidual:
    """Residual of the pinching-ratio equation and its negative gradient term."""
    residual: np.ndarray
    gradient_term: np.ndarray


def _neighbours(traj: FlowTrajectory, k: int) -> Tuple[KeptFrame, KeptFrame, KeptFrame]:
    if not 1 <= k <= len(traj.frames) - 2:
        raise IndexOutOfRange(f"frame index {k} has no neighbours in {len(traj.frames)} kept frames")
    if traj.config.redistribute:
        raise RedistributionActive("residuals need the pure normal flow; redistribution is on")
    return traj.frames[k - 1], traj.frames[k], traj.frames[k + 1]


def time_derivative(before, middle, after, t_before: float, t_middle: float, t_after: float):
    """Second-order centred derivative on a non-uniform time grid."""
    h_back = t_middle - t_before
    h_ahead = t_after - t_middle
    return (
        h_back**2 * (np.asarray(after) - middle) + h_ahead**2 * (middle - np.asarray(before))
    ) / (h_back * h_ahead * (h_back + h_ahead))


def _ddt(frames: Tuple[KeptFrame, KeptFrame, KeptFrame], pick):
    a, b, c = frames
    return time_derivative(pick(a.frame), pick(b.frame), pick(c.frame), a.t, b.t, c.t)


def _gradients(frame: GeometryFrame) -> np.ndarray:
    """Arclength derivatives of each principal curvature column."""
    return np.column_stack([surface_gradient(frame, frame.kappa[:, i]) for i in range(frame.kappa.shape[1])])


def _gradient_energy(frame: GeometryFrame) -> np.ndarray:
    """|∇A|² from the principal curvature derivatives."""
    if frame.kind == SPHERE:
        return np.zeros(frame.m)
    grads = _gradients(frame)
    if frame.kind == CURVE:
        return grads[:, 0] ** 2
    return grads[:, 0] ** 2 + 3.0 * (frame.n - 1) * grads[:, 1] ** 2


def _tensor_laplacian(frame: GeometryFrame) -> np.ndarray:
    """Δh_ij in the unit principal frame, one column per distinct curvature."""
    if frame.kind == SPHERE:
        return np.zeros_like(frame.kappa)
    lap = np.column_stack([laplace_beltrami(frame, frame.kappa[:, i]) for i in range(frame.kappa.shape[1])])
    if frame.kind == CURVE:
        return lap

    rot_grad = surface_gradient(frame, frame.kappa[:, 1])
    rho_grad = surface_gradient(frame, frame.rho, parity="odd")
    with np.errstate(divide="ignore", invalid="ignore"):
        coupling = 2.0 * rot_grad * rho_grad / frame.rho
    lap[:, 0] -= (frame.n - 1) * coupling
    lap[:, 1] += coupling
    return lap


def _mask_poles(frame: GeometryFrame, residual: np.ndarray, pole_margin: int) -> np.ndarray:
    if frame.kind == REVOLUTION and pole_margin > 0:
        residual = np.array(residual, dtype=float)
        residual[:pole_margin] = np.nan
        residual[-pole_margin:] = np.nan
    return residual


def _norm(components: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(components**2, axis=1))


def evolution_residual(traj: FlowTrajectory, k: int, which: str, pole_margin: int = POLE_MARGIN) -> np.ndarray:
    """Per-sample residual of one evolution equation at kept frame k.

    Tensor equations ("metric", "normal", "h") return the Euclidean norm of the
    component residuals; "H" and "A2" are signed. Samples within
    ``pole_margin`` of a revolution pole are NaN.
    """
    if which not in EQUATIONS:
        raise ValueError(f"unknown evolution equation {which!r}; expected one of {EQUATIONS}")
    frames = _neighbours(traj, k)
    mid = frames[1].frame
    H, A2, kappa, g = mid.H, mid.A2, mid.kappa, mid.g

    if which == "metric":
        rhs = -2.0 * H[:, None] * kappa * g
        residual = _norm(_ddt(frames, lambda f: f.g) - rhs)
    elif which == "normal":
        rhs = surface_gradient(mid, H)[:, None] * mid.tangent
        residual = _norm(_ddt(frames, lambda f: f.nu) - rhs)
    elif which == "h":
        # h_ij in coordinates is kappa_i g_ii on the principal directions
        reaction = -2.0 * H[:, None] * kappa**2 + A2[:, None] * kappa
        rhs = g * (_tensor_laplacian(mid) + reaction)
        residual = _norm(_ddt(frames, lambda f: f.kappa * f.g) - rhs)
    elif which == "H":
        rhs = laplace_beltrami(mid, H) + A2 * H
        residual = _ddt(frames, lambda f: f.H) - rhs
    else:
        rhs = laplace_beltrami(mid, A2) - 2.0 * _gradient_energy(mid) + 2.0 * A2**2
        residual = _ddt(frames, lambda f: f.A2) - rhs

    logger.debug("residual %s at frame %d: max %.3e", which, k, float(np.nanmax(np.abs(residual))))
    return _mask_poles(mid, residual, pole_margin)


def pinching_evolution_residual(traj: FlowTrajectory, k: int, pole_margin: int = POLE_MARGIN) -> PinchingResidual:
    """Residual of the pinching-ratio equation at kept frame k."""
    frames = _neighbours(traj, k)
    geometry = [kf.frame for kf in frames]
    for kf, frame in zip(frames, geometry):
        if frame.min_H <= 0:
            raise NonPositiveH(f"min H = {frame.min_H:.3e} at t = {kf.t:.6g}")

    mid = geometry[1]
    H = mid.H
    ratio = mid.A2 / H**2

    if mid.kind == SPHERE:
        gradient_term = np.zeros(mid.m)
        transport = np.zeros(mid.m)
    else:
        grads = _gradients(mid)
        h_grad = surface_gradient(mid, H)
        shear = (H * grads[:, 0] - h_grad * mid.kappa[:, 0]) ** 2
        if mid.kind == REVOLUTION:
            n = mid.n
            shear = (
                shear
                + (n - 1) * (H * grads[:, 1] - h_grad * mid.kappa[:, 1]) ** 2
                + 2.0 * (n - 1) * H**2 * grads[:, 1] ** 2
            )
        gradient_term = -2.0 * shear / H**4
        transport = 2.0 / H * h_grad * surface_gradient(mid, ratio)

    rhs = laplace_beltrami(mid, ratio) + transport + gradient_term
    residual = _ddt(frames, lambda f: f.A2 / f.H**2) - rhs
    return PinchingResidual(
        residual=_mask_poles(mid, residual, pole_margin),
        gradient_term=gradient_term,
    )
