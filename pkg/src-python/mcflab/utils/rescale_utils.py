"""Parabolic rescaling of trajectories and scale-invariance checks."""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from ..errors import InsufficientSamples, InvariantViolation, NonPositiveInputs, WindowOutOfRange
from ..models.report_models import InvarianceResult
from .flow_utils import FlowTrajectory, KeptFrame, StepRecord
from .geometry_utils import (
    AnalyticSphere,
    GeometryFrame,
    Immersion,
    PlaneCurve,
    Revolution,
    compute_geometry,
)
from .monitor_utils import NormAccumulator, spatial_integral

logger = logging.getLogger(__name__)

TRANSFORM_TOLERANCE = 1e-10
TIME_SLACK = 1e-12


@dataclass(frozen=True)
class RescaleSpec:
    """Zoom factor Q and centre time; tau_start/tau_end bound the rescaled window."""
    Q: float
    t_center: float
    tau_start: Optional[float] = None
    tau_end: Optional[float] = None

    def __post_init__(self):
        if not (self.Q > 0 and math.isfinite(self.Q)):
            raise NonPositiveInputs(f"rescaling factor must be positive, got {self.Q}")

    def source_time(self, tau: float) -> float:
        return self.t_center + tau / self.Q

    def rescaled_time(self, t: float) -> float:
        return self.Q * (t - self.t_center)


def scale_immersion(imm: Immersion, factor: float) -> Immersion:
    """Dilate an immersion about the origin."""
    if isinstance(imm, PlaneCurve):
        return PlaneCurve(imm.points * factor)
    if isinstance(imm, Revolution):
        return Revolution(imm.x * factor, imm.rho * factor, imm.n)
    return AnalyticSphere(imm.radius * factor, imm.n)


def _relative_gap(actual: np.ndarray, expected: np.ndarray) -> float:
    scale = float(np.max(np.abs(expected))) or 1.0
    return float(np.max(np.abs(actual - expected))) / scale


def _check_transformation(source: GeometryFrame, rescaled: GeometryFrame, q: float) -> None:
    n = source.n
    gaps = {
        "H": _relative_gap(rescaled.H, source.H / math.sqrt(q)),
        "A2": _relative_gap(rescaled.A2, source.A2 / q),
        "dmu": _relative_gap(rescaled.dmu, source.dmu * q ** (0.5 * n)),
        "g": _relative_gap(rescaled.g, source.g * q),
    }
    worst = max(gaps, key=gaps.get)
    if gaps[worst] > TRANSFORM_TOLERANCE:
        raise InvariantViolation(
            f"rescaled {worst} departs from its transformation law by {gaps[worst]:.3e}"
        )


def _window(traj: FlowTrajectory, spec: RescaleSpec):
    t_first, t_last = traj.records[0].t, traj.records[-1].t
    if not (t_first - TIME_SLACK <= spec.t_center <= t_last + TIME_SLACK):
        raise WindowOutOfRange(
            f"t_center {spec.t_center} outside the trajectory [{t_first}, {t_last}]"
        )

    start = t_first if spec.tau_start is None else spec.source_time(spec.tau_start)
    end = t_last if spec.tau_end is None else spec.source_time(spec.tau_end)
    if start > end:
        raise WindowOutOfRange("rescaled window is empty")
    if start < t_first - TIME_SLACK or end > t_last + TIME_SLACK:
        raise WindowOutOfRange(
            f"window [{start}, {end}] maps outside the trajectory [{t_first}, {t_last}]"
        )
    return start, end


def window_frames(traj: FlowTrajectory, spec: RescaleSpec) -> List[KeptFrame]:
    """Kept frames inside the window, or the single frame nearest to it."""
    start, end = _window(traj, spec)
    inside = [kf for kf in traj.frames if start - TIME_SLACK <= kf.t <= end + TIME_SLACK]
    if inside:
        return inside
    middle = 0.5 * (start + end)
    return [min(traj.frames, key=lambda kf: abs(kf.t - middle))]


def _rescale_record(record: StepRecord, spec: RescaleSpec, n: int, base: StepRecord) -> StepRecord:
    q = spec.Q
    accumulators = {
        (quantity, alpha): q ** (0.5 * (n + 2 - alpha)) * (value - base.accumulators[(quantity, alpha)])
        for (quantity, alpha), value in record.accumulators.items()
    }
    return replace(
        record,
        t=spec.rescaled_time(record.t),
        dt=q * record.dt,
        max_A2=record.max_A2 / q,
        max_H2=record.max_H2 / q,
        min_kappa=record.min_kappa / math.sqrt(q),
        min_H=record.min_H / math.sqrt(q),
        area=record.area * q ** (0.5 * n),
        accumulators=accumulators,
    )


def parabolic_rescale(traj: FlowTrajectory, spec: RescaleSpec) -> FlowTrajectory:
    """Zoom a trajectory: positions by sqrt(Q), times by t -> Q (t - t_center).

    Geometry of every kept frame is recomputed from the dilated immersion and
    cross-checked against the transformation laws of g, H, |A|² and dμ.
    """
    start, end = _window(traj, spec)
    kept = window_frames(traj, spec)
    n = traj.n
    factor = math.sqrt(spec.Q)

    records = [r for r in traj.records if start - TIME_SLACK <= r.t <= end + TIME_SLACK]
    if not records:
        records = [kf.record for kf in kept]
    base = records[0]
    new_records = [_rescale_record(r, spec, n, base) for r in records]
    by_step = {r.step: r for r in new_records}

    new_frames = []
    for kf in kept:
        immersion = scale_immersion(kf.immersion, factor)
        tau = spec.rescaled_time(kf.t)
        frame = compute_geometry(immersion, tau)
        _check_transformation(kf.frame, frame, spec.Q)
        record = by_step.get(kf.step) or _rescale_record(kf.record, spec, n, base)
        new_frames.append(KeptFrame(kf.step, tau, immersion, record))

    last = new_records[-1]
    accumulator = NormAccumulator(
        traj.accumulator.pairs, dict(last.accumulators), {}
    ).with_snapshots(new_frames[-1].frame)

    logger.debug(
        "rescaled %d frames by Q=%g about t=%g", len(new_frames), spec.Q, spec.t_center
    )
    return FlowTrajectory(
        initial=new_frames[0].immersion,
        config=traj.config,
        monitors=traj.monitors,
        accumulator=accumulator,
        records=new_records,
        frames=new_frames,
        monitor_rows=[],
        stop_reason=traj.stop_reason,
    )


def _spacetime_integral(frames: List[KeptFrame], quantity: str, alpha: float) -> float:
    if len(frames) < 2:
        raise InsufficientSamples("space-time integral needs at least two kept frames")
    times = np.array([kf.t for kf in frames])
    values = np.array([spatial_integral(kf.frame, quantity, alpha) for kf in frames])
    return float(trapezoid(values, times))


def spacetime_norm_invariance_check(
    traj: FlowTrajectory,
    spec: RescaleSpec,
    quantity: str = "A",
    alpha: Optional[float] = None,
    mode: str = "spacetime",
) -> InvarianceResult:
    """Compare a curvature integral over matching windows before and after rescaling.

    ``mode="spacetime"`` integrates ∫∫|q|^alpha dμ dt over the kept frames of the
    window (invariant at alpha = n + 2); ``mode="spatial"`` compares ∫|q|^alpha dμ on
    the frame nearest t_center (invariant at alpha = n). Other exponents are
    checked against the predicted power of Q.
    """
    n = traj.n
    if alpha is None:
        alpha = float(n + 2) if mode == "spacetime" else float(n)

    source_frames = window_frames(traj, spec)
    rescaled = parabolic_rescale(traj, spec)

    if mode == "spacetime":
        original = _spacetime_integral(source_frames, quantity, alpha)
        scaled = _spacetime_integral(rescaled.frames, quantity, alpha)
        power = 0.5 * (n + 2 - alpha)
    elif mode == "spatial":
        index = int(np.argmin([abs(kf.t - spec.t_center) for kf in source_frames]))
        original = spatial_integral(source_frames[index].frame, quantity, alpha)
        scaled = spatial_integral(rescaled.frames[index].frame, quantity, alpha)
        power = 0.5 * (n - alpha)
    else:
        raise ValueError(f"unknown invariance mode {mode!r}")

    expected = spec.Q**power
    ratio = scaled / original
    deviation = abs(ratio - expected) / expected
    return InvarianceResult(
        mode=mode,
        quantity=quantity,
        alpha=alpha,
        scale=spec.Q,
        original=original,
        rescaled=scaled,
        ratio=ratio,
        expected_ratio=expected,
        deviation=deviation,
        invariant=power == 0,
    )
