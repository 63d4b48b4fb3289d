"""Explicit mean curvature flow with adaptive steps and blow-up detection."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import DegenerateGeometry, GeometryError, InvalidImmersion, InvariantViolation, StepUnderflow
from ..models.base import StopReason
from ..models.config_models import FlowConfig, MonitorSet
from ..models.report_models import MonitorRow
from .geometry_utils import (
    AnalyticSphere,
    GeometryFrame,
    Immersion,
    PlaneCurve,
    Revolution,
    compute_geometry,
)
from .monitor_utils import NormAccumulator, hypothesis_monitor, update_accumulators

logger = logging.getLogger(__name__)

AREA_SLACK = 1e-12


@dataclass(frozen=True)
class StepRecord:
    """Scalar summary of the state at time t; dt is the step taken from it."""
    step: int
    t: float
    dt: float
    max_A2: float
    max_H2: float
    min_kappa: float
    min_H: float
    area: float
    accumulators: Dict[Tuple[str, float], float]
    redistributed: bool = False


@dataclass(frozen=True)
class KeptFrame:
    """A recorded state: the immersion and its StepRecord.

    The geometry is not stored; ``frame`` re-evaluates it, which gives the
    same arrays the flow stepped with.
    """
    step: int
    t: float
    immersion: Immersion
    record: StepRecord

    @property
    def frame(self) -> GeometryFrame:
        return compute_geometry(self.immersion, self.t)


@dataclass
class FlowTrajectory:
    """Computed portion [0, t_stop] of a flow."""
    initial: Immersion
    config: FlowConfig
    monitors: MonitorSet
    accumulator: NormAccumulator
    records: List[StepRecord] = field(default_factory=list)
    frames: List[KeptFrame] = field(default_factory=list)
    monitor_rows: List[MonitorRow] = field(default_factory=list)
    stop_reason: Optional[StopReason] = None

    @property
    def n(self) -> int:
        return self.initial.n

    @property
    def t_final(self) -> float:
        return self.records[-1].t if self.records else 0.0

    @property
    def final(self) -> KeptFrame:
        return self.frames[-1]

    def finish(self, reason: StopReason) -> None:
        if self.stop_reason is not None:
            raise InvariantViolation(f"stop reason already set to {self.stop_reason.value}")
        self.stop_reason = reason


def stable_dt(frame: GeometryFrame, c_stab: float) -> float:
    """c_stab · min(h_min²/2, 1/(2 max|A|²)), without clipping."""
    limits = []
    if frame.max_A2 > 0:
        limits.append(0.5 / frame.max_A2)
    if math.isfinite(frame.h_min):
        limits.append(0.5 * frame.h_min**2)
    return c_stab * min(limits)


def adaptive_dt(frame: GeometryFrame, cfg: FlowConfig) -> float:
    """Parabolic step limit, clipped so the run lands on t_cap."""
    dt = stable_dt(frame, cfg.c_stab)
    if dt < cfg.dt_floor:
        raise StepUnderflow(dt, cfg.dt_floor)
    return min(dt, cfg.t_cap - frame.t)


def step(imm: Immersion, frame: GeometryFrame, dt: float, redistribute: bool = False) -> Immersion:
    """Move every sample by -dt·H·nu (exact radius update for analytic spheres)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")

    if isinstance(imm, AnalyticSphere):
        r2 = imm.radius**2 - 2.0 * imm.n * dt
        if r2 <= 0:
            raise DegenerateGeometry(f"sphere collapses within the step (r² = {r2:.3e})")
        return AnalyticSphere(math.sqrt(r2), imm.n)

    velocity = -dt * frame.H[:, None] * frame.nu
    if isinstance(imm, PlaneCurve):
        moved = PlaneCurve(imm.points + velocity)
        return redistribute_arclength(moved) if redistribute else moved

    x = imm.x + velocity[:, 0]
    rho = imm.rho + velocity[:, 1]
    rho[0] = rho[-1] = 0.0
    return Revolution(x, rho, imm.n)


def redistribute_arclength(curve: PlaneCurve) -> PlaneCurve:
    """Resample a closed curve at equal arclength on its periodic cubic spline."""
    closed = np.vstack((curve.points, curve.points[:1]))
    lengths = np.hypot(*np.diff(closed, axis=0).T)
    s = np.concatenate(([0.0], np.cumsum(lengths)))
    spline = CubicSpline(s, closed, bc_type="periodic", axis=0)
    targets = np.linspace(0.0, s[-1], curve.m, endpoint=False)
    return PlaneCurve(spline(targets))


def _record(step_index: int, frame: GeometryFrame, dt: float, acc: NormAccumulator,
            redistributed: bool) -> StepRecord:
    return StepRecord(
        step=step_index,
        t=frame.t,
        dt=dt,
        max_A2=frame.max_A2,
        max_H2=frame.max_H2,
        min_kappa=frame.min_kappa,
        min_H=frame.min_H,
        area=frame.area,
        accumulators=dict(acc.values),
        redistributed=redistributed,
    )


def run_flow(imm0: Immersion, cfg: FlowConfig, monitors: Optional[MonitorSet] = None) -> FlowTrajectory:
    """Iterate geometry, monitors, step size and step until a stop condition.

    Records hold the accumulators at their own time, before the step they
    describe is taken. The terminal record repeats the last accepted dt.
    """
    monitors = monitors or MonitorSet()
    traj = FlowTrajectory(
        initial=imm0,
        config=cfg,
        monitors=monitors,
        accumulator=NormAccumulator.empty(monitors.pairs),
    )

    imm = imm0
    t = 0.0
    index = 0
    last_dt: Optional[float] = None
    previous_area: Optional[float] = None
    redistributed = False

    try:
        frame = compute_geometry(imm, t)
    except GeometryError as e:
        raise InvalidImmersion(f"initial state is degenerate: {e}") from e

    while True:
        if previous_area is not None and not redistributed and frame.area > previous_area * (1.0 + AREA_SLACK):
            raise InvariantViolation(
                f"area increased from {previous_area!r} to {frame.area!r} at step {index}"
            )

        reason: Optional[StopReason] = None
        dt = 0.0
        if frame.max_A2 > cfg.blowup_threshold:
            reason = StopReason.CURVATURE_BLOWUP
        elif t >= cfg.t_cap:
            reason = StopReason.REACHED_T_CAP
        else:
            try:
                dt = adaptive_dt(frame, cfg)
            except StepUnderflow as e:
                logger.debug("step underflow at t=%.6g: %s", t, e)
                reason = StopReason.STEP_UNDERFLOW

        if reason is None:
            try:
                next_imm = step(imm, frame, dt, redistribute=cfg.redistribute)
                next_t = cfg.t_cap if dt == cfg.t_cap - t else t + dt
                next_frame = compute_geometry(next_imm, next_t)
            except GeometryError as e:
                logger.debug("geometry degenerated after t=%.6g: %s", t, e)
                reason = StopReason.GEOMETRY_DEGENERATE

        record_dt = dt if reason is None else (last_dt or stable_dt(frame, cfg.c_stab))
        record = _record(index, frame, record_dt, traj.accumulator, redistributed)
        traj.records.append(record)

        if reason is not None or index % cfg.record_stride == 0:
            traj.frames.append(KeptFrame(index, t, imm, record))
            traj.monitor_rows.append(hypothesis_monitor(frame, monitors.c_bound))

        if reason is not None:
            traj.accumulator = traj.accumulator.with_snapshots(frame)
            traj.finish(reason)
            logger.info(
                "Flow stopped at t=%.10g after %d steps: %s", t, index, reason.value
            )
            return traj

        traj.accumulator = update_accumulators(traj.accumulator, frame, dt)
        previous_area = frame.area
        redistributed = cfg.redistribute and isinstance(imm, PlaneCurve)
        last_dt = dt
        imm, frame, t = next_imm, next_frame, next_t
        index += 1
