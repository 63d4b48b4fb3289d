"""Curvature-norm accumulators and hypothesis monitors for flow runs."""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import linregress

from ..errors import InsufficientSamples, MissingAccumulator
from ..models.report_models import (
    AccumulatorEntry,
    DichotomyFit,
    HolderCheck,
    MonitorEvent,
    MonitorReport,
    MonitorRow,
)
from .geometry_utils import AnalyticSphere, GeometryFrame, area_integral

if TYPE_CHECKING:
    from .flow_utils import FlowTrajectory

logger = logging.getLogger(__name__)

Pair = Tuple[str, float]

DEFAULT_MIN_SAMPLES = 20
EXPONENT_TOLERANCE = 0.05
EXTRAPOLATION_TAIL = 10
HOLDER_SLACK = 1e-12


def column_name(pair: Pair) -> str:
    """CSV column for an accumulator pair, e.g. ``acc_A_4``."""
    quantity, alpha = pair
    return f"acc_{quantity}_{alpha:g}"


def integrand(frame: GeometryFrame, quantity: str, alpha: float) -> np.ndarray:
    """|A|^alpha or |H|^alpha per sample."""
    if quantity == "A":
        return frame.A2 if alpha == 2.0 else frame.A2 ** (0.5 * alpha)
    if quantity == "H":
        return frame.H * frame.H if alpha == 2.0 else np.abs(frame.H) ** alpha
    raise ValueError(f"unknown quantity {quantity!r}")


def spatial_integral(frame: GeometryFrame, quantity: str, alpha: float) -> float:
    """∫_M |q|^alpha dμ on one frame."""
    return area_integral(frame, integrand(frame, quantity, alpha))


@dataclass(frozen=True)
class NormAccumulator:
    """Running space-time integrals ∫₀^t ∫_M |q|^alpha dμ dt for registered pairs."""
    pairs: Tuple[Pair, ...]
    values: Mapping[Pair, float]
    snapshots: Mapping[Pair, float]

    @classmethod
    def empty(cls, pairs: Iterable[Pair]) -> "NormAccumulator":
        pairs = tuple((q, float(a)) for q, a in pairs)
        return cls(pairs, {p: 0.0 for p in pairs}, {})

    def value(self, quantity: str, alpha: float) -> float:
        pair = (quantity, float(alpha))
        if pair not in self.values:
            raise MissingAccumulator(f"no accumulator registered for {column_name(pair)}")
        return self.values[pair]

    def norm(self, quantity: str, alpha: float) -> float:
        return self.value(quantity, alpha) ** (1.0 / alpha)

    def with_snapshots(self, frame: GeometryFrame) -> "NormAccumulator":
        snapshots = {
            pair: spatial_integral(frame, *pair) ** (1.0 / pair[1]) for pair in self.pairs
        }
        return NormAccumulator(self.pairs, self.values, snapshots)


def update_accumulators(acc: NormAccumulator, frame: GeometryFrame, dt: float) -> NormAccumulator:
    """Left-rectangle update: every accumulator gains dt · ∫_M |q|^alpha dμ."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    if dt == 0:
        return acc

    values: Dict[Pair, float] = {}
    snapshots: Dict[Pair, float] = {}
    for pair in acc.pairs:
        integral = spatial_integral(frame, *pair)
        values[pair] = acc.values[pair] + dt * integral
        snapshots[pair] = integral ** (1.0 / pair[1])
    return NormAccumulator(acc.pairs, values, snapshots)


def hypothesis_monitor(frame: GeometryFrame, c_bound: Optional[float] = None) -> MonitorRow:
    """Lower-bound, mean-convexity and pinching diagnostics of one frame."""
    min_kappa = frame.min_kappa
    min_h = frame.min_H

    violations: List[str] = []
    if c_bound is not None and min_kappa < -c_bound:
        violations.append("kappa_below_bound")
    if min_h <= 0:
        violations.append("mean_curvature_nonpositive")

    max_pinching = None
    if min_h > 0:
        max_pinching = float(np.max(frame.A2 / (frame.H * frame.H)))

    shifted_excess = None
    if c_bound is not None:
        # kappa_i >= -C for all i forces kappa_i <= H + (n - 1) C
        largest = frame.kappa.max(axis=1)
        shifted_excess = float(np.max(largest - frame.H - (frame.n - 1) * c_bound))

    return MonitorRow(
        t=frame.t,
        min_kappa=min_kappa,
        min_H=min_h,
        max_pinching=max_pinching,
        shifted_excess=shifted_excess,
        violations=violations,
    )


def rescaled_lower_bound(c_bound: float, scale: float) -> float:
    """The bound h_ij >= -C after zooming by Q: h_ij >= -C / sqrt(Q)."""
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    return -c_bound / math.sqrt(scale)


def spacetime_volume(traj: "FlowTrajectory") -> float:
    """∫₀^t |M_t| dt with the same left-rectangle rule as the accumulators."""
    return float(sum(r.dt * r.area for r in traj.records[:-1]))


def holder_bound(traj: "FlowTrajectory", quantity: str, alpha: float, critical: float) -> Tuple[float, float]:
    """Return (‖q‖_critical, ‖q‖_alpha · V^{1/critical − 1/alpha}) on the computed interval."""
    if critical > alpha:
        raise ValueError("the critical exponent must not exceed alpha")
    low = traj.accumulator.norm(quantity, critical)
    high = traj.accumulator.norm(quantity, alpha)
    volume = spacetime_volume(traj)
    return low, high * volume ** (1.0 / critical - 1.0 / alpha)


def estimate_blowup_time(traj: "FlowTrajectory") -> Tuple[float, str]:
    """Singular time from the sphere oracle, or from max|A|² ~ c / (T - t)."""
    if isinstance(traj.initial, AnalyticSphere):
        r0, n = traj.initial.radius, traj.initial.n
        return r0 * r0 / (2.0 * n), "oracle"

    tail = traj.records[-EXTRAPOLATION_TAIL:]
    if len(tail) < 3:
        raise InsufficientSamples("too few records to extrapolate the singular time")
    times = np.array([r.t for r in tail])
    inverse = np.array([1.0 / r.max_A2 for r in tail])
    fit = linregress(times, inverse)
    if not fit.slope < 0:
        raise InsufficientSamples("max|A|² is not growing towards the end of the run")
    t_est = -fit.intercept / fit.slope
    if t_est <= times[-1]:
        t_est = times[-1] + (times[-1] - times[-2])
    return float(t_est), "extrapolated"


def dichotomy_fit(
    traj: "FlowTrajectory",
    quantity: str,
    alpha: float,
    min_samples: int = DEFAULT_MIN_SAMPLES,
    decades: float = 1.0,
    tolerance: float = EXPONENT_TOLERANCE,
) -> DichotomyFit:
    """Fit the accumulator increment rate against the time left to blow-up.

    Rates are the exact per-step increments divided by dt, i.e. the spatial
    integrand at the left end of each step. The fit runs over the final
    ``decades`` of T_est - t.
    """
    alpha = float(alpha)
    pair = (quantity, alpha)
    if pair not in traj.accumulator.pairs:
        raise MissingAccumulator(f"no accumulator registered for {column_name(pair)}")
    if traj.stop_reason is None or not traj.stop_reason.near_singularity:
        raise InsufficientSamples(f"run stopped with {traj.stop_reason}, not near a blow-up")

    times = np.array([r.t for r in traj.records])
    values = np.array([r.accumulators[pair] for r in traj.records])
    if times.size < 3:
        raise InsufficientSamples("fewer than three records")

    rates = np.diff(values) / np.diff(times)
    rate_times = times[:-1]
    t_est, source = estimate_blowup_time(traj)
    tau = t_est - rate_times

    usable = (tau > 0) & (rates > 0)
    window = usable & (tau <= tau[usable][-1] * 10.0**decades) if usable.any() else usable
    samples = int(window.sum())
    if samples < min_samples:
        raise InsufficientSamples(
            f"{samples} rate samples in the final {decades:g} decade(s), need {min_samples}"
        )

    fit = linregress(np.log(tau[window]), np.log(rates[window]))
    exponent = float(fit.slope)
    prefactor = math.exp(fit.intercept)
    n = traj.n

    if exponent > -1.0 + tolerance:
        kind = "finite"
    elif exponent >= -1.0 - tolerance:
        kind = "logarithmic"
    else:
        kind = "power"

    finite_estimate = None
    divergence_exponent = None
    if kind == "finite":
        tail = prefactor * tau[usable][-1] ** (exponent + 1.0) / (exponent + 1.0)
        finite_estimate = float(trapezoid(rates, rate_times) + tail)
    elif kind == "logarithmic":
        divergence_exponent = 0.0
    else:
        divergence_exponent = -(exponent + 1.0)

    windowed = rates[window]
    monotone = bool(np.all(np.diff(windowed) >= -1e-12 * np.abs(windowed[1:])))

    logger.debug(
        "dichotomy %s: exponent %.4f over %d samples (%s)", column_name(pair), exponent, samples, kind
    )
    return DichotomyFit(
        quantity=quantity,
        alpha=alpha,
        n=n,
        t_est=t_est,
        t_est_source=source,
        fitted_exponent=exponent,
        expected_exponent=(n - alpha) / 2.0,
        kind=kind,
        finite_estimate=finite_estimate,
        divergence_exponent=divergence_exponent,
        samples=samples,
        decades=decades,
        rate_monotone=monotone,
    )


def widening_fit(traj: "FlowTrajectory", quantity: str, alpha: float, max_decades: int = 3) -> DichotomyFit:
    """dichotomy_fit over one decade, widening up to ``max_decades`` when samples are short.

    A fit that needed more than one decade is returned with ``widened`` set.
    """
    for decades in range(1, max_decades + 1):
        try:
            fit = dichotomy_fit(traj, quantity, alpha, decades=float(decades))
        except InsufficientSamples:
            if decades == max_decades:
                raise
            continue
        if decades > 1:
            logger.info(
                "Dichotomy fit for %s widened to %d decades (%d samples)",
                column_name((quantity, float(alpha))), decades, fit.samples,
            )
            fit = fit.model_copy(update={"widened": True})
        return fit
    raise InsufficientSamples("no decades to fit")


def holder_checks(traj: "FlowTrajectory") -> List[HolderCheck]:
    """Hölder reduction to the critical exponent for every registered alpha > n + 2."""
    critical = float(traj.n + 2)
    registered = set(traj.accumulator.pairs)
    checks = []
    for quantity, alpha in traj.accumulator.pairs:
        if alpha <= critical or (quantity, critical) not in registered:
            continue
        low, high = holder_bound(traj, quantity, alpha, critical)
        checks.append(HolderCheck(
            quantity=quantity,
            alpha=alpha,
            critical=critical,
            critical_norm=low,
            bound=high,
            holds=bool(low <= high * (1.0 + HOLDER_SLACK)),
        ))
    return checks


def _events(traj: "FlowTrajectory", c_bound: Optional[float]) -> List[MonitorEvent]:
    events: List[MonitorEvent] = []
    below = False
    previous_h = None
    for record in traj.records:
        if c_bound is not None:
            now_below = record.min_kappa < -c_bound
            if now_below and not below:
                events.append(MonitorEvent(
                    step=record.step, t=record.t, kind="kappa_below_bound", value=record.min_kappa
                ))
            below = now_below
        if previous_h is not None and (previous_h > 0) != (record.min_H > 0):
            events.append(MonitorEvent(
                step=record.step, t=record.t, kind="mean_curvature_sign_change", value=record.min_H
            ))
        previous_h = record.min_H
    return events


def build_monitor_report(traj: "FlowTrajectory", c_bound: Optional[float] = None) -> MonitorReport:
    """Collect rows, events, accumulators and blow-up fits of a finished run."""
    if c_bound is None:
        c_bound = traj.monitors.c_bound

    tightest = max(0.0, -min(r.min_kappa for r in traj.records))
    final = traj.accumulator
    entries = [
        AccumulatorEntry(
            quantity=q,
            alpha=a,
            integral=final.values[(q, a)],
            norm=final.values[(q, a)] ** (1.0 / a),
            snapshot=final.snapshots.get((q, a)),
        )
        for q, a in final.pairs
    ]

    fits: List[DichotomyFit] = []
    if traj.stop_reason is not None and traj.stop_reason.near_singularity:
        critical = float(traj.n + 2)
        for q, a in final.pairs:
            if a != critical:
                continue
            try:
                fits.append(widening_fit(traj, q, a))
            except InsufficientSamples as e:
                logger.info("No dichotomy fit for %s: %s", column_name((q, a)), e)

    lower = None
    if c_bound is not None:
        peak = max(r.max_H2 for r in traj.records)
        if peak > 0:
            lower = rescaled_lower_bound(c_bound, peak)

    return MonitorReport(
        n=traj.n,
        stop_reason=traj.stop_reason,
        c_bound=c_bound,
        tightest_c=tightest,
        rescaled_lower_bound=lower,
        rows=list(traj.monitor_rows),
        events=_events(traj, c_bound),
        accumulators=entries,
        dichotomy=fits,
        holder=holder_checks(traj),
    )
