"""Extension-criterion verdicts for finished flow runs.

A flow that stops at a curvature blow-up cannot have a finite critical
space-time norm of A; the same holds for H when either the curvature lower
bound or mean convexity held. These checks read the accumulators of a run
and say whether what was computed is consistent with that.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from ..errors import InsufficientSamples
from ..models.report_models import CriterionVerdict, ExtensionReport, NormStatus
from .flow_utils import FlowTrajectory
from .monitor_utils import EXPONENT_TOLERANCE, estimate_blowup_time, spatial_integral, widening_fit

logger = logging.getLogger(__name__)

MIN_SNAPSHOT_FRAMES = 3


def _norm_status(traj: FlowTrajectory, quantity: str, alpha: float) -> NormStatus:
    if not traj.stop_reason.near_singularity:
        return NormStatus(quantity=quantity, alpha=alpha, status="finite")
    try:
        fit = widening_fit(traj, quantity, alpha)
    except InsufficientSamples as e:
        logger.info("Norm status of (%s, %g) undetermined: %s", quantity, alpha, e)
        return NormStatus(quantity=quantity, alpha=alpha, status="undetermined")
    status = "finite" if fit.kind == "finite" else "diverging"
    return NormStatus(quantity=quantity, alpha=alpha, status=status, fit=fit)


def _snapshot_status(traj: FlowTrajectory, alpha: float) -> NormStatus:
    """Trend of (∫|A|^alpha dμ)^{1/alpha} over the kept frames of the final decade."""
    if not traj.stop_reason.near_singularity:
        return NormStatus(quantity="A", alpha=alpha, status="finite")
    try:
        t_est, _ = estimate_blowup_time(traj)
    except InsufficientSamples:
        return NormStatus(quantity="A", alpha=alpha, status="undetermined")

    tau = np.array([t_est - kf.t for kf in traj.frames])
    positive = tau > 0
    if not positive.any():
        return NormStatus(quantity="A", alpha=alpha, status="undetermined")
    window = positive & (tau <= tau[positive].min() * 10.0)
    if window.sum() < MIN_SNAPSHOT_FRAMES:
        return NormStatus(quantity="A", alpha=alpha, status="undetermined")

    frames = [kf.frame for kf, inside in zip(traj.frames, window) if inside]
    values = np.array([spatial_integral(f, "A", alpha) for f in frames])
    slope = linregress(np.log(tau[window]), np.log(values)).slope
    status = "diverging" if slope < -EXPONENT_TOLERANCE else "finite"
    return NormStatus(quantity="A", alpha=alpha, status=status)


def _critical(statuses: Sequence[NormStatus], quantity: str, n: int) -> List[NormStatus]:
    return [s for s in statuses if s.quantity == quantity and s.alpha >= n + 2]


def _widening_note(norms: List[NormStatus]) -> str:
    widened = [s for s in norms if s.fit is not None and s.fit.widened]
    if not widened:
        return ""
    parts = ", ".join(
        f"{s.quantity}^{s.alpha:g} over {s.fit.decades:g} decades ({s.fit.samples} samples)" for s in widened
    )
    return f"; fit window widened past one decade: {parts}"


def _verdict(name: str, hypotheses: Dict[str, bool], norms: List[NormStatus], blowup: bool,
             required: bool) -> CriterionVerdict:

    if not norms:
        return CriterionVerdict(
            name=name, hypotheses=hypotheses, consistent=None,
            diagnosis="no accumulator with alpha >= n + 2 registered",
        )
    if not blowup:
        return CriterionVerdict(
            name=name, hypotheses=hypotheses, norms=norms, consistent=True,
            diagnosis="smooth on the computed interval; no obstruction witnessed",
        )
    if not required:
        return CriterionVerdict(
            name=name, hypotheses=hypotheses, norms=norms, consistent=True,
            diagnosis="hypotheses failed, so a finite norm would not contradict the blow-up",
        )

    kinds = {s.status for s in norms}
    note = _widening_note(norms)
    if "finite" in kinds:
        return CriterionVerdict(
            name=name, hypotheses=hypotheses, norms=norms, consistent=False,
            diagnosis="blow-up with a finite critical norm: inconsistent with the extension criterion" + note,
        )
    if kinds == {"diverging"}:
        return CriterionVerdict(
            name=name, hypotheses=hypotheses, norms=norms, consistent=True,
            diagnosis="blow-up with diverging critical norm, as the extension criterion requires" + note,
        )
    return CriterionVerdict(
        name=name, hypotheses=hypotheses, norms=norms, consistent=None,
        diagnosis="too few samples near the blow-up to classify the critical norm",
    )


def extension_report(traj: FlowTrajectory, alphas: Optional[Sequence[float]] = None,
                     c_bound: Optional[float] = None) -> ExtensionReport:
    """Evaluate the extension criteria against a finished trajectory.

    ``alphas`` defaults to every exponent registered for the run. The curvature
    lower bound uses ``c_bound`` (or the run's monitor bound); without one, the
    tightest bound witnessed on the computed interval is taken as held.
    """
    n = traj.n
    blowup = traj.stop_reason.near_singularity
    registered = traj.accumulator.pairs
    wanted = set(float(a) for a in alphas) if alphas is not None else {a for _, a in registered}
    pairs: List[Tuple[str, float]] = [(q, a) for q, a in registered if a in wanted]

    statuses = [_norm_status(traj, q, a) for q, a in pairs]

    if c_bound is None:
        c_bound = traj.monitors.c_bound
    min_kappa = min(r.min_kappa for r in traj.records)
    lower_bound_held = True if c_bound is None else bool(min_kappa >= -c_bound)
    mean_convex = bool(traj.records[0].min_H > 0)

    criteria = [
        _verdict(
            "spacetime_A_criterion", {}, _critical(statuses, "A", n), blowup, required=True,
        ),
        _verdict(
            "lower_bound_H_criterion", {"curvature_lower_bound": lower_bound_held},
            _critical(statuses, "H", n), blowup, required=lower_bound_held,
        ),
        _verdict(
            "mean_convex_H_criterion", {"initially_mean_convex": mean_convex},
            _critical(statuses, "H", n), blowup, required=mean_convex,
        ),
    ]

    snapshots = [_snapshot_status(traj, a) for q, a in pairs if q == "A" and a > n]
    criteria.append(_verdict_snapshot(snapshots, blowup))

    known = [c.consistent for c in criteria if c.consistent is not None]
    consistent = all(known)
    if not blowup:
        verdict = "no obstruction witnessed"
    elif consistent:
        verdict = "blow-up with diverging critical norms"
    else:
        verdict = "blow-up inconsistent with a finite critical norm"

    logger.info("Extension verdict: %s", verdict)
    return ExtensionReport(
        n=n,
        stop_reason=traj.stop_reason,
        t_final=traj.t_final,
        statuses=statuses,
        criteria=criteria,
        consistent=consistent,
        verdict=verdict,
    )


def _verdict_snapshot(snapshots: List[NormStatus], blowup: bool) -> CriterionVerdict:
    # alpha = n is scale invariant and stays bounded on shrinking spheres,
    # so only alpha > n is read
    if not snapshots:
        return CriterionVerdict(
            name="spatial_snapshot_criterion", consistent=None,
            diagnosis="no |A| accumulator with alpha > n registered",
        )
    return _verdict("spatial_snapshot_criterion", {}, snapshots, blowup, required=True)
