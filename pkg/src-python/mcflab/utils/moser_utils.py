"""Sobolev constant and the Moser-iteration sup bound for H².

The bound checked at runtime is

    max_{M x [T0/2, T0]} H² <= C₂(T0/2) (∫₀^T0 ∫_M |H|^{n+2} dμ dt)^{2/(n+2)}

with

    β    = 2 sup|A|²
    p₀   = (n + 2) / 2,  μ = 1 + 2/n,  p_k = p₀ μ^k
    s    = sqrt((2/n)(p₀ - 1) T0 β) (n - 2) / sqrt(n (p₀ - 1))
    D    = sqrt((n - 1) p₀) C(n) / ((n - 2) sqrt(p₀ - 1))
    C₂(t) = D^{2n/(n+2)} μ^{n/2} ((n + 2) β / 2 + (n + 2) / (2 t))
"""

import logging
import math
from typing import Optional

from ..errors import DimensionTooSmall, MissingAccumulator, NonPositiveInputs, TrajectoryTooShort
from ..models.base import StopReason
from ..models.report_models import MoserBoundReport, MoserConstants
from .flow_utils import FlowTrajectory
from .geometry_utils import unit_ball_volume

logger = logging.getLogger(__name__)

ITERATION_TERMS = 8
TIME_SLACK = 1e-12


def _require_dimension(n: int) -> None:
    if n < 3:
        raise DimensionTooSmall(f"the Sobolev inequality used here needs n >= 3, got n = {n}")


def sobolev_constant(n: int) -> float:
    """C(n) = 2^n (1 + n)^{1 + 1/n} / ((n - 1) σ_n), σ_n the unit-ball volume in R^{n+1}."""
    _require_dimension(n)
    sigma = unit_ball_volume(n + 1)
    return 2.0**n * (1.0 + n) ** (1.0 + 1.0 / n) / ((n - 1) * sigma)


def moser_constants(n: int, T0: float, sup_A: float, t: float) -> MoserConstants:
    """Evaluate the constant chain at time t (clipped to T0)."""
    _require_dimension(n)
    if not (T0 > 0 and sup_A > 0 and t > 0):
        raise NonPositiveInputs(f"T0, sup_A and t must be positive (got {T0}, {sup_A}, {t})")
    if t > T0:
        logger.debug("clipping t=%g to T0=%g", t, T0)
        t = T0

    beta = 2.0 * sup_A**2
    c_n = sobolev_constant(n)
    p0 = 0.5 * (n + 2)
    mu = 1.0 + 2.0 / n
    s = math.sqrt((2.0 / n) * (p0 - 1.0) * T0 * beta) * (n - 2) / math.sqrt(n * (p0 - 1.0))
    d = math.sqrt((n - 1) * p0) * c_n / ((n - 2) * math.sqrt(p0 - 1.0))
    c2 = d ** (2.0 * n / (n + 2)) * mu ** (0.5 * n) * (0.5 * (n + 2) * beta + (n + 2) / (2.0 * t))

    return MoserConstants(
        n=n,
        T0=T0,
        sup_A=sup_A,
        t=t,
        beta=beta,
        sobolev=c_n,
        p0=p0,
        s=s,
        D=d,
        mu=mu,
        p_sequence=[p0 * mu**k for k in range(ITERATION_TERMS)],
        c2=c2,
    )


def verify_moser_bound(traj: FlowTrajectory, T0: Optional[float] = None) -> MoserBoundReport:
    """Check the sup bound for H² on [T0/2, T0] against the critical H accumulator."""
    n = traj.n
    _require_dimension(n)
    if traj.stop_reason is not StopReason.REACHED_T_CAP:
        raise TrajectoryTooShort(f"run stopped with {traj.stop_reason}; need a smooth interval")

    t_last = traj.records[-1].t
    if T0 is None:
        T0 = t_last
    if T0 <= 0 or t_last < T0 * (1.0 - TIME_SLACK):
        raise TrajectoryTooShort(f"trajectory ends at {t_last}, before T0 = {T0}")

    pair = ("H", float(n + 2))
    if pair not in traj.accumulator.pairs:
        raise MissingAccumulator(f"run did not accumulate |H|^{n + 2}")

    covered = [r for r in traj.records if r.t <= T0 * (1.0 + TIME_SLACK)]
    late = [r for r in covered if r.t >= 0.5 * T0 * (1.0 - TIME_SLACK)]
    lhs = max(r.max_H2 for r in late)
    sup_a = math.sqrt(max(r.max_A2 for r in covered))
    accumulated = covered[-1].accumulators[pair]

    constants = moser_constants(n, T0, sup_a, 0.5 * T0)
    rhs = constants.c2 * accumulated ** (2.0 / (n + 2))
    margin = rhs - lhs
    if margin < 0:
        logger.warning("Sup bound falsified: lhs %.6g exceeds rhs %.6g", lhs, rhs)

    return MoserBoundReport(
        n=n,
        T0=T0,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        falsified=margin < 0,
        accumulator=accumulated,
        constants=constants,
    )
