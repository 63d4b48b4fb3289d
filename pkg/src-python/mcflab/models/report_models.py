"""Report models exported to JSON by the monitors, analysis checks and commands."""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from .base import StopReason, ToolInfo

NormStatusKind = Literal["finite", "diverging", "undetermined"]


class MonitorRow(BaseModel):
    """Hypothesis diagnostics for one recorded frame."""
    t: float
    min_kappa: float
    min_H: float
    max_pinching: Optional[float] = None  # only when min_H > 0
    shifted_excess: Optional[float] = None  # only with a curvature bound
    violations: List[str] = []


class MonitorEvent(BaseModel):
    """A hypothesis violation detected between consecutive records."""
    step: int
    t: float
    kind: str
    value: float


class AccumulatorEntry(BaseModel):
    """Final state of one (quantity, alpha) accumulator."""
    quantity: str
    alpha: float
    integral: float
    norm: float
    snapshot: Optional[float] = None


class DichotomyFit(BaseModel):
    """Power-law fit of the spatial integrand rate against the time to blow-up."""
    quantity: str
    alpha: float
    n: int
    t_est: float
    t_est_source: Literal["oracle", "extrapolated"]
    fitted_exponent: float
    expected_exponent: float
    kind: Literal["finite", "logarithmic", "power"]
    finite_estimate: Optional[float] = None
    divergence_exponent: Optional[float] = None
    samples: int
    decades: float
    widened: bool = False  # fit window grew past one decade
    rate_monotone: bool


class HolderCheck(BaseModel):
    """‖q‖_{n+2} against its Hölder bound ‖q‖_alpha · V^{1/(n+2) - 1/alpha}."""
    quantity: str
    alpha: float
    critical: float
    critical_norm: float
    bound: float
    holds: bool


class MonitorReport(BaseModel):

    """Everything the monitors know about one run."""
    n: int
    stop_reason: Optional[StopReason] = None
    c_bound: Optional[float] = None
    tightest_c: float
    rescaled_lower_bound: Optional[float] = None
    rows: List[MonitorRow] = []
    events: List[MonitorEvent] = []
    accumulators: List[AccumulatorEntry] = []
    dichotomy: List[DichotomyFit] = []
    holder: List[HolderCheck] = []


class InvarianceResult(BaseModel):
    """Comparison of a curvature integral before and after parabolic rescaling."""
    mode: Literal["spacetime", "spatial"]
    quantity: str
    alpha: float
    scale: float
    original: float
    rescaled: float
    ratio: float
    expected_ratio: float
    deviation: float
    invariant: bool


class MoserConstants(BaseModel):
    """The constant chain of the sup bound for H² in terms of the critical space-time norm."""
    n: int
    T0: float
    sup_A: float
    t: float
    beta: float
    sobolev: float
    p0: float
    s: float
    D: float
    mu: float
    p_sequence: List[float]
    c2: float


class MoserBoundReport(BaseModel):
    """Runtime check of max H² <= C₂ (∫∫|H|^{n+2})^{2/(n+2)} on [T0/2, T0]."""
    n: int
    T0: float
    lhs: float
    rhs: float
    margin: float
    falsified: bool
    accumulator: float
    constants: MoserConstants


class NormStatus(BaseModel):
    """Finite/diverging diagnosis of one space-time norm."""
    quantity: str
    alpha: float
    status: NormStatusKind
    fit: Optional[DichotomyFit] = None


class CriterionVerdict(BaseModel):
    """One extension criterion evaluated on a trajectory."""
    name: str
    hypotheses: Dict[str, bool] = {}
    norms: List[NormStatus] = []
    consistent: Optional[bool] = None
    diagnosis: str


class ExtensionReport(BaseModel):
    """Extension-criterion verdicts for a finished run."""
    n: int
    stop_reason: StopReason
    t_final: float
    statuses: List[NormStatus] = []
    criteria: List[CriterionVerdict] = []
    consistent: bool
    verdict: str


class CheckResult(BaseModel):
    """One measured check inside a verification suite."""
    name: str
    passed: bool
    measured: Dict[str, Any] = {}
    threshold: Optional[float] = None
    error: Optional[str] = None


class VerifyReport(BaseModel):
    """Outcome of a verification suite."""
    suite: str
    passed: bool
    checks: List[CheckResult] = []


class OracleResult(BaseModel):
    """Closed-form shrinking-sphere values for the `oracle` command."""
    n: int
    r0: float
    alpha: float
    quantity: str
    t_end: float
    T: float
    radius: float
    H: Optional[float] = None  # None at the singular time
    integral: Optional[float] = None
    norm: Optional[float] = None
    divergent: bool = False
    quadrature: Optional[float] = None
    relative_error: Optional[float] = None


class RunManifest(BaseModel):
    """Provenance record written next to every run's artifacts."""
    tool: ToolInfo
    config: Dict[str, Any]
    artifacts: Dict[str, str] = {}
    checksums: Dict[str, str] = {}
    sizes: Dict[str, int] = {}
    stop_reason: Optional[StopReason] = None
    steps: int = 0
    t_final: float = 0.0
    wall_clock_s: float = 0.0
    success: bool
    error: Optional[str] = None
    extra: Dict[str, Any] = Field(default_factory=dict)
