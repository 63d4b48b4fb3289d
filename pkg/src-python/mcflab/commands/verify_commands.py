"""`verify` command: run one of the numerical check suites."""

import argparse
import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from ..errors import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, MCFLabError, BadShapeParameters, ConfigurationError
from ..models.config_models import (
    DichotomySuiteConfig,
    EvolutionSuiteConfig,
    FlowConfig,
    InvarianceSuiteConfig,
    MonitorSet,
    MoserSuiteConfig,
    SuiteConfig,
    load_config,
)
from ..models.report_models import CheckResult, VerifyReport
from ..utils.evolution_utils import evolution_residual
from ..utils.file_utils import ensure_directory, write_json
from ..utils.flow_utils import run_flow
from ..utils.geometry_utils import AnalyticSphere
from ..utils.monitor_utils import widening_fit
from ..utils.moser_utils import verify_moser_bound
from ..utils.oracle_utils import SphereSolution, make_initial, sphere_spacetime_norm
from ..utils.rescale_utils import RescaleSpec, parabolic_rescale, spacetime_norm_invariance_check

logger = logging.getLogger(__name__)

FINITE_LIMIT_TOLERANCE = 0.01


def _evolution_checks(config: EvolutionSuiteConfig) -> List[CheckResult]:
    residuals: Dict[int, Dict[str, float]] = {}
    for m in config.resolutions:
        initial = make_initial(config.geometry.kind, config.geometry.params, m=m, n=config.geometry.n)
        traj = run_flow(initial, FlowConfig(t_cap=config.t_cap, c_stab=config.c_stab))
        t_mid = 0.5 * config.t_cap
        k = int(np.argmin([abs(kf.t - t_mid) for kf in traj.frames[1:-1]])) + 1
        residuals[m] = {
            eq: float(np.nanmax(np.abs(evolution_residual(traj, k, eq)))) for eq in config.equations
        }
        logger.info("📊 m=%d residuals: %s", m, residuals[m])

    checks = []
    sizes = sorted(residuals)
    for coarse, fine in zip(sizes, sizes[1:]):
        for eq in config.equations:
            order = math.log(residuals[coarse][eq] / residuals[fine][eq]) / math.log(fine / coarse)
            checks.append(CheckResult(
                name=f"{eq}_order_{coarse}_{fine}",
                passed=order >= config.min_order,
                measured={"order": order, "coarse": residuals[coarse][eq], "fine": residuals[fine][eq]},
                threshold=config.min_order,
            ))
    return checks


def _invariance_checks(config: InvarianceSuiteConfig) -> List[CheckResult]:
    n = config.n
    solution = SphereSolution(n, config.r0)
    monitors = MonitorSet(quantities=["A", "H"], alphas=[float(n), float(n + 1), float(n + 2)])
    traj = run_flow(
        AnalyticSphere(config.r0, n),
        FlowConfig(t_cap=config.t_end_fraction * solution.T, c_stab=config.c_stab),
        monitors,
    )
    t_center = config.center_fraction * traj.t_final
    centre = min(traj.frames, key=lambda kf: abs(kf.t - t_center))

    checks = []
    for q in config.scales:
        spec = RescaleSpec(Q=q, t_center=centre.t)
        cases = [
            ("spacetime", float(n + 2)),
            ("spatial", float(n)),
            ("spatial", float(n + 1)),
            ("spacetime", float(n)),
        ]
        for mode, alpha in cases:
            result = spacetime_norm_invariance_check(traj, spec, "A", alpha, mode=mode)
            checks.append(CheckResult(
                name=f"{mode}_A_{alpha:g}_Q{q:g}",
                passed=result.deviation <= config.tolerance,
                measured=result.model_dump(),
                threshold=config.tolerance,
            ))

    spec = RescaleSpec(Q=centre.frame.max_A2, t_center=centre.t, tau_end=0.0)
    rescaled = parabolic_rescale(traj, spec)
    peak = rescaled.frames[-1].frame.max_A2
    checks.append(CheckResult(
        name="normalized_curvature",
        passed=abs(peak - 1.0) <= config.tolerance,
        measured={"max_A2": peak},
        threshold=config.tolerance,
    ))
    return checks


def _moser_checks(config: MoserSuiteConfig) -> List[CheckResult]:
    n = config.n
    monitors = MonitorSet(quantities=["H"], alphas=[float(n + 2)])
    checks = []
    for r0 in config.radii:
        T = SphereSolution(n, r0).T
        for fraction in config.time_fractions:
            traj = run_flow(AnalyticSphere(r0, n), FlowConfig(t_cap=fraction * T, c_stab=config.c_stab), monitors)
            report = verify_moser_bound(traj)
            checks.append(CheckResult(
                name=f"moser_r{r0:g}_T{fraction:g}",
                passed=not report.falsified,
                measured={"lhs": report.lhs, "rhs": report.rhs, "margin": report.margin},
                threshold=0.0,
            ))
    return checks


def _dichotomy_checks(config: DichotomySuiteConfig) -> List[CheckResult]:
    checks = []
    for n in config.dimensions:
        T = SphereSolution(n, config.r0).T
        alphas = [float(n + 2 + offset) for offset in config.offsets if n + 2 + offset > 0]
        monitors = MonitorSet(quantities=[config.quantity], alphas=alphas)
        flow = FlowConfig(t_cap=T, c_stab=config.c_stab, blowup_threshold=config.blowup_threshold)
        traj = run_flow(AnalyticSphere(config.r0, n), flow, monitors)

        for alpha in alphas:
            name = f"dichotomy_n{n}_{config.quantity}_{alpha:g}"
            try:
                fit = widening_fit(traj, config.quantity, alpha)
            except MCFLabError as e:
                checks.append(CheckResult(name=name, passed=False, error=str(e)))
                continue

            measured = fit.model_dump()
            if alpha < n + 2:
                exact = sphere_spacetime_norm(n, config.r0, alpha, T, config.quantity)
                error = None
                if fit.finite_estimate is not None:
                    error = abs(fit.finite_estimate - exact) / exact
                measured["exact"] = exact
                measured["relative_error"] = error
                passed = error is not None and error <= FINITE_LIMIT_TOLERANCE
                threshold = FINITE_LIMIT_TOLERANCE
            elif alpha == n + 2:
                passed = fit.kind == "logarithmic" and abs(fit.fitted_exponent + 1.0) <= config.tolerance
                threshold = config.tolerance
            else:
                expected = 0.5 * (alpha - n) - 1.0
                passed = (
                    fit.kind == "power"
                    and abs(fit.divergence_exponent - expected) <= config.tolerance
                )
                measured["expected_divergence_exponent"] = expected
                threshold = config.tolerance
            checks.append(CheckResult(name=name, passed=passed, measured=measured, threshold=threshold))
    return checks


SUITES: Dict[str, tuple] = {
    "evolution": (EvolutionSuiteConfig, _evolution_checks),
    "invariance": (InvarianceSuiteConfig, _invariance_checks),
    "moser": (MoserSuiteConfig, _moser_checks),
    "dichotomy": (DichotomySuiteConfig, _dichotomy_checks),
}


def cmd_verify(suite: str, config_path: Optional[str] = None) -> int:
    """Run a verification suite; exit 0 iff every check passes."""
    if suite not in SUITES:
        logger.error("❌ Unknown suite %r; choose from %s", suite, ", ".join(SUITES))
        return EXIT_CONFIG
    model, runner = SUITES[suite]
    checks_for: Callable[[SuiteConfig], List[CheckResult]] = runner

    try:
        config = load_config(model, config_path) if config_path else model()
    except ConfigurationError as e:
        logger.error("❌ Configuration error: %s", e)
        return EXIT_CONFIG

    logger.info("🚀 Verifying suite %s", suite)
    try:
        checks = checks_for(config)
    except BadShapeParameters as e:
        logger.error("❌ Configuration error: %s", e)
        return EXIT_CONFIG
    except MCFLabError as e:
        logger.error("❌ Suite %s aborted: %s", suite, e)
        checks = [CheckResult(name=f"{suite}_aborted", passed=False, error=str(e))]

    report = VerifyReport(suite=suite, passed=all(c.passed for c in checks), checks=checks)
    out_dir = ensure_directory(config.output_dir())
    write_json(out_dir / "report.json", report)

    for check in checks:
        status = "✅" if check.passed else "❌"
        logger.info("%s %s", status, check.name)
    logger.info("📊 %d/%d checks passed", sum(c.passed for c in checks), len(checks))
    return EXIT_OK if report.passed else EXIT_FAILURE


def register_verify_commands(subparsers: "argparse._SubParsersAction") -> None:
    """Register the `verify` command."""
    parser = subparsers.add_parser("verify", help="run a verification suite")
    parser.add_argument("suite", choices=sorted(SUITES), help="suite to run")
    parser.add_argument("config", nargs="?", default=None, help="suite configuration (JSON)")
    parser.set_defaults(handler=lambda args: cmd_verify(args.suite, args.config))
