"""`oracle` command: closed-form shrinking-sphere values with a quadrature cross-check."""

import argparse
import json
import logging
import math

from tabulate import tabulate

from ..errors import EXIT_CONFIG, EXIT_OK, BadShapeParameters
from ..models.report_models import OracleResult
from ..utils.oracle_utils import SphereSolution, sphere_norm_quadrature, sphere_spacetime_norm

logger = logging.getLogger(__name__)


def _parse_t_end(raw: str, T: float) -> float:
    if raw.strip().upper() == "T":
        return T
    return float(raw)


def evaluate_oracle(n: int, r0: float, alpha: float, t_end: float, quantity: str = "H") -> OracleResult:
    """Closed-form values at t_end plus the space-time norm and its quadrature check."""
    solution = SphereSolution(n, r0)
    T = solution.T
    if not 0 < t_end <= T:
        raise ValueError(f"t_end must lie in (0, T={T:.10g}], got {t_end}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    at_singularity = t_end >= T
    radius = 0.0 if at_singularity else solution.radius(t_end)
    h_value = None if at_singularity else solution.H(t_end)

    integral = sphere_spacetime_norm(n, r0, alpha, t_end, quantity)
    divergent = math.isinf(integral)
    quadrature = None
    relative_error = None
    if not divergent:
        quadrature = sphere_norm_quadrature(n, r0, alpha, t_end, quantity)
        relative_error = abs(quadrature - integral) / abs(integral)

    return OracleResult(
        n=n,
        r0=r0,
        alpha=alpha,
        quantity=quantity,
        t_end=t_end,
        T=T,
        radius=radius,
        H=h_value,
        integral=None if divergent else integral,
        norm=None if divergent else integral ** (1.0 / alpha),
        divergent=divergent,
        quadrature=quadrature,
        relative_error=relative_error,
    )


def _format(value) -> str:
    if value is None:
        return "∞"
    return f"{value:.15g}"


def cmd_oracle(n: int, r0: float, alpha: float, t_end: str, as_json: bool = False, quantity: str = "H") -> int:
    """Print shrinking-sphere oracle values; exit 2 on bad parameters."""
    try:
        T = SphereSolution(n, r0).T
        result = evaluate_oracle(n, r0, alpha, _parse_t_end(t_end, T), quantity)
    except (BadShapeParameters, ValueError) as e:
        logger.error("❌ Bad oracle parameters: %s", e)
        return EXIT_CONFIG

    if as_json:
        print(json.dumps(result.model_dump(mode="json"), indent=2))
        return EXIT_OK

    rows = [
        ["T", _format(result.T)],
        ["r(t_end)", _format(result.radius)],
        ["H(t_end)", _format(result.H)],
        [f"∫∫|{quantity}|^{alpha:g} dμ dt", _format(result.integral)],
        ["norm", _format(result.norm)],
        ["quadrature", "-" if result.quadrature is None else _format(result.quadrature)],
        ["relative error", "-" if result.relative_error is None else f"{result.relative_error:.3e}"],
    ]
    print(tabulate(rows, headers=["Quantity", "Value"], tablefmt="grid"))
    return EXIT_OK


def register_oracle_commands(subparsers: "argparse._SubParsersAction") -> None:
    """Register the `oracle` command."""
    parser = subparsers.add_parser("oracle", help="shrinking-sphere closed forms")
    parser.add_argument("--n", type=int, required=True, help="hypersurface dimension")
    parser.add_argument("--r0", type=float, default=1.0, help="initial radius")
    parser.add_argument("--alpha", type=float, default=2.0, help="norm exponent")
    parser.add_argument("--t-end", default="T", help="end time, or T for the singular time")
    parser.add_argument("--quantity", choices=["H", "A"], default="H")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="debug logging")
    parser.set_defaults(
        handler=lambda args: cmd_oracle(args.n, args.r0, args.alpha, args.t_end, args.json, args.quantity)
    )
