"""`run` command: execute one configured flow and persist its artifacts."""

import argparse
import logging
import time
from pathlib import Path
from typing import Optional

from tabulate import tabulate

from ..errors import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_OK,
    BadShapeParameters,
    ConfigurationError,
    InvalidImmersion,
    MCFLabError,
)
from ..models.base import get_tool_info
from ..models.config_models import GeometrySettings, RunConfig
from ..models.report_models import RunManifest
from ..utils.extension_utils import extension_report
from ..utils.file_utils import artifact_sizes, ensure_directory, sha256_file, write_json, write_steps_csv
from ..utils.flow_utils import FlowTrajectory, run_flow
from ..utils.geometry_utils import Immersion
from ..utils.monitor_utils import build_monitor_report
from ..utils.oracle_utils import make_initial
from ..utils.plot_utils import plot_accumulators, plot_radius

logger = logging.getLogger(__name__)


def build_initial(settings: GeometrySettings, resolution: Optional[int] = None) -> Immersion:
    """Initial immersion described by a geometry section; `m` falls back to the flow resolution."""
    m = settings.m if settings.m is not None else resolution
    return make_initial(settings.kind, settings.params, m=m, n=settings.n)


def write_run_artifacts(traj: FlowTrajectory, config: RunConfig, out_dir: Path, started: float) -> RunManifest:
    """Write steps.csv, report.json, plots and manifest.json for a finished run."""
    out_dir = ensure_directory(out_dir)
    plots_dir = ensure_directory(out_dir / "plots")

    csv_path = write_steps_csv(traj, out_dir / "steps.csv")
    report = {
        "monitors": build_monitor_report(traj).model_dump(mode="json"),
        "extension": extension_report(traj).model_dump(mode="json"),
    }
    report_path = write_json(out_dir / "report.json", report)
    radius_path = plot_radius(traj, plots_dir / "radius.svg")
    accumulator_path = plot_accumulators(traj, plots_dir / "accumulators.svg")

    artifacts = {
        "steps": csv_path.name,
        "report": report_path.name,
        "radius_plot": radius_path.relative_to(out_dir).as_posix(),
        "accumulator_plot": accumulator_path.relative_to(out_dir).as_posix(),
    }
    manifest = RunManifest(
        tool=get_tool_info(),
        config=config.model_dump(mode="json", by_alias=True),
        artifacts=artifacts,
        checksums={csv_path.name: sha256_file(csv_path)},
        sizes=artifact_sizes(out_dir, artifacts),
        stop_reason=traj.stop_reason,
        steps=len(traj.records),
        t_final=traj.t_final,
        wall_clock_s=time.perf_counter() - started,
        success=True,
    )
    write_json(out_dir / "manifest.json", manifest)
    return manifest


def _write_failure(config: RunConfig, out_dir: Path, started: float, error: Exception) -> None:
    write_json(ensure_directory(out_dir) / "manifest.json", RunManifest(
        tool=get_tool_info(),
        config=config.model_dump(mode="json", by_alias=True),
        wall_clock_s=time.perf_counter() - started,
        success=False,
        error=str(error),
    ))


def _summary_table(traj: FlowTrajectory) -> str:
    last = traj.records[-1]
    rows = [
        ["stop reason", traj.stop_reason.value],
        ["steps", len(traj.records)],
        ["t", f"{last.t:.10g}"],
        ["max |A|²", f"{last.max_A2:.6g}"],
        ["max H²", f"{last.max_H2:.6g}"],
        ["min kappa", f"{last.min_kappa:.6g}"],
        ["area", f"{last.area:.10g}"],
    ]
    rows += [[f"∫∫|{q}|^{a:g}", f"{v:.10g}"] for (q, a), v in traj.accumulator.values.items()]
    return tabulate(rows, headers=["Quantity", "Value"], tablefmt="grid")


def cmd_run(config_path: str) -> int:
    """Run the flow described by a JSON config; returns the process exit code."""
    started = time.perf_counter()
    logger.info("🚀 Running flow from %s", config_path)

    try:
        config = RunConfig.from_file(config_path)
        initial = build_initial(config.geometry, config.flow.resolution)
    except (ConfigurationError, BadShapeParameters) as e:
        logger.error("❌ Configuration error: %s", e)
        return EXIT_CONFIG

    out_dir = config.output_dir()
    try:
        traj = run_flow(initial, config.flow, config.monitors)
    except InvalidImmersion as e:
        logger.error("❌ Initial shape rejected: %s", e)
        return EXIT_CONFIG
    except MCFLabError as e:
        logger.error("❌ Flow failed: %s", e)
        _write_failure(config, out_dir, started, e)
        return EXIT_FAILURE

    try:
        manifest = write_run_artifacts(traj, config, out_dir, started)
    except MCFLabError as e:
        logger.error("❌ Writing artifacts failed: %s", e)
        _write_failure(config, out_dir, started, e)
        return EXIT_FAILURE

    print(_summary_table(traj))
    logger.info(
        "✅ %s after %d steps; artifacts in %s", manifest.stop_reason.value, manifest.steps, out_dir
    )
    return EXIT_OK


def register_run_commands(subparsers: "argparse._SubParsersAction") -> None:
    """Register the `run` command."""
    parser = subparsers.add_parser("run", help="run a flow from a JSON config")
    parser.add_argument("config", help="path to the run configuration (JSON)")
    parser.set_defaults(handler=lambda args: cmd_run(args.config))
