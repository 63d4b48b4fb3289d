"""Pydantic models for configuration and reports."""

from .base import StopReason, ToolInfo, get_tool_info
from .config_models import (
    DichotomySuiteConfig,
    EvolutionSuiteConfig,
    FlowConfig,
    GeometrySettings,
    InvarianceSuiteConfig,
    MonitorSet,
    MoserSuiteConfig,
    OutputSettings,
    RunConfig,
    load_config,
)
from .report_models import (
    AccumulatorEntry,
    CheckResult,
    CriterionVerdict,
    DichotomyFit,
    ExtensionReport,
    HolderCheck,
    InvarianceResult,
    MonitorEvent,
    MonitorReport,
    MonitorRow,
    MoserBoundReport,
    MoserConstants,
    NormStatus,
    OracleResult,
    RunManifest,
    VerifyReport,
)

__all__ = [
    "StopReason", "ToolInfo", "get_tool_info",
    "DichotomySuiteConfig", "EvolutionSuiteConfig", "FlowConfig", "GeometrySettings",
    "InvarianceSuiteConfig", "MonitorSet", "MoserSuiteConfig", "OutputSettings", "RunConfig",
    "load_config",
    "AccumulatorEntry", "CheckResult", "CriterionVerdict", "DichotomyFit", "ExtensionReport",
    "HolderCheck", "InvarianceResult", "MonitorEvent", "MonitorReport", "MonitorRow", "MoserBoundReport",
    "MoserConstants", "NormStatus", "OracleResult", "RunManifest", "VerifyReport",
]
