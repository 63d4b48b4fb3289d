"""Basic models shared across the application."""

from enum import Enum

from pydantic import BaseModel


class ToolInfo(BaseModel):
    """Tool information model, echoed into every run manifest."""
    name: str
    version: str
    description: str


class StopReason(str, Enum):
    """Why a flow run ended."""
    REACHED_T_CAP = "ReachedTCap"
    CURVATURE_BLOWUP = "CurvatureBlowup"
    STEP_UNDERFLOW = "StepUnderflow"
    GEOMETRY_DEGENERATE = "GeometryDegenerate"

    @property
    def near_singularity(self) -> bool:
        """True when the run stopped because the flow was approaching a singular time."""
        return self in (StopReason.CURVATURE_BLOWUP, StopReason.STEP_UNDERFLOW)


def get_tool_info() -> ToolInfo:
    """Get tool information."""
    from .. import __description__, __version__

    return ToolInfo(name="mcflab", version=__version__, description=__description__)
