"""Static SVG figures of a flow run."""

import logging
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .flow_utils import FlowTrajectory  # noqa: E402
from .geometry_utils import equivalent_radius  # noqa: E402
from .monitor_utils import column_name  # noqa: E402

logger = logging.getLogger(__name__)

# fixed element ids so that identical runs give identical files
matplotlib.rcParams["svg.hashsalt"] = "mcflab"
FIGURE_SIZE = (6.0, 4.0)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("wrote %s", path)
    return path


def plot_radius(traj: FlowTrajectory, path: Union[str, Path]) -> Path:
    """Equivalent radius of every kept frame against time."""
    times = [kf.t for kf in traj.frames]
    radii = [equivalent_radius(kf.immersion) for kf in traj.frames]

    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    ax.plot(times, radii, color="tab:blue", lw=1.5, label="equivalent radius")
    ax.set_xlabel("t")
    ax.set_ylabel("radius")
    ax.grid(alpha=0.3)
    ax.legend(loc="best")
    return _save(fig, Path(path))


def plot_accumulators(traj: FlowTrajectory, path: Union[str, Path]) -> Path:
    """Space-time accumulators against time on a log scale."""
    times = np.array([r.t for r in traj.records])

    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    for pair in traj.accumulator.pairs:
        values = np.array([r.accumulators[pair] for r in traj.records])
        positive = values > 0
        if positive.sum() >= 2:
            ax.plot(times[positive], values[positive], lw=1.2, label=column_name(pair))
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("accumulated integral")
    ax.grid(alpha=0.3, which="both")
    if ax.lines:
        ax.legend(loc="best", fontsize="small")
    return _save(fig, Path(path))
