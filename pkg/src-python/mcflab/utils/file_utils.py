"""File utility functions for run artifacts."""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
from pydantic import BaseModel

from ..errors import InvariantViolation
from .flow_utils import FlowTrajectory
from .monitor_utils import column_name

STEP_COLUMNS = ["step", "t", "dt", "max_A2", "max_H2", "min_kappa", "min_H", "area"]


def artifact_sizes(out_dir: Union[str, Path], artifacts: Dict[str, str]) -> Dict[str, int]:
    """Byte size of every artifact listed relative to ``out_dir``.

    Raises InvariantViolation when a listed file is missing.
    """
    root = Path(out_dir)
    sizes: Dict[str, int] = {}
    for name, relative in artifacts.items():
        path = root / relative
        if not path.is_file():
            raise InvariantViolation(f"artifact {name!r} missing at {path}")
        sizes[relative] = path.stat().st_size
    return sizes


def ensure_directory(path: Union[str, Path]) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def sha256_file(file_path: Union[str, Path]) -> str:
    """Hex SHA-256 digest of a file's contents."""
    digest = hashlib.sha256()
    with open(file_path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def csv_header(traj: FlowTrajectory) -> List[str]:
    return STEP_COLUMNS + [column_name(pair) for pair in traj.accumulator.pairs]


def steps_dataframe(traj: FlowTrajectory) -> pd.DataFrame:
    """One row per StepRecord, in the fixed column order."""
    pairs = traj.accumulator.pairs
    rows = [
        [r.step, r.t, r.dt, r.max_A2, r.max_H2, r.min_kappa, r.min_H, r.area]
        + [r.accumulators[pair] for pair in pairs]
        for r in traj.records
    ]
    return pd.DataFrame(rows, columns=csv_header(traj))


def write_steps_csv(traj: FlowTrajectory, path: Union[str, Path]) -> Path:
    """Write steps.csv with round-trip float precision."""
    path = Path(path)
    steps_dataframe(traj).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def write_json(path: Union[str, Path], payload: Union[BaseModel, Dict[str, Any]]) -> Path:
    """Write a model or plain dict as indented JSON."""
    path = Path(path)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    return path
