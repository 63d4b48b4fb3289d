"""Pytest configuration and fixtures for mcflab tests."""

import json
import os
import sys

import pytest

# Add the src-python directory to the path for all tests
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src-python'))

from mcflab.models.config_models import FlowConfig, MonitorSet  # noqa: E402
from mcflab.utils.flow_utils import run_flow  # noqa: E402
from mcflab.utils.geometry_utils import AnalyticSphere  # noqa: E402
from mcflab.utils.oracle_utils import make_initial  # noqa: E402


@pytest.fixture
def unit_circle():
    """Unit circle sampled at 256 vertices."""
    return make_initial("circle", {"r0": 1.0}, m=256)


@pytest.fixture
def ellipse():
    """Ellipse with semi-axes 2 and 1 at 512 vertices."""
    return make_initial("ellipse", {"a": 2.0, "b": 1.0}, m=512)


@pytest.fixture
def sphere_profile():
    """Unit 2-sphere as a revolution profile with 512 meridian samples."""
    return make_initial("sphere_profile", {"r0": 1.0}, m=512, n=2)


@pytest.fixture(scope="session")
def sphere_blowup():
    """Factory for analytic unit-sphere runs stopped at the curvature threshold.

    Trajectories are cached per (n, alphas) for the session.
    """
    cache = {}

    def build(n, alphas=None, quantities=("A", "H"), c_stab=0.05):
        alphas = tuple(alphas or (float(n), float(n + 1), float(n + 2), float(n + 3)))
        key = (n, alphas, tuple(quantities), c_stab)
        if key not in cache:
            monitors = MonitorSet(quantities=list(quantities), alphas=list(alphas))
            config = FlowConfig(t_cap=1.0 / (2.0 * n), c_stab=c_stab)
            cache[key] = run_flow(AnalyticSphere(1.0, n), config, monitors)
        return cache[key]

    return build


@pytest.fixture
def write_config(tmp_path):
    """Write a JSON document to tmp_path and return its path as a string."""
    def write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


# Configure pytest markers
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
