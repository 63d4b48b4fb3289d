"""Numerical core: geometry, flow, monitors, analysis and oracles."""
