"""mcflab - numerical laboratory for mean curvature flow.

Flows closed curves, hypersurfaces of revolution and round spheres, tracks
space-time curvature norms, and checks scale invariance, the curvature
evolution equations and sup bounds against exact shrinking spheres.
"""

# Version information
__version__ = "0.1.0"
__description__ = "Numerical laboratory for mean curvature flow"


def main(argv=None) -> int:
    from .app import main as app_main

    return app_main(argv)


__all__ = ["main"]
