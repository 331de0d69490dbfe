"""Solver and verification toolkit for prescribed-curvature equations of
horospherically convex hypersurfaces in hyperbolic space."""

from . import errors, symfunc

__all__ = ["errors", "symfunc"]
