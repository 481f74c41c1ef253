"""Affine p-Laplacian toolkit.

Affine energies, affine eigenvalue problems, Cheeger constants, and the
convex-geometry machinery (polar, centroid, and projection bodies) needed to
verify the affine functional inequalities they satisfy, on discretized
two-dimensional domains.
"""
from __future__ import annotations

__version__ = "0.1.0"

from . import (
    cheeger,
    constants,
    eigensolver,
    funcspace,
    geometry,
    operators,
    tolerances,
    verify,
)

__all__ = ["cheeger", "constants", "eigensolver", "funcspace", "geometry",
           "operators", "tolerances", "verify", "__version__"]
