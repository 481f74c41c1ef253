"""Central tolerance table for the verification harness.

Every acceptance threshold used by :mod:`affinepl.verify` lives here — never
inline a tolerance at a call site.  A report passes when its margin is at
least ``-tol(key)``; margins are relative unless the row says otherwise.

Calibration notes (all measured on this implementation):

* ``solver`` (3%) is the honest accuracy of eigenvalue comparisons at
  h = 1/64, M = 64: staircase boundary resolution is first-order in h for
  curved or sheared domains, and direction quadrature adds O(M^-2).
* ``solver-strong-shear`` (5%) covers |shear| >= 2 rows, which the harness
  automatically solves at h/2 — stronger anisotropy needs the finer grid.
* ``inequality-slack`` (1e-8) is pure roundoff headroom: the functional
  inequalities hold with real margins on the test corpus, so any dip below
  -1e-8 is a genuine failure, not noise.
* ``bp-slack`` (1e-6): the centroid-body volume excess on the equality
  family (ellipses) measures >= -5.7e-7 at 4096 directions; the floor is
  quadrature error, not a violated inequality.
* ``identity`` (1e-6) for closed-form identities; ``rayleigh-equality``
  (1e-10) when a solved quotient is merely re-evaluated or rescaled.
"""
from __future__ import annotations

from types import MappingProxyType

__all__ = ["TABLE", "tol"]

TABLE = MappingProxyType({
    # closed-form identities (exact geometry, constants, homogeneity laws)
    "identity": 1e-6,
    # functional inequalities on the test-function corpus (roundoff headroom)
    "inequality-slack": 1e-8,
    # re-evaluating / rescaling an already-solved Rayleigh quotient
    "rayleigh-equality": 1e-10,
    # solver-derived eigenvalue comparisons at h = 1/64, M = 64
    "solver": 0.03,
    # |shear| >= 2 invariance rows, solved at h/2
    "solver-strong-shear": 0.05,
    # minimum classical-eigenvalue movement under a unit shear
    "classical-contrast": 0.10,
    # strict sign checks (margin must be nonnegative outright)
    "positive": 0.0,
    # centroid-body volume excess floor (direction-quadrature error on the
    # equality family at 4096 directions)
    "bp-slack": 1e-6,
    # volume-product upper bound slack
    "santalo-slack": 1e-9,
    # relative closeness that flags an equality case in the geometry corpus
    "equality-flag": 1e-4,
    # near-equality of the upper comparison for radial test functions
    "radial-tight": 1e-3,
})


def tol(key: str) -> float:
    """Look up a tolerance by its table key."""
    try:
        return TABLE[key]
    except KeyError:
        known = ", ".join(sorted(TABLE))
        raise KeyError(f"unknown tolerance key {key!r}; known keys: {known}") from None
