"""Classical and affine Cheeger ratios with a bounded parametric search.

The classical ratio of a candidate set C is perimeter/area (both exact from
the polygon/ellipse parametrization).  The affine ratio replaces the
perimeter by the directional p = 1 energy of the indicator,

    E_1(chi_C) = c_{2,1} * sqrt(2) * vol(polar projection body of C)^{-1/2},

computed through the exact closed-form polar projection volume, so disks give
2/r to machine precision and the determinant scaling law

    ratio(A C) = |det A|^{-1/2} * ratio(C)

holds to rounding (the polar projection volume transforms exactly; a sampled
quadrature would break the identity at its anisotropy error, ~1e-4).

The search is a deterministic sweep over parametric families inside the
domain — scaled disks, inscribed ellipses, rounded rectangles, and affine
images of a disk template — never a free-boundary optimization.  Minimizing
the affine ratio over affine images of one template is the same as
maximizing the volume of the placed copy (the ratio scales like
|det|^{-1/2}), which is why the affine winner is cross-checked against a
maximal-volume placement of its own shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants, geometry
from .geometry import ShapeSpec

__all__ = [
    "CheegerCandidate",
    "classical_cheeger_ratio",
    "affine_cheeger_ratio",
    "candidate_family",
    "cheeger_search",
    "rounded_rectangle",
]

FAMILIES = ("disk", "ellipse", "rounded-square", "affine-template")


@dataclass(frozen=True)
class CheegerCandidate:
    """A candidate set with both isoperimetric ratios."""

    set: ShapeSpec
    h1: float
    h1A: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.h1 > 0 and self.h1A > 0):
            raise ValueError("Cheeger ratios must be positive")


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------


def classical_cheeger_ratio(c: ShapeSpec) -> float:
    """Perimeter over area, both exact; 2/r for a disk of radius r."""
    area = c.area()
    if not area > 0:
        raise ValueError("degenerate candidate set")
    return c.perimeter() / area


def affine_cheeger_ratio(c: ShapeSpec) -> float:
    """Directional p = 1 energy of the indicator over the area.

    Equal to the classical ratio for disks and never above it (the
    directional energy never exceeds the perimeter).
    """
    area = c.area()
    if not area > 0:
        raise ValueError("degenerate candidate set")
    vol_polar = geometry.polar_projection_volume(c)
    energy = constants.c_np(2, 1.0) * math.sqrt(2.0) * vol_polar ** -0.5
    return energy / area


# ---------------------------------------------------------------------------
# Candidate families
# ---------------------------------------------------------------------------


def rounded_rectangle(x0: float, y0: float, x1: float, y1: float,
                      radius: float, arc_points: int = 16) -> ShapeSpec:
    """Rectangle with quarter-disk corners of the given radius (as a polygon).

    The corner arcs are inscribed polylines, so the shape is contained in the
    true rounded rectangle and in the rectangle itself.
    """
    w, h = x1 - x0, y1 - y0
    if not (w > 0 and h > 0):
        raise ValueError("rectangle requires x1 > x0 and y1 > y0")
    if not 0 < radius <= 0.5 * min(w, h):
        raise ValueError("corner radius must be in (0, min(width, height)/2]")
    corners = [(x1 - radius, y1 - radius, 0.0), (x0 + radius, y1 - radius, 0.5),
               (x0 + radius, y0 + radius, 1.0), (x1 - radius, y0 + radius, 1.5)]
    pts = []
    for cx, cy, phase in corners:
        for t in np.linspace(0.0, 0.5, arc_points):
            ang = (phase + t) * math.pi
            pts.append((cx + radius * math.cos(ang), cy + radius * math.sin(ang)))
    return ShapeSpec.polygon(pts, name=f"rounded-rectangle[r={radius:g}]")


def _contained(c: ShapeSpec, omega: ShapeSpec, tol: float = 1e-9) -> bool:
    """Exact support test of C against (an inscribed polygon of) Omega."""
    normals, offsets = geometry._omega_halfspaces(omega)
    scale = max(1.0, float(np.max(np.abs(offsets))))
    return bool(np.all(c.support(normals) <= offsets + tol * scale))


def _inscribed_radius(omega: ShapeSpec, center: np.ndarray) -> float:
    normals, offsets = geometry._omega_halfspaces(omega)
    return float(np.min(offsets - normals @ center))


def _max_ellipse_scale(omega: ShapeSpec, center: np.ndarray,
                       qinv: np.ndarray) -> float:
    """Largest s with {x: (x-c)^T Q (x-c) <= s^2} inside Omega (exact)."""
    normals, offsets = geometry._omega_halfspaces(omega)
    gauge = np.sqrt(np.einsum("ej,jk,ek->e", normals, qinv, normals))
    slack = offsets - normals @ center
    if np.any(slack <= 0):
        return 0.0
    return float(np.min(slack / gauge))


def candidate_family(name: str, omega: ShapeSpec, budget: int) -> list[ShapeSpec]:
    """Deterministic list of candidate sets of the named family inside omega."""
    if budget < 1:
        raise ValueError("budget must be positive")
    center = omega.centroid()
    if name == "disk":
        rmax = _inscribed_radius(omega, center)
        if rmax <= 0:
            return []
        n = max(4, min(budget, 32))
        return [ShapeSpec.disk((1.0 - 1e-12) * rmax * s, center)
                for s in np.linspace(0.35, 1.0, n)]
    if name == "ellipse":
        n_ratio = max(3, int(round(math.sqrt(max(budget, 9) / 2.0))))
        n_angle = max(2, min(budget // n_ratio, 16))
        out = []
        for ratio in np.geomspace(1.0 / 3.0, 3.0, n_ratio):
            for ang in np.linspace(0.0, math.pi, n_angle, endpoint=False):
                rot = np.array([[math.cos(ang), -math.sin(ang)],
                                [math.sin(ang), math.cos(ang)]])
                qinv = rot @ np.diag([ratio, 1.0 / ratio]) @ rot.T
                s = _max_ellipse_scale(omega, center, qinv)
                if s <= 0:
                    continue
                s *= 1.0 - 1e-12
                q = np.linalg.inv(qinv) / s**2
                out.append(ShapeSpec.ellipse(q, center,
                                             name=f"ellipse[{ratio:.3f},{ang:.3f}]"))
        return out
    if name == "rounded-square":
        if omega.kind != "polygon" or len(omega.vertices) != 4:
            raise ValueError("rounded-square family needs a rectangular domain")
        xs, ys = omega.vertices[:, 0], omega.vertices[:, 1]
        x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
        if not np.allclose(np.sort(xs), [x0, x0, x1, x1]) or \
                not np.allclose(np.sort(ys), [y0, y0, y1, y1]):
            raise ValueError("rounded-square family needs an axis-aligned rectangle")
        rmax = 0.5 * min(x1 - x0, y1 - y0)
        return [rounded_rectangle(x0, y0, x1, y1, rho)
                for rho in np.linspace(rmax / 33.0, rmax, 32, endpoint=False)]
    if name == "affine-template":
        normals, offsets = geometry._omega_halfspaces(omega)
        template = ShapeSpec.disk(1.0)
        n_shear = max(3, int(round(math.sqrt(max(budget, 9) / 3.0))))
        n_stretch = max(3, min(budget // n_shear, 11))
        out = []
        for sigma in np.linspace(-1.5, 1.5, n_shear):
            for s in np.geomspace(0.5, 2.0, n_stretch):
                base = np.array([[1.0, sigma], [0.0, 1.0]]) \
                    @ np.diag([math.sqrt(s), 1.0 / math.sqrt(s)])
                qinv_dir = base @ base.T  # unit disk image of `base`
                scale = _max_ellipse_scale(omega, center, qinv_dir)
                if scale <= 0:
                    continue
                a = (1.0 - 1e-12) * scale * base
                out.append(geometry.apply_linear(template, a, center))
        return out
    raise ValueError(f"unknown candidate family {name!r}; "
                     f"choose from {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def cheeger_search(omega: ShapeSpec, family, budget: int = 512,
                   objective: str = "affine") -> CheegerCandidate:
    """Best candidate of the family by the chosen ratio.

    ``family`` is a family name (comma-separated names allowed) or an
    iterable of candidate ShapeSpecs; candidates are kept only if they fit
    inside omega.  Ties break toward the smaller perimeter, then earlier
    enumeration (the sweeps are deterministic).  For the affine objective,
    the winner's area is compared against a maximal-volume placement of its
    own shape in omega — minimizing the affine ratio over affine images is
    the same as maximizing the placed volume, so a winner far from maximal
    volume signals a too-coarse family.
    """
    if objective not in ("affine", "classical"):
        raise ValueError(f"unknown objective {objective!r}")
    if isinstance(family, str):
        names = [part.strip() for part in family.split(",") if part.strip()]
        candidates: list[ShapeSpec] = []
        for nm in names:
            candidates.extend(candidate_family(nm, omega, budget))
    else:
        candidates = list(family)
    candidates = [c for c in candidates if _contained(c, omega)]
    if not candidates:
        raise ValueError("no feasible candidate inside the domain")

    best = None
    for idx, c in enumerate(candidates):
        h1 = classical_cheeger_ratio(c)
        h1a = affine_cheeger_ratio(c)
        score = (h1a if objective == "affine" else h1, c.perimeter(), idx)
        if best is None or score < best[0]:
            best = (score, c, h1, h1a)
    _, winner, h1, h1a = best

    meta = {"objective": objective, "n_candidates": len(candidates)}
    if objective == "affine":
        _, _, vol_max = geometry.maximal_volume_position(winner, omega,
                                                         budget=1500)
        meta["max_volume_ratio"] = winner.area() / vol_max
    return CheegerCandidate(set=winner, h1=h1, h1A=h1a, meta=meta)
