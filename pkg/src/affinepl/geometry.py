"""Planar convex bodies, shape specifications, and convex-geometry functionals.

Two complementary representations are used throughout:

* :class:`ShapeSpec` — an exact description of a domain (polygon or ellipse,
  both closed under affine maps), supporting exact area/perimeter/support/
  width/containment queries.
* :class:`ConvexBody` — an origin-symmetric convex body sampled by its
  support function on a :class:`DirectionSet`, optionally carrying analytic
  support/radial callables.  This is the representation the affine-energy
  machinery produces (gauge bodies, centroid bodies, projection bodies).

The polar body is computed from the support samples by the discrete duality
maximum h_{K°}(eta) = max_i <eta, xi_i>_+ / h_K(xi_i); taking pointwise
reciprocals of the support values instead is wrong for anything that is not a
ball and the tests guard against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.special import ellipe

from . import constants

__all__ = [
    "DirectionSet",
    "ConvexBody",
    "ShapeSpec",
    "polar_body",
    "body_volume",
    "santalo_product",
    "centroid_body",
    "busemann_petty_margin",
    "width",
    "max_width",
    "polar_projection_body",
    "polar_projection_volume",
    "apply_linear",
    "apply_linear_body",
    "body_from_shape",
    "maximal_volume_position",
]

_SYMMETRY_TOL = 1e-10


class DirectionSet:
    """Uniform antipodally-symmetric direction grid on the unit circle.

    ``nodes`` is (M, 2), ``weights`` is (M,) summing to 2*pi.  The second
    half of the nodes is the exact negation of the first half so antipodal
    symmetry holds to the last bit.
    """

    __slots__ = ("m", "angles", "nodes", "weights")

    def __init__(self, angles: np.ndarray, nodes: np.ndarray, weights: np.ndarray):
        self.m = len(angles)
        self.angles = angles
        self.nodes = nodes
        self.weights = weights
        for arr in (self.angles, self.nodes, self.weights):
            arr.flags.writeable = False

    @classmethod
    def uniform(cls, m: int) -> "DirectionSet":
        if m % 4 != 0 or m < 8:
            raise ValueError(f"direction count must be a multiple of 4 and >= 8, got {m}")
        half = m // 2
        ang_half = 2.0 * math.pi * np.arange(half) / m
        nodes_half = np.column_stack([np.cos(ang_half), np.sin(ang_half)])
        nodes = np.vstack([nodes_half, -nodes_half])
        angles = np.concatenate([ang_half, ang_half + math.pi])
        weights = np.full(m, 2.0 * math.pi / m)
        return cls(angles, nodes, weights)

    def antipode_index(self) -> np.ndarray:
        half = self.m // 2
        return np.concatenate([np.arange(half) + half, np.arange(half)])


@dataclass
class ConvexBody:
    """Origin-symmetric convex body sampled by support values on directions.

    ``support_fn``/``radial_fn``, when present, evaluate the exact support or
    radial function at arbitrary (K, 2) direction arrays; otherwise queries
    off the sample grid use the outer polytope determined by the sampled
    support halfspaces.
    """

    directions: DirectionSet
    support: np.ndarray
    support_fn: object | None = None
    radial_fn: object | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=float)
        if self.support.shape != (self.directions.m,):
            raise ValueError("support samples must match the direction count")
        if not np.all(self.support > 0):
            raise ValueError("support function must be strictly positive")
        anti = self.support[self.directions.antipode_index()]
        scale = float(np.max(self.support))
        if np.max(np.abs(self.support - anti)) > _SYMMETRY_TOL * scale:
            raise ValueError("body is not origin-symmetric within tolerance")

    # -- evaluation ---------------------------------------------------------

    def support_at(self, v: np.ndarray) -> np.ndarray:
        """Support values at arbitrary directions (not necessarily unit)."""
        v = np.atleast_2d(np.asarray(v, dtype=float))
        if self.support_fn is not None:
            return np.asarray(self.support_fn(v), dtype=float)
        return _polytope_support(self.directions, self.support, v)

    def radial_samples(self) -> np.ndarray:
        """Radial function at the direction nodes.

        For sampled bodies this is the radial function of the outer polytope
        of the support halfspaces: r(xi_i) = min_j h_j / <xi_i, xi_j>_+.
        """
        if self.radial_fn is not None:
            return np.asarray(self.radial_fn(self.directions.nodes), dtype=float)
        nodes = self.directions.nodes
        r = np.empty(self.directions.m)
        chunk = 512
        for s in range(0, self.directions.m, chunk):
            dots = nodes[s : s + chunk] @ nodes.T
            with np.errstate(divide="ignore"):
                ratios = np.where(dots > 1e-12, self.support[None, :] / dots, np.inf)
            r[s : s + chunk] = ratios.min(axis=1)
        return r

    def volume(self) -> float:
        r = self.radial_samples()
        return float(np.sum(self.directions.weights * r**2) / 2.0)


def _polytope_support(directions: DirectionSet, support: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Support of the outer polytope  {x : <x, xi_i> <= h_i for all i}.

    Evaluated by intersecting the ray in direction v with the polar polygon
    conv{xi_i / h_i}; equivalent to the halfspace-intersection polytope but
    immune to redundant-constraint degeneracies.
    """
    m = directions.m
    w = directions.nodes / support[:, None]  # polar polygon vertices, CCW
    ang = np.arctan2(v[:, 1], v[:, 0]) % (2.0 * math.pi)
    step = 2.0 * math.pi / m
    j = np.floor(ang / step).astype(int) % m
    jn = (j + 1) % m
    wj, wjn = w[j], w[jn]
    delta = wjn - wj
    denom = wj[:, 0] * wjn[:, 1] - wj[:, 1] * wjn[:, 0]  # cross(w_j, w_{j+1}) > 0
    numer = v[:, 0] * delta[:, 1] - v[:, 1] * delta[:, 0]  # cross(v, delta)
    return numer / denom


# ---------------------------------------------------------------------------
# Shape specifications
# ---------------------------------------------------------------------------


class ShapeSpec:
    """Exact planar domain: convex/simple polygon or ellipse.

    Ellipses are stored as {x : (x-c)^T Q (x-c) <= 1} with Q symmetric
    positive definite.  Affine images of either kind are again polygons or
    ellipses, so transformed shapes normalize to a concrete kind on
    construction.
    """

    def __init__(self, kind: str, *, vertices=None, center=None, matrix=None, name: str = ""):
        self.kind = kind
        self.name = name
        if kind == "polygon":
            v = np.asarray(vertices, dtype=float)
            if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
                raise ValueError("polygon needs at least 3 planar vertices")
            if _shoelace(v) < 0:
                v = v[::-1].copy()
            if abs(_shoelace(v)) < 1e-14:
                raise ValueError("degenerate polygon (zero area)")
            _check_simple(v)
            self.vertices = v
            self.vertices.flags.writeable = False
        elif kind == "ellipse":
            self.center = np.asarray(center if center is not None else (0.0, 0.0), dtype=float)
            q = np.asarray(matrix, dtype=float)
            if q.shape != (2, 2) or abs(q[0, 1] - q[1, 0]) > 1e-12 * (1 + abs(q[0, 1])):
                raise ValueError("ellipse matrix must be symmetric 2x2")
            q = 0.5 * (q + q.T)
            eigs = np.linalg.eigvalsh(q)
            if eigs[0] <= 0:
                raise ValueError("ellipse matrix must be positive definite")
            self.matrix = q
            self.matrix.flags.writeable = False
            self.center.flags.writeable = False
        else:
            raise ValueError(f"unknown shape kind {kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def polygon(cls, vertices, name: str = "") -> "ShapeSpec":
        return cls("polygon", vertices=vertices, name=name)

    @classmethod
    def ellipse(cls, matrix, center=(0.0, 0.0), name: str = "") -> "ShapeSpec":
        return cls("ellipse", matrix=matrix, center=center, name=name)

    @classmethod
    def disk(cls, radius: float = 1.0, center=(0.0, 0.0), name: str = "disk") -> "ShapeSpec":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls.ellipse(np.eye(2) / radius**2, center, name=name)

    @classmethod
    def rectangle(cls, x0, y0, x1, y1, name: str = "rectangle") -> "ShapeSpec":
        if not (x1 > x0 and y1 > y0):
            raise ValueError("rectangle requires x1 > x0 and y1 > y0")
        return cls.polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], name=name)

    @classmethod
    def unit_square(cls) -> "ShapeSpec":
        return cls.rectangle(0.0, 0.0, 1.0, 1.0, name="unit-square")

    @classmethod
    def from_dict(cls, data: dict) -> "ShapeSpec":
        kind = data.get("kind")
        if kind == "polygon":
            return cls.polygon(data["vertices"], name=data.get("name", ""))
        if kind == "ellipse":
            return cls.ellipse(data["matrix"], data.get("center", (0.0, 0.0)),
                               name=data.get("name", ""))
        if kind == "transformed":
            base = cls.from_dict(data["base"])
            a = np.asarray(data["matrix"], dtype=float)
            t = np.asarray(data.get("translate", (0.0, 0.0)), dtype=float)
            return apply_linear(base, a, t)
        raise ValueError(f"unknown shape kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "polygon":
            return {"kind": "polygon", "vertices": self.vertices.tolist(), "name": self.name}
        return {
            "kind": "ellipse",
            "matrix": self.matrix.tolist(),
            "center": self.center.tolist(),
            "name": self.name,
        }

    # -- exact queries -------------------------------------------------------

    def area(self) -> float:
        if self.kind == "polygon":
            return _shoelace(self.vertices)
        return math.pi / math.sqrt(float(np.linalg.det(self.matrix)))

    def perimeter(self) -> float:
        if self.kind == "polygon":
            d = np.diff(np.vstack([self.vertices, self.vertices[:1]]), axis=0)
            return float(np.sum(np.hypot(d[:, 0], d[:, 1])))
        # semi-axes from the eigenvalues of Q; complete elliptic integral
        eigs = np.linalg.eigvalsh(self.matrix)
        a = 1.0 / math.sqrt(eigs[0])  # major
        b = 1.0 / math.sqrt(eigs[1])  # minor
        m = 1.0 - (b / a) ** 2
        return float(4.0 * a * ellipe(m))

    def support(self, v: np.ndarray) -> np.ndarray:
        """Support function h(v) = max_{x in shape} <x, v> (exact)."""
        v = np.atleast_2d(np.asarray(v, dtype=float))
        if self.kind == "polygon":
            return np.max(v @ self.vertices.T, axis=1)
        qinv = np.linalg.inv(self.matrix)
        quad = np.einsum("ki,ij,kj->k", v, qinv, v)
        return v @ self.center + np.sqrt(quad)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Strict-interior membership for an array of points (K, 2)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "ellipse":
            d = pts - self.center
            quad = np.einsum("ki,ij,kj->k", d, self.matrix, d)
            return quad < 1.0
        return _polygon_interior(self.vertices, pts)

    def centroid(self) -> np.ndarray:
        if self.kind == "ellipse":
            return self.center.copy()
        v = self.vertices
        vn = np.roll(v, -1, axis=0)
        cross = v[:, 0] * vn[:, 1] - v[:, 1] * vn[:, 0]
        area = np.sum(cross) / 2.0
        cx = np.sum((v[:, 0] + vn[:, 0]) * cross) / (6.0 * area)
        cy = np.sum((v[:, 1] + vn[:, 1]) * cross) / (6.0 * area)
        return np.array([cx, cy])

    def second_moment(self) -> np.ndarray:
        """Centered second moment matrix (1/area) * int (x-c)(x-c)^T dx."""
        if self.kind == "ellipse":
            return np.linalg.inv(self.matrix) / 4.0
        c = self.centroid()
        v = self.vertices - c
        vn = np.roll(v, -1, axis=0)
        cross = v[:, 0] * vn[:, 1] - v[:, 1] * vn[:, 0]
        acc = np.zeros((2, 2))
        for p1, p2, cr in zip(v, vn, cross):
            s = p1 + p2
            acc += cr / 24.0 * (np.outer(p1, p1) + np.outer(p2, p2) + np.outer(s, s))
        return acc / self.area()

    def bounding_box(self) -> tuple[float, float, float, float]:
        if self.kind == "polygon":
            mn = self.vertices.min(axis=0)
            mx = self.vertices.max(axis=0)
        else:
            qinv = np.linalg.inv(self.matrix)
            half = np.sqrt(np.diag(qinv))
            mn = self.center - half
            mx = self.center + half
        return float(mn[0]), float(mn[1]), float(mx[0]), float(mx[1])

    def as_polygon(self, num_vertices: int = 256) -> "ShapeSpec":
        """Inscribed polygon approximation (exact identity for polygons)."""
        if self.kind == "polygon":
            return self
        ang = 2.0 * math.pi * np.arange(num_vertices) / num_vertices
        u = np.column_stack([np.cos(ang), np.sin(ang)])
        # boundary point in direction u: scale so (x-c)^T Q (x-c) = 1
        quad = np.einsum("ki,ij,kj->k", u, self.matrix, u)
        pts = self.center + u / np.sqrt(quad)[:, None]
        return ShapeSpec.polygon(pts, name=self.name or "ellipse-polygon")

    def __repr__(self) -> str:  # pragma: no cover
        label = self.name or self.kind
        return f"ShapeSpec({label}, kind={self.kind}, area={self.area():.6g})"


def _shoelace(v: np.ndarray) -> float:
    vn = np.roll(v, -1, axis=0)
    return float(np.sum(v[:, 0] * vn[:, 1] - v[:, 1] * vn[:, 0]) / 2.0)


def _check_simple(v: np.ndarray) -> None:
    """Reject self-intersecting polygons (non-adjacent edge crossings).

    Convex chains (single-signed turning summing to one full revolution) are
    simple by construction and skip the quadratic pairwise test, which keeps
    fine polygonizations (thousands of vertices) cheap.
    """
    n = len(v)
    if n == 3:
        return
    e = np.roll(v, -1, axis=0) - v
    turn = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
    scale = np.max(np.abs(e))
    if np.all(turn >= -1e-12 * scale**2):
        ang = np.arctan2(e[:, 1], e[:, 0])
        d_ang = np.mod(np.diff(np.append(ang, ang[0])) + math.pi, 2 * math.pi) - math.pi
        if abs(d_ang.sum() - 2 * math.pi) < 1e-6:
            return
    a = v
    b = np.roll(v, -1, axis=0)
    idx = np.arange(n)
    chunk = max(1, 2_000_000 // max(n, 1))
    for s in range(0, n, chunk):
        ii = idx[s : s + chunk]
        o1 = _orient_grid(a[ii], b[ii], a)      # (len(ii), n)
        o2 = _orient_grid(a[ii], b[ii], b)
        o3 = _orient_grid(a, b, a[ii]).T
        o4 = _orient_grid(a, b, b[ii]).T
        crossing = (o1 != o2) & (o3 != o4) & (o1 != 0) & (o2 != 0) & (o3 != 0) & (o4 != 0)
        jj = idx[None, :]
        adjacent = (jj == ii[:, None]) | (jj == (ii[:, None] + 1) % n) \
            | ((jj + 1) % n == ii[:, None])
        if np.any(crossing & ~adjacent):
            raise ValueError("polygon is self-intersecting")


def _orient_grid(p, q, r) -> np.ndarray:
    """Sign of the orientation of each (p_i, q_i) pair against every r_j."""
    px, py = p[:, 0, None], p[:, 1, None]
    qx, qy = q[:, 0, None], q[:, 1, None]
    val = (qx - px) * (r[None, :, 1] - py) - (qy - py) * (r[None, :, 0] - px)
    out = np.sign(val)
    out[np.abs(val) < 1e-14] = 0
    return out


def _polygon_interior(v: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Strict interior test by crossing number; boundary points excluded."""
    n = len(v)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    on_boundary = np.zeros(len(pts), dtype=bool)
    for i in range(n):
        x0, y0 = v[i]
        x1, y1 = v[(i + 1) % n]
        # boundary: collinear with the edge and inside its bounding box
        cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)
        seg_len = math.hypot(x1 - x0, y1 - y0)
        collinear = np.abs(cross) <= 1e-12 * max(seg_len, 1.0)
        within = (
            (x >= min(x0, x1) - 1e-12) & (x <= max(x0, x1) + 1e-12)
            & (y >= min(y0, y1) - 1e-12) & (y <= max(y0, y1) + 1e-12)
        )
        on_boundary |= collinear & within
        # crossing number (half-open rule avoids double counting vertices)
        cond = (y0 > y) != (y1 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (x < np.where(cond, x_int, np.inf))
    return inside & ~on_boundary


# ---------------------------------------------------------------------------
# Body-level operations
# ---------------------------------------------------------------------------


def polar_body(body: ConvexBody) -> ConvexBody:
    """Polar body via the discrete duality maximum.

    h_{K°}(xi_i) = max_j <xi_i, xi_j>_+ / h_K(xi_j).  (Pointwise reciprocal
    of the support samples is *not* the polar for non-balls.)
    """
    nodes = body.directions.nodes
    h = body.support
    m = body.directions.m
    out = np.empty(m)
    chunk = 512
    for s in range(0, m, chunk):
        dots = nodes[s : s + chunk] @ nodes.T
        out[s : s + chunk] = np.max(np.maximum(dots, 0.0) / h[None, :], axis=1)
    radial_fn = None
    if body.support_fn is not None:
        # exact duality: the radial function of K° is 1 / h_K
        fn = body.support_fn

        def radial_fn(v, _fn=fn):
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return 1.0 / np.asarray(_fn(v), dtype=float)

    return ConvexBody(body.directions, out, radial_fn=radial_fn,
                      meta={"polar_of": body.meta.get("name", "body")})


def body_volume(body: ConvexBody) -> float:
    """Volume by the polar-coordinate quadrature (1/2) sum w_i r_i^2."""
    return body.volume()


def santalo_product(body: ConvexBody) -> float:
    """vol(K) * vol(K°); at most omega_2^2 with equality only for ellipses."""
    return body_volume(body) * body_volume(polar_body(body))


def centroid_body(body: ConvexBody, p: float) -> ConvexBody:
    """Normalized p-centroid body Gamma_p K of an origin-symmetric body.

    h_{Gamma_p K}(v)^p = (1 / (r_{n,p} vol K)) * sum_j w_j r_K(xi_j)^{n+p}
    |<v, xi_j>|^p, normalized so Gamma_p of the unit disk is the unit disk.
    """
    p = float(p)
    if p < 1:
        raise ValueError("centroid body requires p >= 1")
    _, r_np = constants.centroid_normalizers(2, p)
    r = body.radial_samples()
    vol = float(np.sum(body.directions.weights * r**2) / 2.0)
    coef = body.directions.weights * r ** (2.0 + p) / (r_np * vol)
    nodes = body.directions.nodes

    def support_fn(v, _nodes=nodes, _coef=coef, _p=p):
        v = np.atleast_2d(np.asarray(v, dtype=float))
        return np.einsum("j,kj->k", _coef, np.abs(v @ _nodes.T) ** _p) ** (1.0 / _p)

    samples = support_fn(nodes)
    return ConvexBody(body.directions, samples, support_fn=support_fn,
                      meta={"kernel_nodes": nodes, "kernel_coef": coef, "kernel_p": p})


def busemann_petty_margin(body: ConvexBody, p: float) -> float:
    """Relative volume excess of the p-centroid body: vol(Gamma_p K)/vol(K) - 1.

    Nonnegative for every star body, zero exactly for centered ellipses.
    """
    return centroid_body(body, p).volume() / body.volume() - 1.0


def width(shape: ShapeSpec, xi: np.ndarray) -> float:
    """Width of the shape in direction xi: h(xi) + h(-xi)."""
    xi = np.asarray(xi, dtype=float).reshape(1, 2)
    norm = math.hypot(xi[0, 0], xi[0, 1])
    if norm == 0:
        raise ValueError("direction must be nonzero")
    xi = xi / norm
    return float(shape.support(xi)[0] + shape.support(-xi)[0])


def max_width(shape: ShapeSpec, directions: DirectionSet | None = None) -> float:
    """Maximal width over a direction grid (approaches the diameter as M grows).

    The default 256-direction grid includes the axis and diagonal directions,
    so rectangles evaluate exactly; generic polygons are underestimated by
    O(M^-2), which only makes width-based inequality constants conservative.
    """
    if directions is None:
        directions = DirectionSet.uniform(256)
    nodes = directions.nodes
    return float(np.max(shape.support(nodes) + shape.support(-nodes)))


def _edge_data(polygon: ShapeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normals and lengths of a CCW polygon's edges."""
    v = polygon.vertices
    d = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    return normals, lengths


def projection_support(shape: ShapeSpec, v: np.ndarray) -> np.ndarray:
    """Support function of the projection body Pi K, exactly for both kinds.

    Polygons: the zonotope formula h_{Pi K}(v) = (1/2) sum_e L_e |<nu_e, v>|.
    Ellipses {(x-c)^T Q (x-c) <= 1}: Pi K is the ellipse with
    h_{Pi K}(v) = (2 area / pi) sqrt(v^T Q v).
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    if shape.kind == "ellipse":
        quad = np.einsum("ki,ij,kj->k", v, shape.matrix, v)
        return (2.0 * shape.area() / math.pi) * np.sqrt(quad)
    normals, lengths = _edge_data(shape)
    return 0.5 * np.abs(v @ normals.T) @ lengths


def polar_projection_body(shape: ShapeSpec, directions: DirectionSet) -> ConvexBody:
    """The polar projection body Pi° K as a sampled convex body."""
    support_fn = lambda v: projection_support(shape, v)  # noqa: E731
    pi_body = ConvexBody(directions, support_fn(directions.nodes), support_fn=support_fn)
    return polar_body(pi_body)


def polar_projection_volume(shape: ShapeSpec) -> float:
    """vol(Pi° K) in closed form.

    Ellipses: Pi K is the ellipse with support (2 area / pi) sqrt(v^T Q v),
    whose polar has volume pi^2 / (4 area).  Polygons: h_{Pi K}(theta)
    restricted to any arc of the normal fan is R cos(theta - psi), so the
    polar volume (1/2) int h^{-2} integrates to a sum of tangent differences
    — exact up to rounding.
    """
    if shape.kind == "ellipse":
        return math.pi**2 / (4.0 * shape.area())
    poly = shape
    normals, lengths = _edge_data(poly)
    phi = np.arctan2(normals[:, 1], normals[:, 0])
    # kink angles of |cos(theta - phi_e)|: phi_e +- pi/2 (mod 2 pi)
    kinks = np.sort(np.unique(np.concatenate([(phi + math.pi / 2) % (2 * math.pi),
                                              (phi - math.pi / 2) % (2 * math.pi)])))
    total = 0.0
    for k in range(len(kinks)):
        a = kinks[k]
        b = kinks[(k + 1) % len(kinks)] if k + 1 < len(kinks) else kinks[0] + 2 * math.pi
        if b <= a:
            b += 2 * math.pi
        mid = 0.5 * (a + b)
        signs = np.sign(np.cos(mid - phi))
        # on this arc h(theta) = A cos(theta) + B sin(theta)
        amp_a = 0.5 * np.sum(lengths * signs * np.cos(phi))
        amp_b = 0.5 * np.sum(lengths * signs * np.sin(phi))
        rsq = amp_a**2 + amp_b**2
        psi = math.atan2(amp_b, amp_a)
        total += (math.tan(b - psi) - math.tan(a - psi)) / rsq
    return total / 2.0


def apply_linear(shape: ShapeSpec, a: np.ndarray, t=(0.0, 0.0)) -> ShapeSpec:
    """Affine image A . shape + t, exactly (polygons and ellipses are closed)."""
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    if a.shape != (2, 2) or abs(np.linalg.det(a)) < 1e-14:
        raise ValueError("transform matrix must be 2x2 and invertible")
    if shape.kind == "polygon":
        return ShapeSpec.polygon(shape.vertices @ a.T + t, name=shape.name)
    ainv = np.linalg.inv(a)
    q_new = ainv.T @ shape.matrix @ ainv
    return ShapeSpec.ellipse(q_new, a @ shape.center + t, name=shape.name)


def apply_linear_body(body: ConvexBody, a: np.ndarray) -> ConvexBody:
    """Linear image A . K of an origin-symmetric body: h_{AK}(v) = h_K(A^T v)."""
    a = np.asarray(a, dtype=float)
    at = a.T.copy()
    samples = body.support_at(body.directions.nodes @ a)  # rows (A^T v)^T = v^T A
    support_fn = None
    if body.support_fn is not None:
        base = body.support_fn

        def support_fn(v, _base=base, _at=at):
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return np.asarray(_base(v @ _at.T), dtype=float)

    meta = {}
    base_grad = body.meta.get("support_gradient")
    if callable(base_grad):

        def support_gradient(v, _g=base_grad, _a=a, _at=at):
            # grad h_{AK}(v) = A grad h_K(A^T v)
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return np.asarray(_g(v @ _at.T), dtype=float) @ _a.T

        meta["support_gradient"] = support_gradient
    return ConvexBody(body.directions, samples, support_fn=support_fn, meta=meta)


def body_from_shape(shape: ShapeSpec, directions: DirectionSet) -> ConvexBody:
    """Sample an origin-symmetric shape as a ConvexBody with exact callables."""
    c = shape.centroid()
    if np.hypot(c[0], c[1]) > 1e-9 * (1.0 + max_width(shape)):
        raise ValueError("body_from_shape requires a shape centered at the origin")
    support_fn = lambda v: shape.support(np.atleast_2d(np.asarray(v, dtype=float)))  # noqa: E731
    radial_fn = None
    support_gradient = None
    if shape.kind == "ellipse":
        q = shape.matrix
        qinv = np.linalg.inv(q)

        def radial_fn(v, _q=q):
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return 1.0 / np.sqrt(np.einsum("ki,ij,kj->k", v, _q, v))

        def support_gradient(v, _qi=qinv):
            # h(v) = sqrt(v^T Q^{-1} v)  =>  grad h = Q^{-1} v / h(v)
            v = np.atleast_2d(np.asarray(v, dtype=float))
            qv = v @ _qi.T
            hv = np.sqrt(np.einsum("kj,kj->k", v, qv))
            return qv / hv[:, None]

    elif shape.kind == "polygon":
        normals, _ = _edge_data(shape)
        offsets = np.einsum("ej,ej->e", normals, shape.vertices)

        def radial_fn(v, _n=normals, _c=offsets):
            v = np.atleast_2d(np.asarray(v, dtype=float))
            dots = v @ _n.T
            with np.errstate(divide="ignore"):
                ratios = np.where(dots > 1e-12, _c[None, :] / dots, np.inf)
            return ratios.min(axis=1)

        verts = np.asarray(shape.vertices, dtype=float)

        def support_gradient(v, _verts=verts):
            # h(v) = max_j <v, x_j>; grad h = maximizing vertex (a.e. unique)
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return _verts[np.argmax(v @ _verts.T, axis=1)]

    meta = {"name": shape.name or shape.kind, "shape": shape}
    if support_gradient is not None:
        meta["support_gradient"] = support_gradient
    return ConvexBody(directions, shape.support(directions.nodes),
                      support_fn=support_fn, radial_fn=radial_fn, meta=meta)


# ---------------------------------------------------------------------------
# Maximal-volume affine position
# ---------------------------------------------------------------------------


def _omega_halfspaces(omega: ShapeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Linear constraints <nu, x> <= c describing (an inscribed polygon of) Omega."""
    poly = omega if omega.kind == "polygon" else omega.as_polygon(64)
    normals, _ = _edge_data(poly)
    offsets = np.einsum("ej,ej->e", normals, poly.vertices)
    return normals, offsets


def _placement_feasible(shape_c: ShapeSpec, a: np.ndarray,
                        normals: np.ndarray, offsets: np.ndarray) -> bool:
    """Is there a translate t with A.C + t inside the constraint polygon?

    Chebyshev-slack LP: maximize r subject to <t, nu_e> + r <= c_e - h_{AC}(nu_e);
    feasible placement iff the optimum r >= -1e-9 (slack absorbs boundary-
    touching optima that exact arithmetic would accept).
    """
    h_ac = apply_linear(shape_c, a).support(normals)
    b_ub = offsets - h_ac
    a_ub = np.column_stack([normals, np.ones(len(normals))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * 3, method="highs")
    return bool(res.status == 0 and res.x is not None and res.x[2] >= -1e-9)


def _placement_translate(shape_c: ShapeSpec, a: np.ndarray,
                         normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    h_ac = apply_linear(shape_c, a).support(normals)
    b_ub = offsets - h_ac
    a_ub = np.column_stack([normals, np.ones(len(normals))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * 3, method="highs")
    if res.status != 0 or res.x is None:
        raise RuntimeError("translate LP unexpectedly infeasible")
    return res.x[:2]


def maximal_volume_position(shape_c: ShapeSpec, omega: ShapeSpec,
                            budget: int = 2000) -> tuple[np.ndarray, np.ndarray, float]:
    """Largest-volume affine image A.C + t contained in Omega (deterministic search).

    A ranges over scale * shear * axis-stretch; for each shear/stretch pair
    the maximal scale is found by bisection on an exact containment LP.
    Returns (A, t, volume): a certified lower bound for the maximal volume,
    accurate to the shear/stretch grid resolution.  Ellipse targets Omega are
    replaced by an inscribed 64-gon, so containment is never overclaimed.
    """
    if budget < 50:
        raise ValueError("budget too small for a meaningful search")
    normals, offsets = _omega_halfspaces(omega)
    c_centered = apply_linear(shape_c, np.eye(2), -shape_c.centroid())
    base_area = c_centered.area()

    n_shear = max(5, int(round(math.sqrt(budget / 12.0))))
    n_stretch = max(5, n_shear // 2 * 2 + 1)
    shears = np.linspace(-2.0, 2.0, n_shear)
    stretches = np.geomspace(0.5, 2.0, n_stretch)
    # make sure the identity transform is on the grid
    shears = np.unique(np.concatenate([shears, [0.0]]))
    stretches = np.unique(np.concatenate([stretches, [1.0]]))

    best = (None, -1.0)
    for sigma in shears:
        for s in stretches:
            base = np.array([[1.0, sigma], [0.0, 1.0]]) @ np.diag([math.sqrt(s), 1.0 / math.sqrt(s)])
            # bisect on the scale; volume of lam * base . C is lam^2 * area(C)
            lam_lo, lam_hi = 0.0, 4.0 * max_width(omega) / max(1e-12, math.sqrt(base_area))
            for _ in range(48):
                lam_mid = 0.5 * (lam_lo + lam_hi)
                if lam_mid < 1e-6:  # nothing fits along this (shear, stretch) ray
                    break
                if _placement_feasible(c_centered, lam_mid * base, normals, offsets):
                    lam_lo = lam_mid
                else:
                    lam_hi = lam_mid
                if lam_hi - lam_lo <= 1e-12 * max(lam_hi, 1.0):
                    break
            if lam_lo <= 0:
                continue
            vol = lam_lo**2 * base_area
            if vol > best[1]:
                best = (lam_lo * base, vol)
    if best[0] is None:
        raise RuntimeError("no feasible placement found")
    a_full, vol = best
    t_centered = _placement_translate(c_centered, a_full, normals, offsets)
    # the search placed A.(C - c0) + t'; as a map on C itself: x -> A x + t
    t_final = t_centered - a_full @ shape_c.centroid()
    return a_full, t_final, vol
