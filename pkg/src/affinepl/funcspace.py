"""Grid functions with zero boundary values and their affine energies.

Functions live on a uniform lattice window enclosing a :class:`ShapeSpec`
domain; a boolean mask marks the interior nodes and values are identically
zero outside it, encoding the W^{1,p}_0 boundary condition.

Two gradient stencils coexist deliberately:

* :func:`gradient` — the pointwise field per its contract (central in the
  interior, one-sided at the mask boundary, zero outside).
* the variational stencil (pure zero-extension central differences over the
  whole window) used by every norm, energy, and Rayleigh quotient.  Its
  adjoint is exactly the negated central stencil, which makes the discrete
  Gateaux derivative of E_p^p equal the weak form to rounding, and it
  penalizes boundary values variationally; a one-sided energy stencil would
  let mass leak through the boundary and collapse the quotients.

Characteristic functions of polygons/ellipses (p = 1) bypass finite
differences entirely: their directional variations come from exact edge data
and the energy from the closed-form polar-projection volume.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants, geometry
from .geometry import ConvexBody, DirectionSet, ShapeSpec

__all__ = [
    "GridFunction",
    "EnergyBreakdown",
    "gradient",
    "lp_norm",
    "grad_norm",
    "directional_norm",
    "directional_norms_all",
    "affine_energy",
    "body_L",
    "rayleigh_classical",
    "rayleigh_affine",
    "distribution_function",
    "symmetric_rearrangement",
    "unbounded_sequence",
    "builtin_function",
    "CorpusEntry",
    "test_function_corpus",
]

_DEGENERATE_TOL = 1e-10


class GridFunction:
    """Lattice function: spacing ``h``, window ``origin``, ``mask``, ``values``.

    ``values[iy, ix]`` sits at ``(origin[0] + ix*h, origin[1] + iy*h)``.
    Values are forced to zero outside the mask, and the mask keeps a one-cell
    clearance from the window edge (windows are built with a two-cell pad).
    Instances are immutable; derive new ones with :meth:`with_values`.
    """

    __slots__ = ("h", "origin", "mask", "values", "indicator_of", "name")

    def __init__(self, h: float, origin, mask, values, indicator_of: ShapeSpec | None = None,
                 name: str = ""):
        if not h > 0:
            raise ValueError("grid spacing must be positive")
        self.h = float(h)
        self.origin = np.asarray(origin, dtype=float).reshape(2)
        self.mask = np.asarray(mask, dtype=bool)
        vals = np.asarray(values, dtype=float)
        if vals.shape != self.mask.shape:
            raise ValueError("values and mask shapes differ")
        if self.mask.any():
            edge = (self.mask[0].any() or self.mask[-1].any()
                    or self.mask[:, 0].any() or self.mask[:, -1].any())
            if edge:
                raise ValueError("mask touches the window edge; enlarge the window")
        self.values = np.where(self.mask, vals, 0.0)
        self.indicator_of = indicator_of
        self.name = name
        for arr in (self.origin, self.mask, self.values):
            arr.flags.writeable = False

    # -- construction --------------------------------------------------------

    @classmethod
    def from_shape(cls, shape: ShapeSpec, h: float, pad: int = 2) -> "GridFunction":
        """Zero function on the lattice window of ``shape`` (bbox + pad cells)."""
        mask, origin = _shape_mask(shape, h, pad)
        return cls(h, origin, mask, np.zeros(mask.shape), name=shape.name)

    @classmethod
    def from_callable(cls, shape: ShapeSpec, h: float, fn, pad: int = 2,
                      name: str = "") -> "GridFunction":
        mask, origin = _shape_mask(shape, h, pad)
        ny, nx = mask.shape
        xs = origin[0] + h * np.arange(nx)
        ys = origin[1] + h * np.arange(ny)
        vals = fn(xs[None, :], ys[:, None]) * mask
        return cls(h, origin, mask, vals, name=name)

    @classmethod
    def indicator(cls, shape: ShapeSpec, h: float, pad: int = 2) -> "GridFunction":
        mask, origin = _shape_mask(shape, h, pad)
        return cls(h, origin, mask, mask.astype(float), indicator_of=shape,
                   name=f"chi-{shape.name or shape.kind}")

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.h, self.origin, self.mask, values,
                            indicator_of=None, name=self.name)

    # -- geometry of the lattice ---------------------------------------------

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """(xs, ys) broadcastable to the window: xs (1, nx), ys (ny, 1)."""
        ny, nx = self.mask.shape
        xs = self.origin[0] + self.h * np.arange(nx)
        ys = self.origin[1] + self.h * np.arange(ny)
        return xs[None, :], ys[:, None]

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "grid": {"h": self.h, "origin": self.origin.tolist()},
            "values": self.values.tolist(),
            "mask": self.mask.astype(int).tolist(),
        }
        if self.indicator_of is not None:
            out["indicator_of"] = self.indicator_of.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction":
        grid = data["grid"]
        values = np.asarray(data["values"], dtype=float)
        mask = (np.asarray(data["mask"], dtype=bool) if "mask" in data
                else values != 0.0)
        ind = (ShapeSpec.from_dict(data["indicator_of"])
               if data.get("indicator_of") else None)
        return cls(grid["h"], grid.get("origin", (0.0, 0.0)), mask, values,
                   indicator_of=ind)


def _shape_mask(shape: ShapeSpec, h: float, pad: int) -> tuple[np.ndarray, np.ndarray]:
    """Interior mask on a lattice aligned to multiples of h (node = cell center)."""
    if not h > 0:
        raise ValueError("grid spacing must be positive")
    if pad < 2:
        raise ValueError("window pad must be at least 2 cells")
    x0, y0, x1, y1 = shape.bounding_box()
    ix0 = math.floor(x0 / h + 1e-12) - pad
    iy0 = math.floor(y0 / h + 1e-12) - pad
    ix1 = math.ceil(x1 / h - 1e-12) + pad
    iy1 = math.ceil(y1 / h - 1e-12) + pad
    xs = h * np.arange(ix0, ix1 + 1)
    ys = h * np.arange(iy0, iy1 + 1)
    pts = np.column_stack([np.repeat(xs[None, :], len(ys), axis=0).ravel(),
                           np.repeat(ys[:, None], len(xs), axis=1).ravel()])
    mask = shape.contains(pts).reshape(len(ys), len(xs))
    return mask, np.array([h * ix0, h * iy0])


# ---------------------------------------------------------------------------
# Gradients and norms
# ---------------------------------------------------------------------------


def gradient(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise gradient field (gx, gy) on the window.

    Central differences where both axis neighbors are interior, one-sided at
    the mask boundary, zero outside the mask.  Norms and energies use the
    variational zero-extension stencil instead (see module docstring).
    """
    v, m, h = f.values, f.mask, f.h
    gx = np.zeros_like(v)
    gy = np.zeros_like(v)
    right = np.zeros_like(m)
    left = np.zeros_like(m)
    right[:, :-1] = m[:, 1:]
    left[:, 1:] = m[:, :-1]
    vr = np.zeros_like(v)
    vl = np.zeros_like(v)
    vr[:, :-1] = v[:, 1:]
    vl[:, 1:] = v[:, :-1]
    central = right & left
    gx = np.where(central, (vr - vl) / (2 * h),
                  np.where(right, (vr - v) / h, np.where(left, (v - vl) / h, 0.0)))
    up = np.zeros_like(m)
    dn = np.zeros_like(m)
    up[:-1, :] = m[1:, :]
    dn[1:, :] = m[:-1, :]
    vu = np.zeros_like(v)
    vd = np.zeros_like(v)
    vu[:-1, :] = v[1:, :]
    vd[1:, :] = v[:-1, :]
    central = up & dn
    gy = np.where(central, (vu - vd) / (2 * h),
                  np.where(up, (vu - v) / h, np.where(dn, (v - vd) / h, 0.0)))
    return gx * m, gy * m


def edge_differences(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences of the zero-extended values across lattice edges.

    ``ex[i, k] = (v[i, k] - v[i, k-1]) / h`` for k = 0..nx with zero ghosts,
    shape (ny, nx+1); ``ey`` analogous with shape (ny+1, nx).  Energies use
    the two co-located vector samples per node

        g+(i, j) = (ex[i, j+1], ey[i+1, j]),   g-(i, j) = (ex[i, j], ey[i, j]),

    each with quadrature weight h^2/2 — the constant gradients of the two
    triangles meeting at the node in the diagonal split of the cells.  The
    pairing's exact adjoint is compact (nearest-neighbor), so no even/odd
    sublattice decoupling occurs, and the O(h) bias of each one-sided sample
    cancels between the pair, keeping energy quadratures second order.
    """
    v, h = f.values, f.h
    ny, nx = v.shape
    ex = np.zeros((ny, nx + 1))
    ey = np.zeros((ny + 1, nx))
    ex[:, 1:-1] = (v[:, 1:] - v[:, :-1]) / h
    ex[:, 0] = v[:, 0] / h
    ex[:, -1] = -v[:, -1] / h
    ey[1:-1, :] = (v[1:, :] - v[:-1, :]) / h
    ey[0, :] = v[0, :] / h
    ey[-1, :] = -v[-1, :] / h
    return ex, ey


def lp_norm(f: GridFunction, p: float) -> float:
    """(sum |f|^p h^2)^(1/p); exact area for indicator grid functions at p=1."""
    p = _check_p(p)
    if f.indicator_of is not None:
        return float(f.indicator_of.area()) ** (1.0 / p)
    return float(np.sum(np.abs(f.values) ** p) * f.h**2) ** (1.0 / p)


def grad_norm(f: GridFunction, p: float) -> float:
    """L^p norm of the gradient cloud; exact perimeter for indicators at p=1."""
    p = _check_p(p)
    if f.indicator_of is not None and p == 1.0:
        return float(f.indicator_of.perimeter())
    ex, ey = edge_differences(f)
    mag_plus = np.hypot(ex[:, 1:], ey[1:, :])
    mag_minus = np.hypot(ex[:, :-1], ey[:-1, :])
    total = np.sum(mag_plus**p) + np.sum(mag_minus**p)
    return float(total * 0.5 * f.h**2) ** (1.0 / p)


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"exponent p must satisfy p >= 1, got {p!r}")
    return p


def _gradient_samples(f: GridFunction) -> tuple[np.ndarray, float]:
    """Nonzero gradient-cloud vectors stacked (N, 2), with their common weight.

    The cloud holds both per-node samples g+ and g- (see ``edge_differences``);
    every sample carries quadrature weight h^2/2.
    """
    ex, ey = edge_differences(f)
    gx = np.concatenate([ex[:, 1:].ravel(), ex[:, :-1].ravel()])
    gy = np.concatenate([ey[1:, :].ravel(), ey[:-1, :].ravel()])
    nz = (gx != 0.0) | (gy != 0.0)
    return np.column_stack([gx[nz], gy[nz]]), 0.5 * f.h**2


def directional_norm(f: GridFunction, xi, p: float) -> float:
    """||grad_xi f||_p = (sum w |<grad f, xi>|^p)^(1/p) for a unit direction."""
    p = _check_p(p)
    xi = np.asarray(xi, dtype=float).reshape(2)
    if abs(math.hypot(xi[0], xi[1]) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if f.indicator_of is not None and p == 1.0:
        return float(2.0 * geometry.projection_support(f.indicator_of, xi)[0])
    g, w = _gradient_samples(f)
    return float(np.sum(np.abs(g @ xi) ** p) * w) ** (1.0 / p)


def directional_norms_all(f: GridFunction, directions: DirectionSet, p: float) -> np.ndarray:
    """All directional norms on the direction grid (vectorized, fixed order)."""
    p = _check_p(p)
    if f.indicator_of is not None and p == 1.0:
        return 2.0 * geometry.projection_support(f.indicator_of, directions.nodes)
    g, w = _gradient_samples(f)
    out = np.empty(directions.m)
    chunk = 256
    for s in range(0, directions.m, chunk):
        block = np.abs(g @ directions.nodes[s : s + chunk].T) ** p
        out[s : s + chunk] = np.sum(block, axis=0)
    return (out * w) ** (1.0 / p)


@dataclass
class EnergyBreakdown:
    """Affine energy with its reusable ingredients.

    ``directional_norms`` are cached here because the energy, the operator
    kernel H_f, and the Euler-Lagrange terms all consume the same samples.
    """

    directional_norms: np.ndarray
    energy: float
    grad_norm: float
    lp_norm: float
    p: float
    exact_bv: bool = False
    meta: dict = field(default_factory=dict)


def affine_energy(f: GridFunction, p: float, directions: DirectionSet,
                  directional_norms: np.ndarray | None = None) -> EnergyBreakdown:
    """E_p f = c_{n,p} ( sum_i w_i ||grad_{xi_i} f||_p^{-n} )^{-1/n}  (n = 2).

    Indicator functions at p = 1 take the exact boundary-variation route:
    directional variations from edge data (twice the projection-body support)
    and the energy from the closed-form polar-projection volume.

    ``directional_norms`` accepts samples already computed for the same
    (f, p, directions) — the operator kernels and Euler-Lagrange terms reuse
    one set of samples for everything — and is validated the same way.
    """
    p = _check_p(p)
    c = constants.c_np(2, p)
    if f.indicator_of is not None and p == 1.0:
        shape = f.indicator_of
        s = 2.0 * geometry.projection_support(shape, directions.nodes)
        vol_polar_proj = geometry.polar_projection_volume(shape)
        energy = c * math.sqrt(2.0) * vol_polar_proj ** (-0.5)
        return EnergyBreakdown(s, energy, shape.perimeter(), shape.area(), p,
                               exact_bv=True, meta={"polar_projection_volume": vol_polar_proj})
    g = grad_norm(f, p)
    if g == 0.0:
        raise ValueError("affine energy of the zero function is undefined")
    if directional_norms is None:
        s = directional_norms_all(f, directions, p)
    else:
        s = np.asarray(directional_norms, dtype=float)
        if s.shape != (directions.m,):
            raise ValueError("directional_norms shape does not match the direction set")
    if np.min(s) < _DEGENERATE_TOL * g:
        i = int(np.argmin(s))
        raise ValueError(
            f"degenerate direction {directions.nodes[i]}: directional norm "
            f"{s[i]:.3e} below {_DEGENERATE_TOL:.0e} * grad_norm"
        )
    quad = float(np.sum(directions.weights * s ** -2.0))
    energy = c * quad ** -0.5
    return EnergyBreakdown(s, energy, g, lp_norm(f, p), p)


def body_L(f: GridFunction, p: float, directions: DirectionSet) -> ConvexBody:
    """Unit-ball body of the gauge xi -> ||grad_xi f||_p, in polar form.

    The returned body's *support* samples are the directional norms (i.e. it
    is the polar of the gauge ball L_{p,f}; a volume-preserving map A sends
    the gauge ball to A^{-1} L and this polar-form body to A^T (polar form)).
    ``meta['energy_identity']`` records E_p f = c_{n,p} n^{-1/n} vol(L)^{-1/n}
    evaluated both ways.
    """
    bd = affine_energy(f, p, directions)
    s = bd.directional_norms
    if bd.exact_bv:
        # gauge norm of an indicator is twice the projection support, so the
        # gauge ball is (1/2) Pi° K and its volume the exact arc integral / 4
        vol_gauge_ball = bd.meta["polar_projection_volume"] / 4.0
    else:
        vol_gauge_ball = float(np.sum(directions.weights * s ** -2.0) / 2.0)
    from_volume = constants.c_np(2, p) * (2.0 * vol_gauge_ball) ** -0.5
    if f.indicator_of is not None and p == 1.0:
        shape = f.indicator_of
        support_fn = lambda v: 2.0 * geometry.projection_support(shape, v)  # noqa: E731
    else:
        g, w = _gradient_samples(f)

        def support_fn(v, _g=g, _w=w, _p=p):
            v = np.atleast_2d(np.asarray(v, dtype=float))
            return (np.sum(np.abs(_g @ v.T) ** _p, axis=0) * _w) ** (1.0 / _p)

    return ConvexBody(
        directions, s, support_fn=support_fn,
        meta={
            "energy_identity": {
                "energy_direct": bd.energy,
                "energy_from_volume": from_volume,
                "gauge_ball_volume": vol_gauge_ball,
                "residual": abs(bd.energy - from_volume) / bd.energy,
            },
            "p": p,
        },
    )


def rayleigh_classical(f: GridFunction, p: float) -> float:
    """R_p(f) = ||grad f||_p^p / ||f||_p^p."""
    denom = lp_norm(f, p) ** float(p)
    if denom == 0.0:
        raise ValueError("Rayleigh quotient of the zero function is undefined")
    return grad_norm(f, p) ** float(p) / denom


def rayleigh_affine(f: GridFunction, p: float, directions: DirectionSet) -> float:
    """R^A_p(f) = E_p^p f / ||f||_p^p."""
    bd = affine_energy(f, p, directions)
    denom = bd.lp_norm ** float(p)
    if denom == 0.0:
        raise ValueError("Rayleigh quotient of the zero function is undefined")
    return bd.energy ** float(p) / denom


def distribution_function(f: GridFunction, t: float) -> float:
    """mu_f(t) = h^2 * #{nodes : |f| > t}, right-continuous and nonincreasing."""
    t = float(t)
    if t < 0:
        raise ValueError("distribution function level must be >= 0")
    return float(np.count_nonzero(np.abs(f.values) > t)) * f.h**2


def symmetric_rearrangement(f: GridFunction) -> GridFunction:
    """Decreasing rearrangement onto the lattice ball (Schwarz symmetrization).

    |f|'s values, sorted descending, are reassigned to the window nodes
    sorted by distance from the domain-ball center — the lattice node nearest
    the support centroid — with lexicographic tie-breaking.  The support
    becomes the lattice ball with the same node count, so every
    distribution-function value and every L^p norm is preserved exactly as a
    node relabeling, and a function already radially decreasing about the
    center is returned unchanged.  The window is enlarged when the ball
    does not fit the original one (e.g. thin slabs).
    """
    n_nodes = int(f.mask.sum())
    if n_nodes == 0:
        return f
    vals = np.sort(np.abs(f.values[f.mask]))[::-1]
    iy, ix = np.nonzero(f.mask)
    cx = f.origin[0] + f.h * ix.mean()
    cy = f.origin[1] + f.h * iy.mean()
    # snap the center to the lattice
    jx = round((cx - f.origin[0]) / f.h)
    jy = round((cy - f.origin[1]) / f.h)
    # ball of n_nodes lattice cells, with clearance
    reach = int(math.ceil(math.sqrt(n_nodes / math.pi))) + 1
    ny, nx = f.mask.shape
    if (jx - reach >= 1 and jx + reach <= nx - 2 and jy - reach >= 1
            and jy + reach <= ny - 2):
        origin, shape_yx = f.origin, f.mask.shape
        cjx, cjy = jx, jy
    else:
        side = 2 * (reach + 2) + 1
        origin = np.array([f.origin[0] + (jx - reach - 2) * f.h,
                           f.origin[1] + (jy - reach - 2) * f.h])
        shape_yx = (side, side)
        cjx = cjy = reach + 2
    gy, gx = np.mgrid[0 : shape_yx[0], 0 : shape_yx[1]]
    d2 = (gx - cjx) ** 2 + (gy - cjy) ** 2
    order = np.lexsort((gx.ravel(), gy.ravel(), d2.ravel()))[:n_nodes]
    new_vals = np.zeros(shape_yx)
    new_mask = np.zeros(shape_yx, dtype=bool)
    oy, ox = np.unravel_index(order, shape_yx)
    new_vals[oy, ox] = vals
    new_mask[oy, ox] = True
    return GridFunction(f.h, origin, new_mask, new_vals, name=f"{f.name}*")


# ---------------------------------------------------------------------------
# Explicit constructions
# ---------------------------------------------------------------------------


def _phi_spike(x: np.ndarray, k: int) -> np.ndarray:
    """Piecewise profile: 0 outside [1/3 - 1/k, 2/3 + 1/k], 1 on [1/3, 2/3],
    and 1 + k/6 - k|x - 1/2| on the two ramps of width 1/k (slope +-k)."""
    ramp = 1.0 + k / 6.0 - k * np.abs(x - 0.5)
    out = np.where((x >= 1.0 / 3.0) & (x <= 2.0 / 3.0), 1.0, np.minimum(ramp, 1.0))
    lo, hi = 1.0 / 3.0 - 1.0 / k, 2.0 / 3.0 + 1.0 / k
    return np.where((x >= lo) & (x <= hi), np.maximum(out, 0.0), 0.0)


def unbounded_sequence(k: int, p: float, h: float | None = None) -> GridFunction:
    """k-th element of the quotient-unbounding sequence inside the unit square.

    p = 1: the characteristic function of the slab [0,1] x [0, 1/k] (exact
    boundary-variation evaluation).  p > 1: f_k(x, y) = phi_k(x) sin(pi y)
    with the ramp profile phi_k (slope k on two width-1/k intervals).
    Requires h <= 1/(4k) so the 1/k features are resolved.
    """
    if not (isinstance(k, int) and k >= 4):
        raise ValueError(f"sequence index k must be an integer >= 4, got {k!r}")
    p = _check_p(p)
    if h is None:
        h = 1.0 / max(4 * k, 64)
    if h > 1.0 / (4 * k) + 1e-12:
        raise ValueError(f"grid h={h} too coarse to resolve 1/k features; need h <= 1/(4k)")
    if p == 1.0:
        slab = ShapeSpec.rectangle(0.0, 0.0, 1.0, 1.0 / k, name=f"slab-k{k}")
        return GridFunction.indicator(slab, h)
    square = ShapeSpec.unit_square()
    fn = lambda x, y: _phi_spike(x, k) * np.sin(math.pi * y)  # noqa: E731
    g = GridFunction.from_callable(square, h, fn, name=f"spike-k{k}")
    return g


def builtin_function(name: str, shape: ShapeSpec, h: float) -> GridFunction:
    """Named test functions: 'sine', 'bump', 'cone', 'indicator'.

    'sine' is the product sine adapted to the shape's bounding box; 'bump'
    is the radial profile (1-r^2)^2 and 'cone' the profile (1-r), both
    scaled to the inscribed disk about the shape centroid.
    """
    if name == "indicator":
        return GridFunction.indicator(shape, h)
    x0, y0, x1, y1 = shape.bounding_box()
    if name == "sine":
        fn = lambda x, y: (np.sin(math.pi * (x - x0) / (x1 - x0))  # noqa: E731
                           * np.sin(math.pi * (y - y0) / (y1 - y0)))
        return GridFunction.from_callable(shape, h, fn, name="sine")
    if name in ("bump", "cone"):
        c = shape.centroid()
        nodes = DirectionSet.uniform(256).nodes
        rad = float(np.min(shape.support(nodes) - nodes @ c))
        if rad <= 0:
            raise ValueError("shape has no inscribed disk about its centroid")

        def fn(x, y, _c=c, _r=rad, _name=name):
            rr = np.hypot(x - _c[0], y - _c[1]) / _r
            if _name == "bump":
                return np.maximum(0.0, 1.0 - rr**2) ** 2
            return np.maximum(0.0, 1.0 - rr)

        return GridFunction.from_callable(shape, h, fn, name=name)
    raise ValueError(f"unknown builtin function {name!r}")


# ---------------------------------------------------------------------------
# Deterministic test-function corpus
# ---------------------------------------------------------------------------


@dataclass
class CorpusEntry:
    name: str
    f: GridFunction
    p: float
    shape: ShapeSpec


def test_function_corpus(h: float = 1.0 / 64.0, seed: int = 20260818) -> list[CorpusEntry]:
    """Fifty deterministic test functions spanning the inequality corpus.

    30 random smooth sine-tapered Gaussian mixtures on the unit square,
    6 sheared radial bumps on sheared disks, 8 slab indicators (p = 1), and
    6 ramp-spike products — the same families the unboundedness construction
    uses, so the corpus exercises both the generic and the near-extremal
    regimes.
    """
    rng = np.random.default_rng(seed)
    entries: list[CorpusEntry] = []
    square = ShapeSpec.unit_square()
    p_cycle = (1.5, 2.0, 2.5, 3.0)
    for i in range(30):
        k = 3
        amps = rng.uniform(-0.4, 0.8, k)
        cents = rng.uniform(0.25, 0.75, (k, 2))
        sigs = rng.uniform(0.08, 0.25, k)

        def fn(x, y, _a=amps, _c=cents, _s=sigs):
            base = np.sin(math.pi * x) * np.sin(math.pi * y)
            mix = np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))
            for a, c, s in zip(_a, _c, _s):
                mix = mix + a * np.exp(-(((x - c[0]) ** 2) + (y - c[1]) ** 2) / (2 * s**2))
            return base * (1.0 + mix)

        f = GridFunction.from_callable(square, h, fn, name=f"smooth-{i:02d}")
        entries.append(CorpusEntry(f.name, f, p_cycle[i % 4], square))

    disk = ShapeSpec.disk(1.0)
    shear_p = (1.5, 2.0, 3.0)
    for j, sigma in enumerate((0.0, 0.4, 0.8, 1.2, 1.6, 2.0)):
        a = np.array([[1.0, sigma], [0.0, 1.0]])
        ainv = np.linalg.inv(a)
        sheared = geometry.apply_linear(disk, a)
        sheared.name = f"sheared-disk-{j}"

        def fn(x, y, _ai=ainv):
            u = _ai[0, 0] * x + _ai[0, 1] * y
            v = _ai[1, 0] * x + _ai[1, 1] * y
            return np.maximum(0.0, 1.0 - (u**2 + v**2)) ** 2

        f = GridFunction.from_callable(sheared, h, fn, name=f"sheared-bump-{j}")
        entries.append(CorpusEntry(f.name, f, shear_p[j % 3], sheared))

    for k in (4, 5, 6, 8, 10, 12, 14, 16):
        f = unbounded_sequence(k, 1.0, h=min(h, 1.0 / (4 * k)))
        entries.append(CorpusEntry(f.name, f, 1.0, f.indicator_of))

    spike_p = (2.0, 1.5, 2.5)
    for j, k in enumerate((4, 6, 8, 10, 12, 16)):
        f = unbounded_sequence(k, 2.0, h=min(h, 1.0 / (4 * k)))
        entries.append(CorpusEntry(f.name, f, spike_p[j % 3], square))

    assert len(entries) == 50
    return entries
