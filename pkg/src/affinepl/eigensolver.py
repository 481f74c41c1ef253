"""First-eigenvalue estimation by projected Rayleigh-quotient descent.

Both quotients (classical and directional-energy based) are minimized with
the same scheme: the quotient gradient is assembled from the exact-adjoint
strong form, preconditioned by a prefactored 5-point Dirichlet Laplacian
(an H^1 metric), and stepped with a backtracking line search evaluated after
the |f| projection and L^p renormalization — so accepted quotient values are
nonincreasing by construction.  The result is an upper bound on the discrete
eigenvalue; certification is via the weak-form residual, never by a claim of
global optimality (the energy quotient is nonconvex).

An independent p = 2 cross-check diagonalizes the compact 5-point Laplacian
directly (shift-invert Lanczos), sharing no code with the descent path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import funcspace, operators as ops
from .funcspace import GridFunction
from .geometry import DirectionSet, ShapeSpec

__all__ = [
    "SolveOptions",
    "EigenResult",
    "minimize_rayleigh",
    "classical_eigen_oracle",
    "certify",
]


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for minimize_rayleigh."""

    p: float = 2.0
    h: float = 1.0 / 64
    directions: int = 256
    mode: str = "affine"            # "affine" | "classical"
    init: str = "classical-eigen"   # "bump" | "classical-eigen" | "file"
    init_function: GridFunction | None = None   # used when init == "file"
    max_iterations: int = 400
    tol_rel: float = 1e-8
    armijo: float = 1e-4
    step0: float = 1.0
    multistart: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.tol_rel > 0:
            raise ValueError("tol_rel must be positive")
        if self.directions % 4 != 0:
            raise ValueError("direction count must be a multiple of 4")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if self.mode not in ("affine", "classical"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.init not in ("bump", "classical-eigen", "file"):
            raise ValueError(f"unknown init {self.init!r}")
        if not self.p > 1.0:
            raise ValueError("eigenvalue descent requires p > 1 "
                             "(the p = 1 limit is the Cheeger problem)")
        if self.multistart < 1:
            raise ValueError("multistart must be >= 1")


@dataclass
class EigenResult:
    """Outcome of a Rayleigh-quotient minimization."""

    lam: float
    minimizer: GridFunction
    iterations: int
    el_residual: float
    history: list = field(default_factory=list)
    certified: bool = False
    mode: str = "affine"
    p: float = 2.0


# ---------------------------------------------------------------------------
# Sparse 5-point Laplacian on the mask
# ---------------------------------------------------------------------------


def _mask_laplacian(mask: np.ndarray, h: float) -> sp.csc_matrix:
    """Compact 5-point Dirichlet Laplacian on the masked nodes."""
    ny, nx = mask.shape
    index = -np.ones((ny, nx), dtype=np.int64)
    iy, ix = np.nonzero(mask)
    n = iy.size
    index[iy, ix] = np.arange(n)
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    data = [np.full(n, 4.0 / h**2)]
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        jy, jx = iy + dy, ix + dx
        ok = (jy >= 0) & (jy < ny) & (jx >= 0) & (jx < nx)
        ok[ok] &= mask[jy[ok], jx[ok]]
        rows.append(index[iy[ok], ix[ok]])
        cols.append(index[jy[ok], jx[ok]])
        data.append(np.full(np.count_nonzero(ok), -1.0 / h**2))
    m = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return m.tocsc()


def _classical_eigenpair(mask: np.ndarray, h: float) -> tuple[float, np.ndarray]:
    """Smallest Dirichlet eigenpair of the 5-point Laplacian (deterministic)."""
    lap = _mask_laplacian(mask, h)
    n = lap.shape[0]
    v0 = np.ones(n)
    vals, vecs = spla.eigsh(lap, k=1, sigma=0.0, which="LM", v0=v0)
    vec = vecs[:, 0]
    if vec.sum() < 0:
        vec = -vec
    return float(vals[0]), vec


def classical_eigen_oracle(omega: ShapeSpec, h: float) -> float:
    """Smallest p = 2 Dirichlet eigenvalue of the 5-point Laplacian on omega.

    Independent of the descent path; used to cross-validate it.
    """
    f = GridFunction.from_callable(omega, h, lambda x, y: np.ones_like(x * y))
    lam, _ = _classical_eigenpair(f.mask, h)
    return lam


# ---------------------------------------------------------------------------
# Descent
# ---------------------------------------------------------------------------


def _normalized(f: GridFunction, p: float) -> GridFunction:
    nrm = funcspace.lp_norm(f, p)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero function")
    return f.with_values(f.values / nrm)


def _quotient_and_strong(f: GridFunction, p: float, mode: str,
                         directions: DirectionSet):
    """(lambda, strong-form field, context-or-None) for the current iterate."""
    if mode == "affine":
        bd = funcspace.affine_energy(f, p, directions)
        ctx = ops.make_context(f, p, directions, breakdown=bd)
        lam = bd.energy ** p / bd.lp_norm ** p
        strong = ops.affine_laplacian(ctx).values
        return lam, strong, ctx
    lam = funcspace.rayleigh_classical(f, p)
    strong = ops.classical_p_laplacian(f, p).values
    return lam, strong, None


def _weak_residual(f: GridFunction, strong: np.ndarray, lam: float, p: float) -> float:
    """Hat-basis weak-form defect, shared normalization with the energy mode."""
    mass = np.zeros_like(f.values)
    nz = f.values != 0.0
    mass[nz] = np.abs(f.values[nz]) ** (p - 2.0) * f.values[nz]
    iy, ix = np.nonzero(f.mask)
    sel = (iy % 4 == 0) & (ix % 4 == 0)
    hats = ops._hat_weights(f.mask.shape, iy[sel], ix[sel])
    hats *= f.mask.ravel()[None, :]
    a = hats @ strong.ravel() * f.h**2
    b = hats @ mass.ravel() * f.h**2
    scale = float(np.max(np.abs(a) + np.abs(lam * b)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - lam * b)) / scale)


def _residual_for(f: GridFunction, lam: float, p: float, mode: str,
                  directions: DirectionSet, ctx) -> float:
    if mode == "affine":
        return ops.el_residual(ctx, lam)
    strong = ops.classical_p_laplacian(f, p).values
    return _weak_residual(f, strong, lam, p)


def _initial_iterate(omega: ShapeSpec, opts: SolveOptions,
                     rng: np.random.Generator | None) -> GridFunction:
    if opts.init == "file":
        if opts.init_function is None:
            raise ValueError("init='file' requires init_function")
        f = opts.init_function
    elif opts.init == "bump":
        f = funcspace.builtin_function("bump", omega, opts.h)
    else:  # classical-eigen warm start
        probe = GridFunction.from_callable(omega, opts.h,
                                           lambda x, y: np.ones_like(x * y))
        _, vec = _classical_eigenpair(probe.mask, opts.h)
        vals = np.zeros(probe.mask.shape)
        vals[probe.mask] = vec
        f = GridFunction(probe.h, probe.origin, probe.mask, vals,
                         name=f"warm[{omega.name or omega.kind}]")
    vals = np.abs(f.values)
    if rng is not None:
        vals = vals * (1.0 + 0.2 * rng.random(vals.shape)) * f.mask
    return _normalized(f.with_values(vals), opts.p)


def _descend(omega: ShapeSpec, opts: SolveOptions,
             rng: np.random.Generator | None) -> EigenResult:
    directions = DirectionSet.uniform(opts.directions)
    f = _initial_iterate(omega, opts, rng)
    lap = _mask_laplacian(f.mask, opts.h)
    solve_h1 = spla.splu(lap).solve
    mask_flat = f.mask.ravel()

    lam, strong, ctx = _quotient_and_strong(f, opts.p, opts.mode, directions)
    history = [lam]
    step = opts.step0
    iterations = 0
    certified = False
    residual = None

    for iterations in range(1, opts.max_iterations + 1):
        mass = np.zeros_like(f.values)
        nz = f.values != 0.0
        mass[nz] = np.abs(f.values[nz]) ** (opts.p - 2.0) * f.values[nz]
        grad = (strong - lam * mass) * f.mask          # quotient gradient field
        d = np.zeros(f.values.size)
        d[mask_flat] = solve_h1(grad.ravel()[mask_flat])
        d = d.reshape(f.values.shape)
        slope = float(np.sum(grad * d) * f.h**2)       # H^1 descent pairing
        if slope <= 0.0:
            break

        accepted = None
        t = step * 2.0
        while t > 1e-18:
            cand_vals = np.abs(f.values - t * d) * f.mask
            if not np.any(cand_vals):
                t *= 0.5
                continue
            cand = _normalized(f.with_values(cand_vals), opts.p)
            lam_new, strong_new, ctx_new = _quotient_and_strong(
                cand, opts.p, opts.mode, directions)
            if lam_new <= lam - opts.armijo * t * slope:
                accepted = (cand, lam_new, strong_new, ctx_new)
                break
            t *= 0.5
        if accepted is None:
            break
        f, lam, strong, ctx = accepted
        step = t
        history.append(lam)

        if len(history) > 10:
            rel_drop = (history[-11] - history[-1]) / history[-1]
            if rel_drop < opts.tol_rel:
                residual = _residual_for(f, lam, opts.p, opts.mode, directions, ctx)
                if residual < 10.0 * opts.tol_rel:
                    certified = True
                    break

    if residual is None:
        residual = _residual_for(f, lam, opts.p, opts.mode, directions, ctx)
        certified = residual < 10.0 * opts.tol_rel

    return EigenResult(lam=lam, minimizer=f, iterations=iterations,
                       el_residual=float(residual), history=history,
                       certified=certified, mode=opts.mode, p=opts.p)


def minimize_rayleigh(omega: ShapeSpec, opts: SolveOptions) -> EigenResult:
    """Minimize the Rayleigh p-quotient over masked grid functions on omega.

    Returns the best run when ``opts.multistart > 1`` (perturbed warm starts
    seeded from ``opts.seed``); otherwise one deterministic descent.
    """
    if opts.multistart == 1:
        return _descend(omega, opts, None)
    best = None
    for k in range(opts.multistart):
        rng = np.random.default_rng(opts.seed + k) if k > 0 else None
        result = _descend(omega, opts, rng)
        if best is None or result.lam < best.lam:
            best = result
    return best


def certify(result: EigenResult, ctx: ops.OperatorContext) -> dict:
    """Post-solve checks of the weak form at (minimizer, lambda).

    Pairs the minimizer against itself: the energy term must reproduce
    E_p^p and the mass term lambda ||f||_p^p; also reports the residual over
    the hat basis and the sign/normalization invariants.
    """
    f = result.minimizer
    p = ctx.p
    a, lb = ops.el_pairing_terms(ctx, result.lam, f.values)
    energy_p = ctx.energy ** p
    mass_p = ctx.breakdown.lp_norm ** p
    lam_pairing = a / (lb / result.lam) if lb != 0.0 else np.inf
    residual = ops.el_residual(ctx, result.lam)
    return {
        "lambda": result.lam,
        "lambda_from_pairing": lam_pairing,
        "pairing_energy_term": a,
        "energy_power": energy_p,
        "pairing_mass_term": lb,
        "mass_power_scaled": result.lam * mass_p,
        "el_residual": residual,
        "nonnegative": bool(np.all(f.values >= 0)),
        "normalized": abs(funcspace.lp_norm(f, p) - 1.0) <= 1e-10,
        "certified": bool(result.certified),
    }
