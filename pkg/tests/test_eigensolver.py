"""Eigensolver tests: oracle cross-checks, descent quality, invariances.

The p = 2 oracle (shift-invert Lanczos on the 5-point Laplacian) shares no
code with the descent path, so agreement between the two validates both.
Measured values quoted in comments are at the stated grid/direction counts.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from affinepl import eigensolver as es
from affinepl import funcspace as fs
from affinepl import geometry as geo
from affinepl import operators as ops
from affinepl.eigensolver import EigenResult, SolveOptions
from affinepl.funcspace import GridFunction
from affinepl.geometry import DirectionSet, ShapeSpec

SQUARE = ShapeSpec.unit_square()
DISK_HALF = ShapeSpec.disk(0.5, (0.5, 0.5))
DISK_UNIT = ShapeSpec.disk(1.0, (0.0, 0.0))
J01 = 2.404825557695773  # first zero of the Bessel function J0


# ---------------------------------------------------------------------------
# p = 2 oracle
# ---------------------------------------------------------------------------


class TestClassicalOracle:
    def test_square_matches_closed_form(self):
        # the 5-point Dirichlet eigenvalue on the unit square is exactly
        # (8/h^2) sin^2(pi h / 2) for 1/h an integer
        n = 64
        lam = es.classical_eigen_oracle(SQUARE, 1.0 / n)
        closed = 8.0 * n**2 * math.sin(math.pi / (2 * n)) ** 2
        assert lam == pytest.approx(closed, rel=1e-8)
        assert lam == pytest.approx(2.0 * math.pi**2, rel=0.01)

    def test_unit_disk_matches_bessel(self):
        lam = es.classical_eigen_oracle(DISK_UNIT, 1.0 / 64)
        assert lam == pytest.approx(J01**2, rel=0.02)

    def test_descent_reaches_oracle_from_scratch(self):
        # bump start shares nothing with the Lanczos path
        opts = SolveOptions(p=2.0, h=1.0 / 32, mode="classical", init="bump",
                            max_iterations=800, tol_rel=1e-9)
        r = es.minimize_rayleigh(SQUARE, opts)
        oracle = es.classical_eigen_oracle(SQUARE, 1.0 / 32)
        assert r.lam == pytest.approx(oracle, rel=1e-6)


# ---------------------------------------------------------------------------
# Descent examples
# ---------------------------------------------------------------------------


class TestDescent:
    def test_classical_square_certifies_on_oracle(self):
        opts = SolveOptions(p=2.0, h=1.0 / 64, mode="classical",
                            max_iterations=400, tol_rel=1e-8)
        r = es.minimize_rayleigh(SQUARE, opts)
        oracle = es.classical_eigen_oracle(SQUARE, 1.0 / 64)
        assert r.lam == pytest.approx(oracle, rel=1e-10)
        assert r.certified
        assert r.el_residual < 1e-7

    def test_classical_disk(self):
        opts = SolveOptions(p=2.0, h=1.0 / 64, mode="classical",
                            max_iterations=400, tol_rel=1e-8)
        r = es.minimize_rayleigh(DISK_HALF, opts)
        oracle = es.classical_eigen_oracle(DISK_HALF, 1.0 / 64)
        assert r.lam == pytest.approx(oracle, rel=1e-10)
        assert r.certified

    def test_affine_disk_p2_matches_classical(self):
        # at p = 2 on a disk the affine and classical first eigenvalues
        # coincide (measured gap 3.9e-5 at h=1/48, M=64)
        opts = SolveOptions(p=2.0, h=1.0 / 48, directions=64, mode="affine",
                            max_iterations=500, tol_rel=1e-6)
        r = es.minimize_rayleigh(DISK_HALF, opts)
        oracle = es.classical_eigen_oracle(DISK_HALF, 1.0 / 48)
        assert r.lam == pytest.approx(oracle, rel=0.03)
        assert r.certified

    def test_affine_disk_p3_certifies(self):
        opts = SolveOptions(p=3.0, h=1.0 / 64, directions=128, mode="affine",
                            max_iterations=300, tol_rel=1e-7)
        r = es.minimize_rayleigh(DISK_HALF, opts)
        assert r.certified
        assert r.el_residual < 1e-6
        assert r.lam > 0

    def test_affine_p15_from_bump(self):
        opts = SolveOptions(p=1.5, h=1.0 / 32, directions=64, mode="affine",
                            init="bump", max_iterations=300, tol_rel=1e-6)
        r = es.minimize_rayleigh(SQUARE, opts)
        assert r.certified
        assert r.lam > 0

    def test_affine_lambda_below_classical_quotient(self):
        # the directional energy never exceeds the gradient norm, so the
        # affine quotient of the minimizer sits below its classical quotient
        opts = SolveOptions(p=2.0, h=1.0 / 32, directions=64, mode="affine",
                            max_iterations=200, tol_rel=1e-6)
        r = es.minimize_rayleigh(SQUARE, opts)
        assert r.lam <= fs.rayleigh_classical(r.minimizer, 2.0) * (1 + 1e-8)

    def test_init_modes_reach_same_minimum(self):
        base = SolveOptions(p=2.0, h=1.0 / 32, mode="classical",
                            max_iterations=100, tol_rel=1e-9)
        warm = es.minimize_rayleigh(SQUARE, base)
        from dataclasses import replace
        bump = es.minimize_rayleigh(
            SQUARE, replace(base, init="bump", max_iterations=800))
        assert bump.lam == pytest.approx(warm.lam, rel=1e-6)

    def test_file_init(self):
        f = fs.builtin_function("bump", SQUARE, 1.0 / 32)
        opts = SolveOptions(p=2.0, h=1.0 / 32, mode="classical", init="file",
                            init_function=f, max_iterations=400, tol_rel=1e-8)
        r = es.minimize_rayleigh(SQUARE, opts)
        oracle = es.classical_eigen_oracle(SQUARE, 1.0 / 32)
        assert r.lam == pytest.approx(oracle, rel=1e-4)


# ---------------------------------------------------------------------------
# Result invariants
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def result():
    opts = SolveOptions(p=1.5, h=1.0 / 32, directions=64, mode="affine",
                        init="bump", max_iterations=300, tol_rel=1e-6)
    return es.minimize_rayleigh(SQUARE, opts)


class TestResultInvariants:
    def test_history_nonincreasing(self, result):
        hist = np.asarray(result.history)
        assert np.all(np.diff(hist) <= 1e-14 * hist[0])

    def test_minimizer_nonnegative_and_masked(self, result):
        f = result.minimizer
        assert np.all(f.values >= 0)
        assert np.all(f.values[~f.mask] == 0)

    def test_minimizer_normalized(self, result):
        assert fs.lp_norm(result.minimizer, 1.5) == pytest.approx(1.0, abs=1e-10)

    def test_quotient_consistent(self, result):
        lam = fs.rayleigh_affine(result.minimizer, 1.5, DirectionSet.uniform(64))
        assert lam == pytest.approx(result.lam, rel=1e-10)

    def test_metadata(self, result):
        assert result.mode == "affine"
        assert result.p == 1.5
        assert result.iterations <= 300
        assert result.el_residual >= 0


# ---------------------------------------------------------------------------
# Invariance of the affine eigenvalue
# ---------------------------------------------------------------------------


class TestAffineInvariance:
    def test_integer_shear_moves_affine_by_grid_error_only(self):
        # measured gap 2.2% at h=1/64, M=64 (staircase boundary layer of the
        # sheared window); the classical eigenvalue moves by 34%
        a = np.array([[1.0, 1.0], [0.0, 1.0]])
        sheared = geo.apply_linear(SQUARE, a)
        opts = SolveOptions(p=2.0, h=1.0 / 64, directions=64, mode="affine",
                            max_iterations=600, tol_rel=1e-7)
        r1 = es.minimize_rayleigh(SQUARE, opts)
        r2 = es.minimize_rayleigh(sheared, opts)
        assert abs(r1.lam - r2.lam) / r1.lam < 0.03
        c1 = es.classical_eigen_oracle(SQUARE, 1.0 / 64)
        c2 = es.classical_eigen_oracle(sheared, 1.0 / 64)
        assert abs(c1 - c2) / c1 > 0.2


# ---------------------------------------------------------------------------
# Determinism and multistart
# ---------------------------------------------------------------------------


class TestDeterminism:
    def test_same_options_bit_identical(self):
        opts = SolveOptions(p=2.0, h=1.0 / 32, directions=64, mode="affine",
                            multistart=2, max_iterations=120, tol_rel=1e-7,
                            seed=3)
        ra = es.minimize_rayleigh(SQUARE, opts)
        rb = es.minimize_rayleigh(SQUARE, opts)
        assert ra.lam == rb.lam
        assert np.array_equal(ra.history, rb.history)
        assert np.array_equal(ra.minimizer.values, rb.minimizer.values)

    def test_multistart_returns_best(self):
        single = SolveOptions(p=2.0, h=1.0 / 32, directions=64, mode="affine",
                              max_iterations=200, tol_rel=1e-6)
        multi = SolveOptions(p=2.0, h=1.0 / 32, directions=64, mode="affine",
                             max_iterations=200, tol_rel=1e-6, multistart=3,
                             seed=1)
        r1 = es.minimize_rayleigh(SQUARE, single)
        r3 = es.minimize_rayleigh(SQUARE, multi)
        assert r3.lam <= r1.lam + 1e-12 * r1.lam


# ---------------------------------------------------------------------------
# Certification report
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def solved():
    opts = SolveOptions(p=2.0, h=1.0 / 64, directions=64, mode="affine",
                        max_iterations=600, tol_rel=1e-7)
    r = es.minimize_rayleigh(SQUARE, opts)
    ctx = ops.make_context(r.minimizer, 2.0, DirectionSet.uniform(64))
    return r, ctx


class TestCertify:
    def test_pairing_reproduces_powers(self, solved):
        r, ctx = solved
        report = es.certify(r, ctx)
        assert report["pairing_energy_term"] == pytest.approx(
            report["energy_power"], rel=1e-10)
        assert report["pairing_mass_term"] == pytest.approx(
            report["mass_power_scaled"], rel=1e-10)
        assert report["lambda_from_pairing"] == pytest.approx(r.lam, rel=1e-6)

    def test_certified_run_passes_checks(self, solved):
        r, ctx = solved
        report = es.certify(r, ctx)
        assert report["certified"]
        assert report["el_residual"] < 1e-6
        assert report["nonnegative"]
        assert report["normalized"]

    def test_noise_breaks_certification(self, solved):
        r, _ = solved
        rng = np.random.default_rng(0)
        f = r.minimizer
        noisy_vals = f.values * (1 + 0.2 * rng.standard_normal(f.values.shape)
                                 * f.mask)
        noisy = f.with_values(np.abs(noisy_vals))
        nctx = ops.make_context(noisy, 2.0, DirectionSet.uniform(64))
        lam = fs.rayleigh_affine(noisy, 2.0, DirectionSet.uniform(64))
        assert ops.el_residual(nctx, lam) > 50 * max(r.el_residual, 1e-12)


# ---------------------------------------------------------------------------
# Options validation
# ---------------------------------------------------------------------------


class TestOptionsValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError, match="tol_rel"):
            SolveOptions(tol_rel=0.0)
        with pytest.raises(ValueError, match="multiple of 4"):
            SolveOptions(directions=62)
        with pytest.raises(ValueError, match="spacing"):
            SolveOptions(h=-0.1)
        with pytest.raises(ValueError, match="mode"):
            SolveOptions(mode="dual")
        with pytest.raises(ValueError, match="init"):
            SolveOptions(init="zeros")
        with pytest.raises(ValueError, match="p > 1"):
            SolveOptions(p=1.0)
        with pytest.raises(ValueError, match="multistart"):
            SolveOptions(multistart=0)

    def test_file_init_requires_function(self):
        opts = SolveOptions(init="file")
        with pytest.raises(ValueError, match="init_function"):
            es.minimize_rayleigh(SQUARE, opts)
