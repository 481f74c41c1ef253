#!/usr/bin/env python3
"""Generate tests/data/golden_constants.json with 50-digit mpmath arithmetic.

The test suite never computes these reference values itself: they are frozen
here once and the library implementation is compared against the frozen file.
Rerun only if the table needs new entries:

    python tools/make_golden_constants.py
"""
from __future__ import annotations

import json
import pathlib

import mpmath as mp

mp.mp.dps = 50


def omega(k) -> mp.mpf:
    """Volume of the unit ball in R^k (k >= 0, real)."""
    k = mp.mpf(k)
    return mp.pi ** (k / 2) / mp.gamma(k / 2 + 1)


def c_np(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    return (n * omega(n)) ** (1 / n) * (
        (n * omega(n) * omega(p - 1)) / (2 * omega(n + p - 2))
    ) ** (1 / p)


def talenti(p) -> mp.mpf:
    p = mp.mpf(p)
    if p == 1:
        return mp.mpf(2)
    return (2 / p) * (p - 1) ** (1 / p - 1) * (mp.pi - mp.pi / p) / mp.sin(mp.pi / p)


def sphere_moment(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    return 2 * omega(n + p - 2) / (n * omega(n) * omega(p - 1))


def huang_li(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    num = (
        mp.pi ** (1 / (2 * p) + mp.mpf(1) / 2)
        * mp.gamma((n + p) / 2) ** (1 / p)
        * mp.gamma(1 + n / p) ** (1 / n)
    )
    den = (
        2 ** (1 / p + 1)
        * mp.gamma(1 + n / 2) ** (1 / n + 1 / p)
        * mp.gamma((p + 1) / 2) ** (1 / p)
        * mp.gamma(1 + 1 / p)
    )
    return num / den


def reverse_zhang_absolute(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    return c_np(n, p) * (
        (2 / n)
        * (omega(n - 1) / omega(n) ** 2)
        * talenti(p) ** (n - 1)
        * sphere_moment(n, p) ** (1 / p)
    ) ** (1 / n)


def centroid_b(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    return omega(n + p) / (omega(2) * omega(n) * omega(p - 1))


def centroid_r(n, p) -> mp.mpf:
    n, p = mp.mpf(n), mp.mpf(p)
    return n * omega(n + p - 2) / (omega(2) * omega(n - 2) * omega(p - 1))


def f(x) -> float:
    return float(mp.mpf(x))


NP_PAIRS = [(2, 1), (2, 1.1), (2, 1.25), (2, 1.5), (2, 2), (2, 2.5), (2, 3), (3, 2), (3, 3)]
GAMMA_POINTS = [0.01, 0.1, 0.25, 0.5, 1.0, 1.5, 2.5, 3.7, 5.0, 7.5, 10.3, 15.25, 19.5, 25.0]
P_POINTS = [1, 1.1, 1.25, 1.5, 2, 2.5, 3]


def main() -> None:
    table = {
        "gamma": {str(x): f(mp.gamma(x)) for x in GAMMA_POINTS},
        "unit_ball_volume": {
            str(k): f(omega(k)) for k in list(range(0, 21)) + [0.5, 1.5, 2.5, 3.5]
        },
        "c_np": {f"{n},{p}": f(c_np(n, p)) for n, p in NP_PAIRS},
        "talenti": {str(p): f(talenti(p)) for p in P_POINTS},
        "sphere_moment": {f"{n},{p}": f(sphere_moment(n, p)) for n, p in NP_PAIRS},
        "huang_li": {f"{n},{p}": f(huang_li(n, p)) for n, p in NP_PAIRS},
        "reverse_zhang_absolute": {
            f"{n},{p}": f(reverse_zhang_absolute(n, p)) for n, p in NP_PAIRS
        },
        "centroid_b": {f"{n},{p}": f(centroid_b(n, p)) for n, p in NP_PAIRS},
        "centroid_r": {f"{n},{p}": f(centroid_r(n, p)) for n, p in NP_PAIRS},
        "bessel_j0_zeros": [f(mp.besseljzero(0, k)) for k in (1, 2, 3)],
        "bessel_j1_zeros": [f(mp.besseljzero(1, k)) for k in (1, 2, 3)],
        "misc": {
            "two_pi_sq": f(2 * mp.pi**2),
            "disk_lambda_p2": f(mp.besseljzero(0, 1) ** 2),
            "square_cheeger": f(2 + mp.sqrt(mp.pi)),
            "c_22_closed_form": f(2 * mp.sqrt(mp.pi)),
            "c_21_closed_form": f(mp.sqrt(2 * mp.pi) * mp.pi / 2),
        },
    }
    out = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_constants.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
