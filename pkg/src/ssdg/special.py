"""Bessel functions for the radial profiles.

Power series for small argument, Hankel's asymptotic expansion for large
argument. Accuracy target is 1e-10 absolute on the ranges the radial
profiles use; no scipy dependency on this path.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["bessel_j", "spherical_bessel_j", "first_sign_change_root"]

_SWITCH = 12.0


def _j_series(m: int, z: float) -> float:
    half = 0.5 * z
    term = half ** m / math.factorial(m)
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= -q / (k * (k + m))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > half:
            return total
        if k > 500:
            return total


def _hankel_pq(m: int, z: float):
    mu = 4.0 * m * m
    p = 1.0
    q = 0.0
    a = 1.0
    prev = math.inf
    for k in range(1, 60):
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        if abs(a) > prev or a == 0.0:
            break
        prev = abs(a)
        if k % 2:
            q += a if (k // 2) % 2 == 0 else -a
        else:
            p += -a if (k // 2) % 2 else a
        if abs(a) < 1e-17:
            break
    return p, q


def _j_asymptotic(m: int, z: float) -> float:
    p, q = _hankel_pq(m, z)
    chi = z - (0.5 * m + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * z)) * (p * math.cos(chi) - q * math.sin(chi))


def _bessel_j_scalar(m: int, z: float) -> float:
    if z < 0:
        # J_m(-z) = (-1)^m J_m(z)
        return (-1) ** m * _bessel_j_scalar(m, -z)
    if z < _SWITCH or m >= z:
        return _j_series(m, z)
    j0 = _j_asymptotic(0, z)
    if m == 0:
        return j0
    j1 = _j_asymptotic(1, z)
    # upward recurrence is stable while the order stays below z
    for nu in range(1, m):
        j0, j1 = j1, 2.0 * nu / z * j1 - j0
    return j1


def bessel_j(m: int, z):
    """Bessel function of the first kind J_m for integer m >= 0."""
    if m < 0 or int(m) != m:
        raise ValueError("order must be a nonnegative integer")
    m = int(m)
    if np.ndim(z) == 0:
        return _bessel_j_scalar(m, float(z))
    z = np.asarray(z, dtype=float)
    return np.array([_bessel_j_scalar(m, v) for v in z.ravel()]).reshape(z.shape)


def _sph_series(l: int, z: float) -> float:
    dfact = 1.0
    for i in range(1, 2 * l + 2, 2):
        dfact *= i
    term = 1.0
    total = 1.0
    q = -0.5 * z * z
    k = 0
    while True:
        k += 1
        term *= q / (k * (2 * l + 2 * k + 1))
        total += term
        if abs(term) <= 1e-17 * abs(total) or k > 500:
            break
    return z ** l / dfact * total


def _spherical_j_scalar(l: int, z: float) -> float:
    if z < 0:
        return (-1) ** l * _spherical_j_scalar(l, -z)
    if z < max(float(l), 1.0):
        return _sph_series(l, z)
    s, c = math.sin(z), math.cos(z)
    j0 = s / z
    if l == 0:
        return j0
    j1 = s / (z * z) - c / z
    for nu in range(1, l):
        j0, j1 = j1, (2 * nu + 1) / z * j1 - j0
    return j1


def spherical_bessel_j(l: int, z):
    """Spherical Bessel function j_l, with j_0(z) = sin(z)/z."""
    if l < 0 or int(l) != l:
        raise ValueError("order must be a nonnegative integer")
    l = int(l)
    if np.ndim(z) == 0:
        return _spherical_j_scalar(l, float(z))
    z = np.asarray(z, dtype=float)
    return np.array([_spherical_j_scalar(l, v) for v in z.ravel()]).reshape(z.shape)


def first_sign_change_root(f, lo: float, hi: float, n_scan: int = 1000, rtol: float = 0.0,
                           max_expand: int = 8) -> float:
    """Locate the first sign change of ``f`` on [lo, hi] by scanning, then bisect.

    The upper bound doubles (up to ``max_expand`` times) when the scan finds no
    sign change. Bisection runs until the bracket is below ``rtol`` relative
    (default: until it cannot be split further in floating point).
    """
    for _ in range(max_expand + 1):
        grid = np.linspace(lo, hi, n_scan + 1)
        vals = np.array([f(r) for r in grid])
        sign = np.sign(vals)
        idx = np.nonzero(sign[:-1] * sign[1:] <= 0)[0]
        if idx.size:
            i = int(idx[0])
            a, b = grid[i], grid[i + 1]
            fa = vals[i]
            if fa == 0.0:
                return float(a)
            if vals[i + 1] == 0.0:
                return float(b)
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ValueError("no sign change found")

    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = f(mid)
        if fm == 0.0:
            return float(mid)
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
        if b - a <= rtol * abs(a):
            break
    return float(0.5 * (a + b))
