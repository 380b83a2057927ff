"""Hot loops: the pointwise nonlinearity, FD derivatives and the RK4 driver.

Each kernel has a numba version and a pure-numpy version with identical
semantics. The numba path is used when numba imports and the environment
variable ``SSDG_DISABLE_NUMBA`` is unset (or ``0``); :func:`use_backend`
switches at runtime for comparisons.
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

__all__ = [
    "BACKEND",
    "available_backends",
    "use_backend",
    "set_backend",
    "fd_derivatives",
    "omega_pointwise",
    "omega_psi_fd",
    "rk4_fd_advance",
]


def _env_disabled() -> bool:
    return os.environ.get("SSDG_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


BACKEND = "numba" if (numba is not None and not _env_disabled()) else "numpy"


def available_backends() -> tuple:
    return ("numba", "numpy") if numba is not None else ("numpy",)


def set_backend(name: str) -> None:
    global BACKEND
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available; choose from {available_backends()}")
    BACKEND = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _fd_derivatives_np(psi, dx):
    up = np.roll(psi, -1)
    dn = np.roll(psi, 1)
    return (up - dn) / (2.0 * dx), (up - 2.0 * psi + dn) / (dx * dx)


def _omega_pointwise_np(psi, d1, d2, lam, D, Dtilde, thr):
    rho = psi.real ** 2 + psi.imag ** 2
    out = np.zeros(psi.shape, dtype=np.complex128)
    m = rho > thr
    if not m.any():
        return out
    p = psi[m]
    r = rho[m]
    a = d1[m] * np.conj(p) / r
    b = d2[m] * np.conj(p) / r
    a2 = a * a
    abs_a2 = a.real ** 2 + a.imag ** 2
    real_part = Dtilde * (
        lam[0] * b.real + lam[1] * b.imag + lam[2] * a2.real + lam[3] * a2.imag + lam[4] * abs_a2
    )
    # I = (D/2) rho''/rho with rho''/rho = 2 (Re b + |a|^2)
    imag_part = D * (b.real + abs_a2)
    out[m] = real_part + 1j * imag_part
    return out


def _omega_psi_fd_np(psi, dx, lam, D, Dtilde, floor):
    rho = psi.real ** 2 + psi.imag ** 2
    thr = floor * rho.max() if rho.size else 0.0
    d1, d2 = _fd_derivatives_np(psi, dx)
    return _omega_pointwise_np(psi, d1, d2, lam, D, Dtilde, thr) * psi


def _rk4_fd_advance_np(psi, dx, dt, nsteps, lam, D, Dtilde, floor, growth_limit):
    def rhs(u):
        _, d2 = _fd_derivatives_np(u, dx)
        return 1j * (0.5 * d2 - _omega_psi_fd_np(u, dx, lam, D, Dtilde, floor))

    u = psi.copy()
    for step in range(nsteps):
        before = np.abs(u).max()
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        after = np.abs(new).max()
        if not np.isfinite(after) or (before > 0.0 and after > growth_limit * before):
            return u, step
        u = new
    return u, -1


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _fd_derivatives_nb(psi, dx):
        n = psi.size
        d1 = np.empty_like(psi)
        d2 = np.empty_like(psi)
        inv2 = 1.0 / (2.0 * dx)
        invsq = 1.0 / (dx * dx)
        for i in range(n):
            ip = i + 1 if i + 1 < n else 0
            im = i - 1 if i > 0 else n - 1
            d1[i] = (psi[ip] - psi[im]) * inv2
            d2[i] = (psi[ip] - 2.0 * psi[i] + psi[im]) * invsq
        return d1, d2

    @numba.njit(cache=True, inline="always")
    def _omega_at(p, d1, d2, r, lam, D, Dtilde):
        pc = p.conjugate()
        a = d1 * pc / r
        b = d2 * pc / r
        a2 = a * a
        abs_a2 = a.real * a.real + a.imag * a.imag
        re = Dtilde * (
            lam[0] * b.real + lam[1] * b.imag + lam[2] * a2.real + lam[3] * a2.imag + lam[4] * abs_a2
        )
        return complex(re, D * (b.real + abs_a2))

    @numba.njit(cache=True)
    def _omega_pointwise_nb(psi, d1, d2, lam, D, Dtilde, thr):
        n = psi.size
        out = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            p = psi[i]
            r = p.real * p.real + p.imag * p.imag
            if r > thr:
                out[i] = _omega_at(p, d1[i], d2[i], r, lam, D, Dtilde)
        return out

    @numba.njit(cache=True)
    def _rhs_fd_nb(psi, dx, lam, D, Dtilde, floor, out):
        # out = i (psi''/2 - Omega{psi} psi), periodic central differences
        n = psi.size
        rmax = 0.0
        for i in range(n):
            r = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            if r > rmax:
                rmax = r
        thr = floor * rmax
        inv2 = 1.0 / (2.0 * dx)
        invsq = 1.0 / (dx * dx)
        for i in range(n):
            ip = i + 1 if i + 1 < n else 0
            im = i - 1 if i > 0 else n - 1
            p = psi[i]
            d1 = (psi[ip] - psi[im]) * inv2
            d2 = (psi[ip] - 2.0 * p + psi[im]) * invsq
            r = p.real * p.real + p.imag * p.imag
            nl = 0j
            if r > thr:
                nl = _omega_at(p, d1, d2, r, lam, D, Dtilde) * p
            out[i] = 1j * (0.5 * d2 - nl)

    @numba.njit(cache=True)
    def _omega_psi_fd_nb(psi, dx, lam, D, Dtilde, floor):
        n = psi.size
        rmax = 0.0
        for i in range(n):
            r = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            if r > rmax:
                rmax = r
        thr = floor * rmax
        d1, d2 = _fd_derivatives_nb(psi, dx)
        out = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            p = psi[i]
            r = p.real * p.real + p.imag * p.imag
            if r > thr:
                out[i] = _omega_at(p, d1[i], d2[i], r, lam, D, Dtilde) * p
        return out

    @numba.njit(cache=True)
    def _max_abs(u):
        m = 0.0
        for i in range(u.size):
            a = abs(u[i])
            if not a <= m:  # also catches NaN
                m = a
        return m

    @numba.njit(cache=True)
    def _rk4_fd_advance_nb(psi, dx, dt, nsteps, lam, D, Dtilde, floor, growth_limit):
        n = psi.size
        u = psi.copy()
        k1 = np.empty_like(u)
        k2 = np.empty_like(u)
        k3 = np.empty_like(u)
        k4 = np.empty_like(u)
        tmp = np.empty_like(u)
        new = np.empty_like(u)
        half = 0.5 * dt
        sixth = dt / 6.0
        for step in range(nsteps):
            before = _max_abs(u)
            _rhs_fd_nb(u, dx, lam, D, Dtilde, floor, k1)
            for i in range(n):
                tmp[i] = u[i] + half * k1[i]
            _rhs_fd_nb(tmp, dx, lam, D, Dtilde, floor, k2)
            for i in range(n):
                tmp[i] = u[i] + half * k2[i]
            _rhs_fd_nb(tmp, dx, lam, D, Dtilde, floor, k3)
            for i in range(n):
                tmp[i] = u[i] + dt * k3[i]
            _rhs_fd_nb(tmp, dx, lam, D, Dtilde, floor, k4)
            for i in range(n):
                new[i] = u[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            after = _max_abs(new)
            if not np.isfinite(after) or (before > 0.0 and after > growth_limit * before):
                return u, step
            for i in range(n):
                u[i] = new[i]
        return u, -1


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _as_c128(psi):
    return np.ascontiguousarray(psi, dtype=np.complex128)


def _as_lam(lam):
    return np.ascontiguousarray([float(v) for v in lam], dtype=np.float64)


def fd_derivatives(psi, dx):
    """First and second periodic central differences of a complex array."""
    psi = _as_c128(psi)
    if BACKEND == "numba":
        return _fd_derivatives_nb(psi, float(dx))
    return _fd_derivatives_np(psi, float(dx))


def omega_pointwise(psi, d1, d2, lam, D, Dtilde, thr):
    """Complex Omega{psi} from samples and derivatives; zero where |psi|^2 <= thr."""
    args = (_as_c128(psi), _as_c128(d1), _as_c128(d2), _as_lam(lam), float(D), float(Dtilde), float(thr))
    if BACKEND == "numba":
        return _omega_pointwise_nb(*args)
    return _omega_pointwise_np(*args)


def omega_psi_fd(psi, dx, lam, D, Dtilde, floor):
    """Omega{psi} psi with FD derivatives and a relative density floor."""
    args = (_as_c128(psi), float(dx), _as_lam(lam), float(D), float(Dtilde), float(floor))
    if BACKEND == "numba":
        return _omega_psi_fd_nb(*args)
    return _omega_psi_fd_np(*args)


def rk4_fd_advance(psi, dx, dt, nsteps, lam, D, Dtilde, floor, growth_limit=10.0):
    """Advance ``nsteps`` classical RK4 steps of the method-of-lines system.

    Returns ``(psi, failed_step)``; ``failed_step`` is -1 on success, otherwise
    the index of the step whose output exceeded ``growth_limit`` times the
    input amplitude (``psi`` is then the last accepted state).
    """
    args = (
        _as_c128(psi), float(dx), float(dt), int(nsteps), _as_lam(lam),
        float(D), float(Dtilde), float(floor), float(growth_limit),
    )
    if BACKEND == "numba":
        return _rk4_fd_advance_nb(*args)
    return _rk4_fd_advance_np(*args)
