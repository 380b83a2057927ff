"""Nonlinear gauge transformation psi -> |psi| exp[i(z* ln psi + z ln psi*)] on gridded fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedSupport, EmptySupport
from .fields import DEFAULT_FLOOR, ComplexField

__all__ = ["GaugeTransform", "apply_ngt", "compose", "valid_interval", "unwrapped_phase"]


@dataclass(frozen=True)
class GaugeTransform:
    """Transformation parameter z = a + ib.

    The action is psi -> |psi| exp[i(2a ln|psi| + 2b theta)], theta the
    unwrapped phase of psi.
    """

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            raise ValueError("z must be finite")
        object.__setattr__(self, "z", z)

    @property
    def a(self) -> float:
        return self.z.real

    @property
    def b(self) -> float:
        return self.z.imag

    def phase_map(self, log_mod, theta):
        return 2.0 * self.a * log_mod + 2.0 * self.b * theta


def compose(first: GaugeTransform, second: GaugeTransform) -> GaugeTransform:
    """Single transform equal to ``second`` applied after ``first`` (up to a global phase).

    theta -> 2a1 ln r + 2b1 theta, then -> 2a2 ln r + 2b2 (2a1 ln r + 2b1 theta).
    """
    a = second.a + 2.0 * first.a * second.b
    b = 2.0 * first.b * second.b
    return GaugeTransform(complex(a, b))


def valid_interval(rho, floor: float) -> np.ndarray:
    """Boolean mask of rho > floor * max(rho), checked to be one periodic run."""
    rmax = rho.max()
    if rmax == 0.0:
        raise EmptySupport("field vanishes identically")
    mask = rho > floor * rmax
    # count rising edges on the periodic ring
    edges = np.count_nonzero(mask & ~np.roll(mask, 1))
    if edges > 1:
        raise DisconnectedSupport(f"valid set splits into {edges} intervals")
    return mask


def unwrapped_phase(psi, mask) -> np.ndarray:
    """Phase unwrapped along the valid run, anchored at its first point's principal value.

    A run that wraps around the periodic boundary is unwrapped starting from
    its first point after the gap. Entries outside ``mask`` are zero.
    """
    n = psi.size
    theta = np.zeros(n)
    if mask.all():
        order = np.arange(n)
    else:
        start = int(np.nonzero(mask & ~np.roll(mask, 1))[0][0])
        order = (start + np.arange(n)) % n
        order = order[mask[order]]
    theta[order] = np.unwrap(np.angle(psi[order]))
    return theta


def apply_ngt(field: ComplexField, xf: GaugeTransform, floor: float = DEFAULT_FLOOR) -> ComplexField:
    """Apply the gauge transform to ``field``; points with rho <= floor*max(rho) map to 0.

    The result is formed as psi * exp(i(2a ln|psi| + (2b - 1) theta)) so that
    z = i/2 returns the input samples unchanged.

    Raises
    ------
    EmptySupport
        If the field vanishes identically.
    DisconnectedSupport
        If the valid set is not a single (periodic) interval.
    """
    if floor < 0:
        raise ValueError("floor must be >= 0")
    psi = field.values
    rho = field.rho
    mask = valid_interval(rho, floor)
    theta = unwrapped_phase(psi, mask)
    # exact zeros keep their signed-zero bits; nonzero samples below the floor become 0
    out = np.where(rho == 0.0, psi, 0.0).astype(np.complex128)
    p = psi[mask]
    log_mod = 0.5 * np.log(rho[mask])
    # theta = principal + 2 pi m; reduce c * m mod 1 so large unwrapped phases cost no accuracy
    c = 2.0 * xf.b - 1.0
    principal = np.angle(p)
    m = np.rint((theta[mask] - principal) / (2.0 * np.pi))
    shift = 2.0 * xf.a * log_mod + c * principal + 2.0 * np.pi * np.mod(c * m, 1.0)
    out[mask] = p * np.exp(1j * shift)
    return ComplexField(field.grid, out)
