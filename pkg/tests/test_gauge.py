import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssdg import analytic, coeffs as cf
from ssdg.coeffs import NonlinearCoeffs
from ssdg.errors import DisconnectedSupport, EmptySupport
from ssdg.fields import ComplexField, make_grid
from ssdg.gauge import GaugeTransform, apply_ngt, compose, unwrapped_phase

GRID = make_grid(-6, 6, 256)
X = GRID.x


def _chirped(c=0.0):
    return np.exp(-(X - c) ** 2 / 2) * np.exp(1j * (2 * X + 0.7 * X ** 2))


def test_identity_elements():
    fld = ComplexField(GRID, _chirped())
    assert np.array_equal(apply_ngt(fld, GaugeTransform(0.5j), floor=0).values, fld.values)
    stripped = apply_ngt(fld, GaugeTransform(0), floor=0).values
    np.testing.assert_allclose(stripped, np.abs(fld.values), rtol=0, atol=1e-15)


def test_phase_formula():
    psi = _chirped()
    fld = ComplexField(GRID, psi)
    z = 0.3 - 0.8j
    out = apply_ngt(fld, GaugeTransform(z), floor=0).values
    theta = np.unwrap(np.angle(psi))
    expected = np.abs(psi) * np.exp(1j * (2 * z.real * np.log(np.abs(psi)) + 2 * z.imag * theta))
    np.testing.assert_allclose(out, expected, atol=1e-12)


complexes = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(complexes, complexes)
def test_composition(z1, z2):
    fld = ComplexField(GRID, _chirped(0.5))
    t1, t2 = GaugeTransform(z1), GaugeTransform(z2)
    two = apply_ngt(apply_ngt(fld, t1), t2).values
    one = apply_ngt(fld, compose(t1, t2)).values
    m = np.abs(one) > 0
    inner = np.vdot(one[m], two[m])
    phase = inner / abs(inner)
    assert np.max(np.abs(two[m] - phase * one[m])) <= 1e-10 * np.abs(one).max()


@settings(max_examples=50, deadline=None)
@given(complexes)
def test_modulus_preserved(z):
    fld = ComplexField(GRID, _chirped(-1.0))
    out = apply_ngt(fld, GaugeTransform(z))
    valid = out.rho > 0
    assert np.max(np.abs(np.abs(out.values) - np.abs(fld.values))[valid]) <= 1e-12 * np.abs(fld.values).max()


def test_floor_zeroes_tails():
    fld = ComplexField(GRID, _chirped())
    out = apply_ngt(fld, GaugeTransform(0.2 + 0.1j), floor=1e-6)
    small = fld.rho <= 1e-6 * fld.rho.max()
    assert np.all(out.values[small] == 0) and small.any()


def test_fls_gauge_keeps_support():
    sol = analytic.build_fls(1.0, 1.0, cf.derive_params(NonlinearCoeffs.simpl(0.5)))
    fld = analytic.sample(sol, GRID)
    out = apply_ngt(fld, GaugeTransform(0))
    np.testing.assert_allclose(out.values.real, np.abs(fld.values), atol=1e-15)


def test_wrapping_support_is_single_interval():
    psi = np.exp(-(X - 6) ** 2) + np.exp(-(X + 6) ** 2)
    out = apply_ngt(ComplexField(GRID, psi * np.exp(1j * X)), GaugeTransform(0.5j), floor=1e-3)
    assert np.any(out.rho > 0)
    mask = np.zeros(8, bool)
    mask[[6, 7, 0, 1]] = True
    theta = unwrapped_phase(np.exp(3j * ((np.arange(8) - 6) % 8)), mask)
    steps = np.diff(theta[[6, 7, 0, 1]])
    np.testing.assert_allclose(steps, 3.0, atol=1e-12)
    assert theta[6] == 0.0
    assert np.all(theta[~mask] == 0)


def test_disconnected_and_empty():
    psi = np.exp(-(X - 2) ** 2 * 4) + np.exp(-(X + 2) ** 2 * 4)
    with pytest.raises(DisconnectedSupport):
        apply_ngt(ComplexField(GRID, psi), GaugeTransform(0.1), floor=1e-3)
    with pytest.raises(EmptySupport):
        apply_ngt(ComplexField(GRID, np.zeros(GRID.n)), GaugeTransform(0.1))


def test_transform_fields():
    t = GaugeTransform(1 - 2j)
    assert (t.a, t.b) == (1.0, -2.0)
    with pytest.raises(ValueError):
        GaugeTransform(complex("nan"))
