# tests/test_morse_ref.py
import math

import numpy as np
import pytest

from WMorse.core.morse.reference import (
    laguerre,
    level_count,
    morse_eigenfunction,
    morse_eigenvalues,
    morse_overlap,
    morse_potential_fullline,
    morse_potential_minimum,
    shape_invariance_gap,
)
from WMorse.core.types import PotentialParams
from WMorse.utils.errors import DomainError, EmptySpectrum, IndexOutOfSpectrum

WELL = PotentialParams.from_h(1.0, 2.5)


def test_potential_values():
    assert morse_potential_fullline(PotentialParams.from_h(1.0, 0.0), 0.0) == pytest.approx(0.0)
    assert morse_potential_fullline(WELL, 0.0) == pytest.approx(-5.0)
    x_min, v_min = morse_potential_minimum(WELL)
    assert x_min == pytest.approx(math.log(3.0))
    assert v_min == pytest.approx(-9.0)
    assert morse_potential_fullline(WELL, x_min) == pytest.approx(v_min, rel=1e-12)


def test_no_minimum_below_half():
    with pytest.raises(DomainError):
        morse_potential_minimum(PotentialParams.from_h(1.0, -1.0))


def test_eigenvalues():
    assert morse_eigenvalues(WELL) == pytest.approx([-6.25, -2.25, -0.25])
    assert morse_eigenvalues(PotentialParams.from_h(2.0, 1.0)) == pytest.approx([-1.0])
    assert morse_eigenvalues(PotentialParams.from_h(1.0, 0.2)) == pytest.approx([-0.04])
    assert level_count(2.5) == 3
    assert level_count(3.0) == 3


@pytest.mark.parametrize("h", [0.0, -1.0])
def test_empty_spectrum(h):
    with pytest.raises(EmptySpectrum):
        morse_eigenvalues(PotentialParams.from_h(1.0, h))


def test_laguerre_low_degrees():
    x = np.linspace(0.0, 3.0, 7)
    np.testing.assert_allclose(laguerre(0, 1.5, x), 1.0)
    np.testing.assert_allclose(laguerre(1, 1.5, x), 2.5 - x)
    np.testing.assert_allclose(laguerre(2, 0.0, x), 1.0 - 2.0 * x + 0.5 * x * x)
    assert laguerre(2, 0.0, 1.0) == pytest.approx(-0.5)
    with pytest.raises(DomainError):
        laguerre(-1, 0.0, 1.0)


def test_ground_state_value():
    # h x - rho/2 with rho = 2 at x = 0
    assert morse_eigenfunction(WELL, 0, 0.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_level_index_bounds():
    with pytest.raises(IndexOutOfSpectrum):
        morse_eigenfunction(WELL, 3, 0.0)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_node_count(n):
    x = np.linspace(-20.0, 3.0, 4001)
    v = morse_eigenfunction(WELL, n, x)
    v = v[np.abs(v) > 1e-12 * np.max(np.abs(v))]
    assert int(np.sum(np.diff(np.sign(v)) != 0)) == n


@pytest.mark.parametrize("n", [0, 1, 2])
def test_schroedinger_residual(n):
    step = 2e-3
    x = np.linspace(-10.0, 3.0, 261)
    f = lambda t: morse_eigenfunction(WELL, n, t)
    d2 = (-f(x - 2 * step) + 16 * f(x - step) - 30 * f(x) + 16 * f(x + step) - f(x + 2 * step)) / (12 * step * step)
    psi = f(x)
    residual = -d2 + morse_potential_fullline(WELL, x) * psi - morse_eigenvalues(WELL)[n] * psi
    assert np.max(np.abs(residual)) / np.max(np.abs(psi)) < 1e-7


def test_eigenfunctions_orthogonal():
    for n, m in [(0, 1), (0, 2), (1, 2)]:
        overlap = morse_overlap(WELL, n, m)
        norm = math.sqrt(morse_overlap(WELL, n, n) * morse_overlap(WELL, m, m))
        assert abs(overlap) / norm < 1e-8


def test_shape_invariance():
    x = np.linspace(-5.0, 3.0, 33)
    assert np.max(np.abs(shape_invariance_gap(WELL, x))) < 1e-10
    assert np.max(np.abs(shape_invariance_gap(WELL, x, method="superpotential"))) < 1e-8
    other = PotentialParams.from_h(0.5, 1.2)
    assert abs(float(shape_invariance_gap(other, 1.0, method="superpotential"))) < 1e-10


def test_shape_invariance_needs_ground_state():
    with pytest.raises(EmptySpectrum):
        shape_invariance_gap(PotentialParams.from_h(1.0, -0.3), 0.0)
