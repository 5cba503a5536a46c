# tests/test_spectrum.py
"""
Spectrum and eigenfunctions of the symmetric Morse potential.
"""

import math

import numpy as np
import pytest

from conftest import DEEP_WELL, FREE_KINK, REPULSIVE
from WMorse.core.oracle.finite_difference import symmetric_half_line_spectrum
from WMorse.core.special.bessel import bessel_k_imag_order
from WMorse.core.spectrum.eigenfunctions import eigenfunction, eigenfunction_for, eigenfunction_sampled
from WMorse.core.spectrum.matching import matching_coefficients, matching_residual
from WMorse.core.spectrum.potential import (
    classical_turning_point,
    potential_floor,
    right_branch_potential,
    symmetric_potential,
)
from WMorse.core.spectrum import solver
from WMorse.core.spectrum.solver import compute_spectrum, scan_roots
from WMorse.core.types import EigenLevel, OrderKind, OrderParam, Parity, PotentialParams
from WMorse.utils.errors import DomainError, IncompleteSpectrum, ParityOrderViolation


def _sign_changes(values):
    v = values[np.abs(values) > 1e-10 * np.max(np.abs(values))]
    return int(np.sum(np.diff(np.sign(v)) != 0))


def test_potential_shape():
    assert symmetric_potential(PotentialParams(1.0, 0.0), 0.0) == pytest.approx(1.0)
    assert symmetric_potential(DEEP_WELL, 0.0) == pytest.approx(-5.0)
    x = np.linspace(0.1, 3.0, 9)
    np.testing.assert_array_equal(symmetric_potential(REPULSIVE, x), symmetric_potential(REPULSIVE, -x))
    np.testing.assert_allclose(right_branch_potential(REPULSIVE, x), symmetric_potential(REPULSIVE, x), rtol=1e-14)


def test_levels_alternate_and_increase(repulsive_levels):
    assert [lv.index for lv in repulsive_levels] == list(range(10))
    for lv in repulsive_levels:
        assert lv.parity is Parity.of_index(lv.index)
    energies = [lv.energy for lv in repulsive_levels]
    assert all(a < b for a, b in zip(energies, energies[1:]))
    # E_0 lies above V(0) = g(g - k) for k <= 0
    assert energies[0] > REPULSIVE.g * (REPULSIVE.g - REPULSIVE.k)


def test_negative_levels_come_first(well_levels):
    negative = [lv for lv in well_levels if lv.energy < 0]
    assert negative, "k = 3 binds at least one level"
    assert well_levels[: len(negative)] == negative
    for lv in negative:
        assert lv.order.kind is OrderKind.REAL
        assert -DEEP_WELL.k ** 2 < lv.energy < 0
    assert potential_floor(DEEP_WELL) < well_levels[0].energy


@pytest.mark.parametrize(
    "fixture, params",
    [("repulsive_levels", REPULSIVE), ("kink_levels", FREE_KINK), ("well_levels", DEEP_WELL)],
)
def test_agrees_with_finite_differences(request, fixture, params):
    levels = request.getfixturevalue(fixture)[:8]
    oracle = symmetric_half_line_spectrum(lambda x: symmetric_potential(params, x), len(levels))
    for lv, e in zip(levels, oracle):
        assert abs(lv.energy - e) / max(abs(e), 1e-12) < 1e-4, f"level {lv.index}"


def test_small_coupling_agrees_with_finite_differences():
    params = PotentialParams(0.5, 1.5)
    levels = compute_spectrum(params, 6)
    oracle = symmetric_half_line_spectrum(lambda x: symmetric_potential(params, x), 6)
    for lv, e in zip(levels, oracle):
        assert abs(lv.energy - e) / max(abs(e), 1e-12) < 1e-4


def test_odd_levels_are_bessel_zeros(kink_levels):
    # k = 0: W_{0, i nu}(2) = sqrt(2/pi) K_{i nu}(1), so odd levels are zeros of K_{i nu}(1)
    for lv in kink_levels:
        if lv.parity is not Parity.ODD:
            continue
        nu = lv.order.value
        assert bessel_k_imag_order(nu - 1e-4, 1.0) * bessel_k_imag_order(nu + 1e-4, 1.0) < 0


def test_residual_changes_sign_at_a_level(repulsive_levels):
    for lv in repulsive_levels[:4]:
        lo = matching_residual(REPULSIVE, lv.parity, lv.energy - 1e-4)
        hi = matching_residual(REPULSIVE, lv.parity, lv.energy + 1e-4)
        assert lo * hi < 0


def test_matching_coefficients(repulsive_levels):
    e = repulsive_levels[0].energy + 0.3
    coeffs = matching_coefficients(REPULSIVE, e)
    assert math.isnan(coeffs.A) and math.isnan(coeffs.C)
    assert coeffs.B == pytest.approx(matching_residual(REPULSIVE, Parity.EVEN, e), rel=1e-12)
    assert coeffs.D == pytest.approx(matching_residual(REPULSIVE, Parity.ODD, e), rel=1e-12)


def test_no_roots_below_the_floor():
    params = PotentialParams(1.0, -1.0)
    for parity in Parity:
        assert scan_roots(params, parity, 0.01, 1.99) == []


def test_scan_roots_unpack_as_pairs(repulsive_levels):
    target = repulsive_levels[0]
    roots = scan_roots(REPULSIVE, Parity.EVEN, target.energy - 0.5, target.energy + 0.5)
    assert len(roots) == 1
    energy, residual = roots[0]
    assert energy == pytest.approx(target.energy, abs=1e-9)
    assert abs(residual) < 1e-6


def test_scan_rejects_straddling_window():
    with pytest.raises(DomainError):
        scan_roots(DEEP_WELL, Parity.EVEN, -1.0, 1.0)


def test_invalid_requests():
    with pytest.raises(DomainError):
        compute_spectrum(REPULSIVE, 0)
    with pytest.raises(DomainError):
        EigenLevel(index=1, parity=Parity.EVEN, order=OrderParam.imaginary(2.0), energy=4.0, residual=0.0)


def test_turning_point():
    x_t = classical_turning_point(REPULSIVE, 9.0)
    assert symmetric_potential(REPULSIVE, x_t) == pytest.approx(9.0, rel=1e-12)


# ---- eigenfunctions ----

def test_parity_at_origin(repulsive_levels):
    for lv in repulsive_levels[:6]:
        f = eigenfunction_for(REPULSIVE, lv)
        psi, dpsi = f.right_branch(np.array([0.0]))
        scale = np.max(np.abs(eigenfunction(REPULSIVE, lv, np.linspace(0.0, 3.0, 61))))
        if lv.parity is Parity.ODD:
            assert eigenfunction(REPULSIVE, lv, 0.0) == 0.0
            assert abs(psi[0]) < 1e-6 * scale
        else:
            assert abs(dpsi[0]) < 1e-6 * scale


def test_symmetry_on_a_grid(repulsive_levels):
    x = np.linspace(0.05, 3.0, 40)
    for lv in repulsive_levels[:4]:
        right = eigenfunction(REPULSIVE, lv, x)
        left = eigenfunction(REPULSIVE, lv, -x)
        np.testing.assert_allclose(left, lv.parity.sign * right, rtol=1e-14, atol=0.0)


@pytest.mark.parametrize("m", range(6))
def test_node_count(repulsive_levels, m):
    x = np.linspace(-4.0, 4.0, 4001)
    assert _sign_changes(eigenfunction(REPULSIVE, repulsive_levels[m], x)) == m


def test_unit_norm(repulsive_levels):
    x = np.linspace(-5.0, 5.0, 20001)
    for lv in repulsive_levels[:4]:
        psi = eigenfunction(REPULSIVE, lv, x)
        assert np.trapezoid(psi * psi, x) == pytest.approx(1.0, abs=1e-6)


def test_schroedinger_residual(repulsive_levels):
    step = 1e-2
    x = np.linspace(0.05, 3.0, 60)
    for lv in repulsive_levels[:4]:
        f = lambda t: eigenfunction(REPULSIVE, lv, t)
        d2 = (-f(x - 2 * step) + 16 * f(x - step) - 30 * f(x) + 16 * f(x + step) - f(x + 2 * step)) / (12 * step * step)
        psi = f(x)
        residual = -d2 + (symmetric_potential(REPULSIVE, x) - lv.energy) * psi
        assert np.max(np.abs(residual)) / np.max(np.abs(psi)) < 1e-5


def test_sampled_eigenfunction(repulsive_levels):
    half = 0.02 * np.arange(1, 151)
    grid = np.concatenate([-half[::-1], [0.0], half])
    f = eigenfunction_sampled(REPULSIVE, repulsive_levels[1], grid)
    assert f.values.shape == grid.shape
    assert f.values[150] == 0.0
    # odd psi has an even derivative
    np.testing.assert_allclose(f.derivs[::-1], f.derivs, rtol=1e-12)


def capped_scan(monkeypatch, e_cap):
    """Restrict every root scan to E < e_cap."""
    real = solver.scan_roots

    def capped(params, parity, e_lo, e_hi, *args, **kwargs):
        if e_lo >= e_cap:
            return []
        return real(params, parity, e_lo, min(e_hi, e_cap), *args, **kwargs)

    monkeypatch.setattr(solver, "scan_roots", capped)


def test_truncated_window_is_incomplete(monkeypatch, repulsive_levels):
    e_cap = 0.5 * (repulsive_levels[2].energy + repulsive_levels[3].energy)
    capped_scan(monkeypatch, e_cap)
    assert [lv.energy for lv in compute_spectrum(REPULSIVE, 3)] == pytest.approx([lv.energy for lv in repulsive_levels[:3]], rel=1e-8)
    with pytest.raises(IncompleteSpectrum, match="found 3 of 6"):
        compute_spectrum(REPULSIVE, 6)


def test_misassigned_parity_is_rejected(monkeypatch):
    real = solver.scan_roots
    swap = {Parity.EVEN: Parity.ODD, Parity.ODD: Parity.EVEN}

    def swapped(params, parity, *args, **kwargs):
        return real(params, swap[parity], *args, **kwargs)

    monkeypatch.setattr(solver, "scan_roots", swapped)
    with pytest.raises(ParityOrderViolation, match="level 0"):
        compute_spectrum(REPULSIVE, 2)
