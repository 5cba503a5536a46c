# tests/test_analysis.py
"""
Orthogonality Gram matrices, zero interlacing, spectral bounds and WKB counting.
"""

import numpy as np
import pytest

from conftest import DEEP_WELL, FREE_KINK, REPULSIVE
from WMorse.core.analysis.interlacing import (
    ZeroSequences,
    interlacing_check,
    spectral_bounds_check,
    zero_sequences,
)
from WMorse.core.analysis.orthogonality import (
    GramClass,
    Measure,
    cross_block_ratio,
    cross_energy_gram,
    deformed_gram_consistency,
    deformed_orthogonality_gram,
    orthogonality_gram,
)
from WMorse.core.analysis.wkb import wkb_count, wkb_invert, wkb_spacing, wkb_turning_point
from WMorse.core.spectrum.potential import right_branch_potential
from WMorse.core.spectrum.solver import compute_spectrum
from WMorse.core.transforms.deformation import DeformedSystem, DeletionSet, deformed_parity
from WMorse.core.types import EigenLevel, OrderParam, Parity
from WMorse.utils.errors import DomainError


def _group(levels, parity, count=4):
    return [lv for lv in levels if lv.parity is parity][:count]


# ---- Gram matrices ----

@pytest.mark.parametrize("parity", list(Parity))
def test_parity_gram(repulsive_levels, parity):
    report = orthogonality_gram(REPULSIVE, _group(repulsive_levels, parity))
    assert report.parity_class is (GramClass.EVEN_EVEN if parity is Parity.EVEN else GramClass.ODD_ODD)
    assert report.max_offdiag_ratio < 1e-6
    assert np.all(np.diag(report.matrix) > 0)
    np.testing.assert_allclose(np.diag(report.correlation()), 1.0)


def test_gram_at_zero_k(kink_levels):
    for parity in Parity:
        assert orthogonality_gram(FREE_KINK, _group(kink_levels, parity)).max_offdiag_ratio < 1e-6


def test_x_weight_is_a_rescaling(repulsive_levels):
    group = _group(repulsive_levels, Parity.EVEN, 3)
    rho = orthogonality_gram(REPULSIVE, group, Measure.RHO_MEASURE)
    xw = orthogonality_gram(REPULSIVE, group, Measure.X_WEIGHTED)
    np.testing.assert_allclose(np.diag(xw.matrix), 2.0 * REPULSIVE.g * np.diag(rho.matrix), rtol=1e-8)
    assert xw.measure == "XWeighted"
    assert xw.max_offdiag_ratio < 1e-6


def test_gram_inputs(repulsive_levels):
    single = orthogonality_gram(REPULSIVE, repulsive_levels[:1])
    assert single.max_offdiag_ratio == 0.0
    assert single.matrix.shape == (1, 1)
    with pytest.raises(DomainError):
        orthogonality_gram(REPULSIVE, repulsive_levels[:2])
    with pytest.raises(DomainError):
        orthogonality_gram(REPULSIVE, [])
    with pytest.raises(DomainError):
        orthogonality_gram(REPULSIVE, repulsive_levels[:1], x_cut=0.5 * REPULSIVE.rho0)


def test_gram_report_serialises(repulsive_levels):
    record = orthogonality_gram(REPULSIVE, _group(repulsive_levels, Parity.ODD, 2)).as_dict()
    assert record["parity_class"] == "OddOdd"
    assert record["labels"] == [1, 3]
    assert len(record["matrix"]) == 2


def test_cross_energy_gram(well_levels):
    pairs = 0
    for parity in Parity:
        neg = [lv for lv in well_levels if lv.parity is parity and lv.energy < 0]
        pos = [lv for lv in well_levels if lv.parity is parity and lv.energy > 0]
        if not neg or not pos:
            continue
        report = cross_energy_gram(DEEP_WELL, neg, pos)
        assert report.parity_class is GramClass.CROSS_ENERGY
        assert cross_block_ratio(report, len(neg)) < 1e-6
        pairs += len(neg) * len(pos)
    n_neg = sum(lv.energy < 0 for lv in well_levels)
    assert pairs >= n_neg
    negative = well_levels[0]
    positive = next(lv for lv in well_levels if lv.energy > 0 and lv.parity is negative.parity)
    with pytest.raises(DomainError):
        cross_energy_gram(DEEP_WELL, [positive], [negative])


def test_deformed_gram_without_deletion(repulsive_levels):
    group = _group(repulsive_levels, Parity.EVEN, 3)
    plain = orthogonality_gram(REPULSIVE, group)
    zero = deformed_orthogonality_gram(REPULSIVE, 0, group)
    np.testing.assert_array_equal(zero.matrix, plain.matrix)


@pytest.mark.parametrize("L", [1, 2])
def test_deformed_gram(repulsive_levels, L):
    for want in (1, -1):
        group = [lv for lv in repulsive_levels[L:] if deformed_parity(L, lv.index) == want][:3]
        report = deformed_orthogonality_gram(REPULSIVE, L, group, spectrum=repulsive_levels)
        assert report.max_offdiag_ratio < 1e-5
        assert report.parity_class is (GramClass.EVEN_EVEN if want > 0 else GramClass.ODD_ODD)


def test_deformed_gram_matches_x_space(repulsive_levels):
    group = [lv for lv in repulsive_levels[1:] if deformed_parity(1, lv.index) == 1][:3]
    report = deformed_orthogonality_gram(REPULSIVE, 1, group, spectrum=repulsive_levels)
    system = DeformedSystem(REPULSIVE, DeletionSet.crum(1), repulsive_levels)
    assert deformed_gram_consistency(REPULSIVE, report, system) < 1e-6


def test_deformed_gram_inputs(repulsive_levels):
    with pytest.raises(DomainError):
        deformed_orthogonality_gram(REPULSIVE, -1, repulsive_levels[:1])
    with pytest.raises(DomainError):
        deformed_orthogonality_gram(REPULSIVE, 1, repulsive_levels[:1], spectrum=repulsive_levels)
    with pytest.raises(DomainError):
        deformed_orthogonality_gram(REPULSIVE, 1, repulsive_levels[1:3], spectrum=repulsive_levels)
    with pytest.raises(DomainError):
        deformed_orthogonality_gram(REPULSIVE, 1, [repulsive_levels[2]], dset=DeletionSet((1,)), spectrum=repulsive_levels)


# ---- interlacing and bounds ----

def test_zeros_interlace(kink_levels):
    zeros = zero_sequences(FREE_KINK, 4, levels=kink_levels)
    assert len(zeros.lambdas) == len(zeros.etas) == 4
    assert zeros.even_first
    result = interlacing_check(zeros, x=FREE_KINK.rho0)
    assert result
    assert result.violation is None


def test_swapped_sequences_fail(repulsive_levels):
    zeros = zero_sequences(REPULSIVE, 3, levels=repulsive_levels)
    swapped = ZeroSequences(lambdas=zeros.etas, etas=zeros.lambdas)
    result = interlacing_check(swapped)
    assert not result
    assert result.violation == 0


def test_lower_bound_on_first_zero():
    zeros = ZeroSequences(lambdas=(0.4, 2.0), etas=(1.0, 3.0))
    result = interlacing_check(zeros, x=1.0)
    assert not result.ok
    assert result.violation == 0
    assert interlacing_check(zeros)


def test_interlacing_with_bound_levels(well_levels):
    n_negative = sum(lv.energy < 0 for lv in well_levels)
    zeros = zero_sequences(DEEP_WELL, 2, levels=well_levels)
    assert zeros.even_first is (n_negative % 2 == 0)
    assert interlacing_check(zeros)


def test_zero_sequence_inputs(repulsive_levels):
    with pytest.raises(DomainError):
        zero_sequences(REPULSIVE, 0, levels=repulsive_levels)
    with pytest.raises(DomainError):
        zero_sequences(REPULSIVE, 6, levels=repulsive_levels)
    with pytest.raises(DomainError):
        interlacing_check(ZeroSequences(lambdas=(), etas=(1.0,)))


def test_spectral_bounds(repulsive_levels, well_levels):
    assert spectral_bounds_check(REPULSIVE, repulsive_levels).ok
    assert spectral_bounds_check(DEEP_WELL, well_levels).ok
    too_low = EigenLevel(index=0, parity=Parity.EVEN, order=OrderParam.imaginary(1.0), energy=1.0, residual=0.0)
    report = spectral_bounds_check(REPULSIVE, [too_low])
    assert not report.ok
    assert report.messages
    with pytest.raises(DomainError):
        spectral_bounds_check(REPULSIVE, [])


# ---- WKB ----

def test_turning_point_sits_on_the_potential():
    for nu in (2.0, 5.0, 12.0):
        x_t = wkb_turning_point(REPULSIVE, nu)
        assert right_branch_potential(REPULSIVE, x_t) == pytest.approx(nu * nu, rel=1e-12)


def test_count_is_increasing():
    nus = np.linspace(2.0, 20.0, 19)
    counts = [wkb_count(FREE_KINK, nu) for nu in nus]
    assert all(a < b for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("n", [5, 10, 30])
def test_invert_round_trip(n):
    assert abs(wkb_count(REPULSIVE, wkb_invert(REPULSIVE, n)) - n) < 1e-8


def test_wkb_inputs():
    with pytest.raises(DomainError):
        wkb_count(REPULSIVE, 0.0)
    with pytest.raises(DomainError):
        wkb_count(REPULSIVE, 1.0)
    with pytest.raises(DomainError):
        wkb_invert(REPULSIVE, -1.0)
    assert wkb_spacing(FREE_KINK, 5.0) > 0


@pytest.mark.slow
def test_wkb_against_levels():
    levels = compute_spectrum(FREE_KINK, 31)
    gaps = [abs(wkb_count(FREE_KINK, lv.order.value) - lv.index) for lv in levels]
    assert max(gaps) <= 1.0
    assert gaps[30] <= gaps[5]
    assert wkb_invert(FREE_KINK, 30) == pytest.approx(levels[30].order.value, rel=0.02)
    for n in range(5, 30):
        predicted = wkb_spacing(FREE_KINK, levels[n].order.value)
        actual = levels[n + 1].order.value - levels[n].order.value
        assert 0.5 <= predicted / actual <= 2.0
