# src/WMorse/core/analysis/orthogonality.py
"""
Gram matrices of Whittaker factors on (rho_0, infinity).

- RhoMeasure:  G_nm = int W_n W_m drho / rho^2
- XWeighted:   G_nm = int e^{-x} W_n(2g e^x) W_m(2g e^x) dx   (= 2g x RhoMeasure)
- Deformed:    G_nm = int R_n R_m rho^{2(L-1)} drho with
               R_n = W_rho[W_d1, ..., W_dL, W_n] / W_rho[W_d1, ..., W_dL]

Integrals stop at the tail cut-off where e^{-rho} rho^{2k-2} has fallen by
1e-18. Every entry is computed on scaled integrands and rescaled afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from WMorse.config.constants import QUAD_TOL
from WMorse.core.spectrum.eigenfunctions import adaptive_integral, eigenfunction_for, tail_cutoff
from WMorse.core.spectrum.solver import compute_spectrum
from WMorse.core.transforms.deformation import DeletionSet, DeformedSystem, deformed_parity
from WMorse.core.transforms.wronskian import BRANCH_MARGIN, branch_for, whittaker_log_wronskian
from WMorse.core.types import EigenLevel, Parity, PotentialParams
from WMorse.utils.errors import DomainError, QuadratureFailure
from WMorse.utils.parallel import parallel_map

REF_SAMPLES = 24


class GramClass(str, Enum):
    EVEN_EVEN = "EvenEven"
    ODD_ODD = "OddOdd"
    CROSS_ENERGY = "CrossEnergy"


class Measure(str, Enum):
    X_WEIGHTED = "XWeighted"
    RHO_MEASURE = "RhoMeasure"


@dataclass(frozen=True)
class GramReport:
    parity_class: GramClass
    matrix: np.ndarray
    max_offdiag_ratio: float
    labels: Tuple[int, ...] = ()
    measure: str = Measure.RHO_MEASURE.value

    def correlation(self) -> np.ndarray:
        d = np.sqrt(np.diag(self.matrix))
        return self.matrix / np.outer(d, d)

    def as_dict(self) -> dict:
        return {
            "parity_class": self.parity_class.value,
            "measure": self.measure,
            "labels": list(self.labels),
            "matrix": self.matrix.tolist(),
            "max_offdiag_ratio": self.max_offdiag_ratio,
        }


def offdiag_ratio(matrix: np.ndarray) -> float:
    n = matrix.shape[0]
    if n < 2:
        return 0.0
    d = np.sqrt(np.diag(matrix))
    ratio = np.abs(matrix) / np.outer(d, d)
    return float(np.max(ratio[~np.eye(n, dtype=bool)]))


def _classify(levels: Sequence[EigenLevel]) -> GramClass:
    if not levels:
        raise DomainError("Gram matrix of an empty level list")
    parities = {lv.parity for lv in levels}
    if len(parities) != 1:
        raise DomainError("levels must share a parity class")
    signs = {lv.energy > 0 for lv in levels}
    if len(signs) == 2:
        return GramClass.CROSS_ENERGY
    return GramClass.EVEN_EVEN if Parity.EVEN in parities else GramClass.ODD_ODD


def _assemble_gram(
    scaled: Sequence[Callable[[float], float]],
    refs: Sequence[float],
    a: float,
    b: float,
    weight: Callable[[float], float],
    quad_tol: float,
) -> np.ndarray:
    """G_ij = exp(ref_i + ref_j) int_a^b f_i f_j weight; pairs run in parallel."""
    n = len(scaled)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    def entry(pair: Tuple[int, int]) -> float:
        i, j = pair
        fi, fj = scaled[i], scaled[j]
        if i == j:
            return adaptive_integral(lambda t: fi(t) ** 2 * weight(t), a, b, quad_tol)
        return adaptive_integral(lambda t: fi(t) * fj(t) * weight(t), a, b, quad_tol)

    values = parallel_map(entry, pairs)
    mat = np.zeros((n, n))
    for (i, j), v in zip(pairs, values):
        mat[i, j] = mat[j, i] = v * math.exp(refs[i] + refs[j])
    if np.any(np.diag(mat) <= 0):
        raise QuadratureFailure("Gram diagonal is not strictly positive")
    return mat


def _reference_log(log_abs: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    # odd factors vanish at the cut, so the scale comes from the whole range
    logs = log_abs(np.linspace(a, b, REF_SAMPLES))
    logs = logs[np.isfinite(logs)]
    return float(np.max(logs)) if logs.size else 0.0


def orthogonality_gram(
    params: PotentialParams,
    levels: Sequence[EigenLevel],
    measure: Measure = Measure.RHO_MEASURE,
    x_cut: Optional[float] = None,
    *,
    quad_tol: float = QUAD_TOL,
) -> GramReport:
    """
    Gram matrix of W_{k, order_n}(rho) over (x_cut, rho_max). ``x_cut`` is the
    lower limit in rho (default rho_0); with XWeighted the same range is
    integrated in x = log(rho / 2g).
    """
    measure = Measure(measure)
    parity_class = _classify(levels)
    rho_cut = params.rho0 if x_cut is None else float(x_cut)
    if rho_cut < params.rho0 * math.exp(-BRANCH_MARGIN):
        raise DomainError(f"x_cut={rho_cut:g} lies below the computed branch (rho_0={params.rho0:g})")
    rho_max = max(tail_cutoff(params.k, lv.energy, rho_cut) for lv in levels)
    x_hi = math.log(rho_max / params.rho0)
    branches = [branch_for(params, lv, x_hi) for lv in levels]

    def log_abs_of(branch):
        def fn(rho: np.ndarray) -> np.ndarray:
            w, _, ls = branch.scaled_w(rho)
            with np.errstate(divide="ignore"):
                return np.log(np.abs(w)) + ls
        return fn

    refs = [_reference_log(log_abs_of(b), rho_cut, rho_max) for b in branches]

    if measure is Measure.RHO_MEASURE:
        def make(branch, ref):
            def f(rho: float) -> float:
                w, _, ls = branch.scaled_w(rho)
                return float(w[0]) * math.exp(float(ls[0]) - ref)
            return f

        scaled = [make(b, r) for b, r in zip(branches, refs)]
        mat = _assemble_gram(scaled, refs, rho_cut, rho_max, lambda r: 1.0 / (r * r), quad_tol)
    else:
        def make_x(branch, ref):
            def f(x: float) -> float:
                w, _, ls = branch.scaled_w(params.rho0 * math.exp(x))
                return float(w[0]) * math.exp(float(ls[0]) - ref)
            return f

        scaled = [make_x(b, r) for b, r in zip(branches, refs)]
        mat = _assemble_gram(scaled, refs, math.log(rho_cut / params.rho0), x_hi, lambda x: math.exp(-x), quad_tol)

    return GramReport(
        parity_class=parity_class,
        matrix=mat,
        max_offdiag_ratio=offdiag_ratio(mat),
        labels=tuple(lv.index for lv in levels),
        measure=measure.value,
    )


def cross_energy_gram(
    params: PotentialParams,
    negative: Sequence[EigenLevel],
    positive: Sequence[EigenLevel],
    *,
    quad_tol: float = QUAD_TOL,
) -> GramReport:
    """Square RhoMeasure Gram over one negative- and one positive-energy family of the same parity."""
    if any(lv.energy >= 0 for lv in negative) or any(lv.energy <= 0 for lv in positive):
        raise DomainError("cross-energy Gram pairs negative-energy with positive-energy levels")
    report = orthogonality_gram(params, list(negative) + list(positive), Measure.RHO_MEASURE, quad_tol=quad_tol)
    if report.parity_class is not GramClass.CROSS_ENERGY:
        raise DomainError("cross-energy Gram needs both energy signs")
    return report


def cross_block_ratio(report: GramReport, n_negative: int) -> float:
    """Largest |G_nm| / sqrt(G_nn G_mm) with n negative-energy and m positive-energy."""
    corr = np.abs(report.correlation())
    block = corr[:n_negative, n_negative:]
    return float(np.max(block)) if block.size else 0.0


# ---- deformed Gram ----

def _deformation_inputs(
    params: PotentialParams,
    L: int,
    levels: Sequence[EigenLevel],
    dset: Optional[DeletionSet],
    spectrum: Optional[Sequence[EigenLevel]],
) -> Tuple[DeletionSet, List[EigenLevel]]:
    dset = dset if dset is not None else DeletionSet.crum(L)
    if dset.size != L:
        raise DomainError(f"deletion set {dset} has {dset.size} labels, expected L={L}")
    if not dset.admissible:
        raise DomainError(f"deletion set {dset} is not admissible")
    need = max(max(dset.labels), max(lv.index for lv in levels)) + 1
    full = list(spectrum) if spectrum is not None else compute_spectrum(params, need)
    if len(full) < need:
        raise DomainError(f"need {need} levels, got {len(full)}")
    if any(lv.index in dset.labels for lv in levels):
        raise DomainError(f"Gram levels overlap the deletion set {dset}")
    if len({deformed_parity(L, lv.index) for lv in levels}) != 1:
        raise DomainError("deformed levels must share a parity class")
    return dset, [full[d] for d in dset.labels]


def deformed_orthogonality_gram(
    params: PotentialParams,
    L: int,
    levels: Sequence[EigenLevel],
    x_cut: Optional[float] = None,
    *,
    dset: Optional[DeletionSet] = None,
    spectrum: Optional[Sequence[EigenLevel]] = None,
    quad_tol: float = QUAD_TOL,
) -> GramReport:
    """
    Gram of Wronskian ratios R_n with weight rho^{2(L-1)} over (x_cut, rho_max).
    L = 0 is the undeformed RhoMeasure Gram. ``dset`` defaults to Crum's
    {0, ..., L-1}; ``spectrum`` supplies the deleted levels.
    """
    if L < 0:
        raise DomainError(f"L must be >= 0, got {L}")
    if not levels:
        raise DomainError("Gram matrix of an empty level list")
    if L == 0:
        return orthogonality_gram(params, levels, Measure.RHO_MEASURE, x_cut, quad_tol=quad_tol)

    dset, deleted = _deformation_inputs(params, L, levels, dset, spectrum)
    rho_cut = params.rho0 if x_cut is None else float(x_cut)
    if rho_cut < params.rho0 * math.exp(-BRANCH_MARGIN):
        raise DomainError(f"x_cut={rho_cut:g} lies below the computed branch (rho_0={params.rho0:g})")
    rho_max = max(tail_cutoff(params.k + L, lv.energy, rho_cut) for lv in levels)

    def log_ratio(level: EigenLevel, rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        den = whittaker_log_wronskian(params, deleted, rho)
        num = whittaker_log_wronskian(params, deleted + [level], rho)
        return num.sign * den.sign, num.log_abs - den.log_abs

    refs = []
    for lv in levels:
        def log_abs(rho: np.ndarray, lv=lv) -> np.ndarray:
            sign, log = log_ratio(lv, rho)
            return np.where(sign != 0, log, -np.inf)
        refs.append(_reference_log(log_abs, rho_cut, rho_max))

    def make(level: EigenLevel, ref: float):
        def f(rho: float) -> float:
            sign, log = log_ratio(level, np.array([rho]))
            return float(sign[0]) * math.exp(float(log[0]) - ref)
        return f

    scaled = [make(lv, r) for lv, r in zip(levels, refs)]
    power = 2.0 * (L - 1)
    mat = _assemble_gram(scaled, refs, rho_cut, rho_max, lambda r: r ** power, quad_tol)
    parity = deformed_parity(L, levels[0].index)
    return GramReport(
        parity_class=GramClass.EVEN_EVEN if parity > 0 else GramClass.ODD_ODD,
        matrix=mat,
        max_offdiag_ratio=offdiag_ratio(mat),
        labels=tuple(lv.index for lv in levels),
        measure=f"RhoWeighted[L={L}]",
    )


def deformed_gram_consistency(params: PotentialParams, report: GramReport, system: DeformedSystem) -> float:
    """
    Largest deviation between 2 c_n c_m G_nm and the x-space overlaps of
    DeformedSystem, relative to the geometric mean of the diagonal overlaps.
    c_n is the amplitude of psi_n; the deleted amplitudes cancel in the ratio.
    """
    labels = list(report.labels)
    c = np.array([math.exp(eigenfunction_for(params, system.level(n)).log_amp) for n in labels])
    predicted = 2.0 * np.outer(c, c) * report.matrix
    direct = np.array([[system.overlap(n, m) for m in labels] for n in labels])
    d = np.sqrt(np.diag(direct))
    return float(np.max(np.abs(predicted - direct) / np.outer(d, d)))
