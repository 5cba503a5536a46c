# src/WMorse/core/transforms/deformation.py
"""
Crum and Krein-Adler deformations of the symmetric Morse Hamiltonian.

    V_D(x)       = V(x) - 2 d^2/dx^2 log|W[psi_d1, ..., psi_dL](x)|
    psi_{D;n}(x) = W[psi_d1, ..., psi_dL, psi_n](x) / W[psi_d1, ..., psi_dL](x)

- Crum deletes {0, ..., L-1}; Krein-Adler any set with prod_j (m - d_j) >= 0
- The one numerical derivative is the 5-point second difference of log|W|,
  checked against the same stencil at twice the step
- Deformed quantities are sampled on |x| >= EPS0 of a symmetric grid; each
  side is computed on its own branch and the deformed state has parity
  (-1)^{L+n}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from WMorse.config.constants import (
    EPS0,
    LOGW_CONVERGENCE_TOL,
    LOGW_STEP,
    OVERFLOW_GUARD_X,
    QUAD_TOL,
)
from WMorse.core.spectrum.eigenfunctions import adaptive_integral, tail_cutoff
from WMorse.core.spectrum.potential import right_branch_potential
from WMorse.core.spectrum.solver import compute_spectrum
from WMorse.core.transforms.wronskian import check_nodeless, log_wronskian
from WMorse.core.types import EigenLevel, PotentialParams, SampledFunction
from WMorse.utils.errors import DomainError, InadmissibleSet, QuadratureFailure
from WMorse.utils.logging_utils import LogFn, safe_log


@dataclass(frozen=True)
class DeletionSet:
    labels: Tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(int(d) for d in self.labels)
        if any(d < 0 for d in labels):
            raise DomainError(f"deletion labels must be >= 0, got {labels}")
        if len(set(labels)) != len(labels):
            raise DomainError(f"deletion labels must be distinct, got {labels}")
        object.__setattr__(self, "labels", tuple(sorted(labels)))

    @classmethod
    def crum(cls, L: int) -> "DeletionSet":
        if L < 1:
            raise DomainError(f"L must be >= 1, got {L}")
        return cls(tuple(range(L)))

    @classmethod
    def parse(cls, text: str) -> "DeletionSet":
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as e:
            raise DomainError(f"cannot parse deletion set '{text}'") from e

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_crum(self) -> bool:
        return self.labels == tuple(range(self.size))

    def violating_m(self) -> Optional[int]:
        """Smallest m with prod_j (m - d_j) < 0; beyond max(d) + 1 the product is positive."""
        top = max(self.labels, default=-1)
        for m in range(top + 2):
            if math.prod(m - d for d in self.labels) < 0:
                return m
        return None

    @property
    def admissible(self) -> bool:
        return self.violating_m() is None

    def __str__(self) -> str:
        return "{" + ",".join(str(d) for d in self.labels) + "}"


def krein_adler_admissible(dset: DeletionSet) -> bool:
    return dset.admissible


def deformed_parity(L: int, n: int) -> int:
    """psi_{D;n}(-x) = (-1)^{L+n} psi_{D;n}(x)."""
    return 1 if (L + n) % 2 == 0 else -1


def asymptotic_effective_k(k: float, L: int) -> float:
    """V^[L] ~ rho^2/4 - (k - L) rho at large rho."""
    return k - L


def _second_log_derivative(
    params: PotentialParams,
    deleted: Sequence[EigenLevel],
    x: np.ndarray,
    side: int,
    step: float,
) -> np.ndarray:
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * step
    pts = (x[:, None] + offsets[None, :]).ravel()
    lw = log_wronskian(params, deleted, pts, side=side)
    check_nodeless(lw, " near the stencil")
    f = lw.log_abs.reshape(x.size, 5)
    return (-f[:, 0] + 16.0 * f[:, 1] - 30.0 * f[:, 2] + 16.0 * f[:, 3] - f[:, 4]) / (12.0 * step * step)


# largest rho at which a checked 5-point stencil stays inside the Whittaker guard
STENCIL_RHO_LIMIT = OVERFLOW_GUARD_X * math.exp(-5.0 * LOGW_STEP)


class DeformedSystem:
    """H_D for one admissible deletion set, with the spectrum it is built from."""

    def __init__(
        self,
        params: PotentialParams,
        dset: DeletionSet,
        levels: Optional[Sequence[EigenLevel]] = None,
        *,
        log_fn: Optional[LogFn] = None,
    ):
        bad = dset.violating_m()
        if bad is not None:
            raise InadmissibleSet(f"deletion set {dset}: m={bad} violates positivity", violating_m=bad)
        if dset.size == 0:
            raise DomainError("deletion set is empty")
        self.params = params
        self.dset = dset
        self.log_fn = log_fn
        need = max(dset.labels) + 1
        self.levels: List[EigenLevel] = list(levels) if levels is not None else compute_spectrum(params, need + 4)
        if len(self.levels) < need:
            raise DomainError(f"deletion set {dset} needs at least {need} levels, got {len(self.levels)}")
        self.deleted = [self.levels[d] for d in dset.labels]

    @property
    def L(self) -> int:
        return self.dset.size

    @property
    def remaining(self) -> List[EigenLevel]:
        return [lv for lv in self.levels if lv.index not in self.dset.labels]

    @property
    def x_limit(self) -> float:
        """|x| beyond which V_D takes its asymptotic form and psi_{D;n} is 0."""
        return math.log(STENCIL_RHO_LIMIT / (2.0 * self.params.g))

    def level(self, n: int) -> EigenLevel:
        if n in self.dset.labels:
            raise DomainError(f"level {n} is deleted by {self.dset}")
        if not 0 <= n < len(self.levels):
            raise DomainError(f"level {n} not computed (have {len(self.levels)})")
        return self.levels[n]

    # ---- potential ----

    def potential_branch(self, x, side: int = 1, *, check: bool = True) -> np.ndarray:
        """V_D on one branch; x may run slightly past 0 on that branch."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        far = side * x > self.x_limit
        if np.any(far):
            rho = 2.0 * self.params.g * np.exp(side * x[far])
            out = np.empty_like(x)
            out[far] = 0.25 * rho * rho - asymptotic_effective_k(self.params.k, self.L) * rho
            if not np.all(far):
                out[~far] = self.potential_branch(x[~far], side, check=check)
            return out
        d2 = _second_log_derivative(self.params, self.deleted, x, side, LOGW_STEP)
        if check:
            d2_coarse = _second_log_derivative(self.params, self.deleted, x, side, 2.0 * LOGW_STEP)
            drift = np.max(np.abs(d2 - d2_coarse) / np.maximum(1.0, np.abs(d2)))
            if drift > LOGW_CONVERGENCE_TOL:
                safe_log(
                    self.log_fn,
                    f"[WARN] log-Wronskian second difference drifts by {drift:.2e} between steps "
                    f"{LOGW_STEP:g} and {2 * LOGW_STEP:g}",
                )
        return right_branch_potential(self.params, side * x) - 2.0 * d2

    def potential(self, grid) -> SampledFunction:
        """V_D on a symmetric grid; nodes with |x| < EPS0 are NaN."""
        grid = np.asarray(grid, dtype=float)
        values = np.full(grid.shape, np.nan)
        for side in (1, -1):
            sel = side * grid >= EPS0
            if np.any(sel):
                values[sel] = self.potential_branch(grid[sel], side)
        return SampledFunction(grid=grid, values=values)

    def potential_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        """V_D(x) for x >= 0 (right branch, continued to x = 0)."""
        def fn(x):
            return self.potential_branch(np.abs(np.asarray(x, dtype=float)), 1, check=False)
        return fn

    # ---- eigenfunctions ----

    def _ratio(self, n: int, x: np.ndarray, side: int, derivative: bool = True) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        far = side * x > self.x_limit
        if np.any(far):
            # below e^{-350} of the peak: same cut as the undeformed eigenfunctions
            ratio = np.zeros_like(x)
            d_ratio = np.zeros_like(x) if derivative else None
            if not np.all(far):
                near, d_near = self._ratio(n, x[~far], side, derivative)
                ratio[~far] = near
                if derivative:
                    d_ratio[~far] = d_near
            return ratio, d_ratio
        target = self.level(n)
        den = log_wronskian(self.params, self.deleted, x, side=side)
        check_nodeless(den, " (denominator)")
        num = log_wronskian(self.params, self.deleted + [target], x, side=side)
        ratio = num.sign * den.sign * np.exp(num.log_abs - den.log_abs)
        if not derivative:
            return ratio, None
        d_den = log_wronskian(self.params, self.deleted, x, side=side, derivative=True)
        d_num = log_wronskian(self.params, self.deleted + [target], x, side=side, derivative=True)
        # (N/D)' = N'/D - (N/D)(D'/D)
        d_ratio = d_num.sign * den.sign * np.exp(d_num.log_abs - den.log_abs) - ratio * (
            d_den.sign * den.sign * np.exp(d_den.log_abs - den.log_abs)
        )
        return ratio, d_ratio

    def eigenfunction(self, n: int, grid) -> SampledFunction:
        """psi_{D;n} on a symmetric grid; |x| < EPS0 nodes are NaN."""
        grid = np.asarray(grid, dtype=float)
        values = np.full(grid.shape, np.nan)
        derivs = np.full(grid.shape, np.nan)
        for side in (1, -1):
            sel = side * grid >= EPS0
            if np.any(sel):
                values[sel], derivs[sel] = self._ratio(n, grid[sel], side)
        self._check_origin(n)
        return SampledFunction(grid=grid, values=values, derivs=derivs)

    def _check_origin(self, n: int) -> None:
        """One-sided limits at 0+: odd deformed states vanish, even ones are flat."""
        psi0, dpsi0 = self._ratio(n, np.array([0.0]), 1)
        psi, dpsi = self._ratio(n, np.linspace(EPS0, 2.0, 41), 1)
        if deformed_parity(self.L, n) < 0:
            value, scale, what = float(psi0[0]), float(np.max(np.abs(psi))), "psi"
        else:
            value, scale, what = float(dpsi0[0]), float(np.max(np.abs(dpsi))), "psi'"
        if abs(value) > 1e-6 * scale:
            safe_log(
                self.log_fn,
                f"[WARN] level {n} under {self.dset}: one-sided limit mismatch at 0 ({what}(0+)={value:.3e})",
            )

    def overlap(self, n: int, m: int) -> float:
        """(psi_{D;n}, psi_{D;m}) over the full line; zero by parity when L + n and L + m differ."""
        if deformed_parity(self.L, n) != deformed_parity(self.L, m):
            return 0.0
        top = max(self.level(n).energy, self.level(m).energy)
        rho_cut = tail_cutoff(self.params.k + self.L, top, self.params.rho0)
        x_hi = math.log(rho_cut / self.params.rho0)

        def f(t: float) -> float:
            pts = np.array([t])
            a, _ = self._ratio(n, pts, 1, derivative=False)
            if m == n:
                return float(a[0]) ** 2
            b, _ = self._ratio(m, pts, 1, derivative=False)
            return float(a[0]) * float(b[0])

        return 2.0 * adaptive_integral(f, 0.0, x_hi, QUAD_TOL)

    def norm(self, n: int) -> float:
        """(psi_{D;n}, psi_{D;n}) over the full line."""
        val = self.overlap(n, n)
        if val <= 0:
            raise QuadratureFailure(f"deformed norm for level {n} is {val}")
        return val

    def norm_factor(self, n: int) -> float:
        """prod_j (E_n - E_{d_j}); the deformed norm for unit-norm psi_n."""
        e_n = self.level(n).energy
        return math.prod(e_n - d.energy for d in self.deleted)


def krein_adler_deform(
    params: PotentialParams,
    dset: DeletionSet,
    grid,
    levels: Optional[Sequence[EigenLevel]] = None,
    *,
    log_fn: Optional[LogFn] = None,
) -> Tuple[SampledFunction, Callable[[int], SampledFunction]]:
    system = DeformedSystem(params, dset, levels, log_fn=log_fn)
    potential = system.potential(grid)

    def factory(n: int) -> SampledFunction:
        return system.eigenfunction(n, grid)

    return potential, factory


def crum_potential(params: PotentialParams, L: int, grid, levels: Optional[Sequence[EigenLevel]] = None, *, log_fn: Optional[LogFn] = None) -> SampledFunction:
    return DeformedSystem(params, DeletionSet.crum(L), levels, log_fn=log_fn).potential(grid)


def crum_eigenfunction(
    params: PotentialParams,
    L: int,
    n: int,
    grid,
    levels: Optional[Sequence[EigenLevel]] = None,
    *,
    log_fn: Optional[LogFn] = None,
) -> SampledFunction:
    if n < L:
        raise DomainError(f"n={n} must be >= L={L}")
    return DeformedSystem(params, DeletionSet.crum(L), levels, log_fn=log_fn).eigenfunction(n, grid)


def deformed_potential_fn(params: PotentialParams, dset: DeletionSet, levels: Optional[Sequence[EigenLevel]] = None) -> Callable[[np.ndarray], np.ndarray]:
    return DeformedSystem(params, dset, levels).potential_fn()


def deformed_norm(params: PotentialParams, dset: DeletionSet, n: int, levels: Optional[Sequence[EigenLevel]] = None) -> float:
    return DeformedSystem(params, dset, levels).norm(n)


def asymptotic_remainder(params: PotentialParams, L: int, x, potential_values) -> np.ndarray:
    """V^[L](x) - [rho^2/4 - (k - L) rho] with rho = 2g e^{|x|}."""
    x = np.asarray(x, dtype=float)
    rho = 2.0 * params.g * np.exp(np.abs(x))
    return np.asarray(potential_values) - (0.25 * rho * rho - asymptotic_effective_k(params.k, L) * rho)


def deformation_manifest(system: DeformedSystem) -> Dict[str, object]:
    return {
        "params": system.params.as_dict(),
        "deleted": list(system.dset.labels),
        "crum": system.dset.is_crum,
        "L": system.L,
        "asymptotic_effective_k": asymptotic_effective_k(system.params.k, system.L),
        "levels": [
            {
                "index": lv.index,
                "energy": lv.energy,
                "deformed_parity": "even" if deformed_parity(system.L, lv.index) > 0 else "odd",
                "norm_factor": system.norm_factor(lv.index),
            }
            for lv in system.remaining
        ],
    }
