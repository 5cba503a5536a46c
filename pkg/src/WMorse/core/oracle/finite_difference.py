# src/WMorse/core/oracle/finite_difference.py
"""
Finite-difference Sturm-Liouville oracle for -psi'' + V psi = E psi.

- Uniform grid, 3-point Laplacian, Dirichlet wall at x_max
- Neumann at 0 through the ghost-point reflection psi_{-1} = psi_1, symmetrised
  by scaling the first unknown by sqrt(2); Dirichlet at 0 by row deletion;
  FullLine walls at x_min (default -x_max) and x_max
- Lowest eigenvalues by Sturm-sequence bisection (LAPACK stebz), eigenvectors by
  inverse iteration on the shifted band
- Richardson extrapolation (4 E_{2n} - E_n) / 3 with an observed-order check
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from WMorse.config.constants import (
    FD_DEFAULT_POINTS,
    FD_MARGIN,
    FD_MIN_POINTS,
    FD_TAIL_ACTION,
    FD_TAIL_RATIO,
    INVERSE_ITERATION_STEPS,
    RICHARDSON_ORDER_BOUNDS,
    SHIFT_JITTER,
    STURM_PAD,
)
from WMorse.core.types import SampledFunction
from WMorse.utils.errors import DomainError, InsufficientBox, OracleError, OrderAnomaly, SingularShift
from WMorse.utils.logging_utils import LogFn, safe_log

Potential = Callable[[np.ndarray], np.ndarray]

CONTAINMENT_STEP = 1e-2
CONTAINMENT_LIMIT = 60.0


class Boundary(str, Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"
    FULL_LINE = "full_line"


@dataclass(frozen=True)
class FdProblem:
    potential: Potential = field(compare=False)
    boundary_at_zero: Boundary
    x_max: float
    n_points: int = FD_DEFAULT_POINTS
    x_min: Optional[float] = None  # FullLine only

    def __post_init__(self) -> None:
        if self.n_points < FD_MIN_POINTS:
            raise DomainError(f"n_points must be >= {FD_MIN_POINTS}, got {self.n_points}")
        if not self.x_max > self.left:
            raise DomainError(f"x_max={self.x_max} must exceed the left end {self.left}")

    @property
    def left(self) -> float:
        if self.boundary_at_zero is Boundary.FULL_LINE:
            return -self.x_max if self.x_min is None else self.x_min
        return 0.0

    @property
    def spacing(self) -> float:
        return (self.x_max - self.left) / self.n_points

    def refined(self, factor: int = 2) -> "FdProblem":
        return replace(self, n_points=self.n_points * factor)


@dataclass(frozen=True)
class _Matrix:
    nodes: np.ndarray     # unknowns' positions
    diag: np.ndarray
    off: np.ndarray
    scale0: float         # psi_0 = scale0 * v_0 (sqrt(2) for Neumann)


def _assemble(problem: FdProblem) -> _Matrix:
    h = problem.spacing
    n = problem.n_points
    inv_h2 = 1.0 / (h * h)
    if problem.boundary_at_zero is Boundary.NEUMANN:
        nodes = problem.left + h * np.arange(0, n)
    else:
        nodes = problem.left + h * np.arange(1, n)
    diag = 2.0 * inv_h2 + np.asarray(problem.potential(nodes), dtype=float)
    off = np.full(nodes.size - 1, -inv_h2)
    scale0 = 1.0
    if problem.boundary_at_zero is Boundary.NEUMANN:
        off[0] = -math.sqrt(2.0) * inv_h2
        scale0 = math.sqrt(2.0)
    if not np.all(np.isfinite(diag)):
        raise OracleError("potential is not finite on the grid")
    return _Matrix(nodes=nodes, diag=diag, off=off, scale0=scale0)


def sturm_count(diag: np.ndarray, off: np.ndarray, shift: float) -> int:
    """Number of eigenvalues below ``shift``: negative pivots of LDL^T of T - shift."""
    count = 0
    d = diag[0] - shift
    if d < 0:
        count += 1
    for i in range(1, diag.size):
        if d == 0.0:
            d = np.finfo(float).tiny
        d = diag[i] - shift - off[i - 1] * off[i - 1] / d
        if d < 0:
            count += 1
    return count


def _lowest(mat: _Matrix, count: int) -> np.ndarray:
    values = eigh_tridiagonal(
        mat.diag,
        mat.off,
        eigvals_only=True,
        select="i",
        select_range=(0, count - 1),
        lapack_driver="stebz",
    )
    # Sturm counts must bracket exactly the returned eigenvalues
    norm = float(np.max(np.abs(mat.diag))) + (2.0 * float(np.max(np.abs(mat.off))) if mat.off.size else 0.0)
    pad = STURM_PAD * max(1.0, norm)
    below = sturm_count(mat.diag, mat.off, float(values[0]) - pad)
    upto = sturm_count(mat.diag, mat.off, float(values[-1]) + pad)
    if below != 0 or upto != count:
        raise OracleError(
            f"Sturm count disagrees with the eigensolver: {below} below E_0, {upto} up to E_{count - 1} (expected 0, {count})"
        )
    return values


def _inverse_iteration(mat: _Matrix, eigenvalue: float) -> np.ndarray:
    n = mat.diag.size
    shift = eigenvalue
    for attempt in range(4):
        ab = np.zeros((3, n))
        ab[0, 1:] = mat.off
        ab[1, :] = mat.diag - shift
        ab[2, :-1] = mat.off
        v = np.ones(n) / math.sqrt(n)
        try:
            for _ in range(INVERSE_ITERATION_STEPS):
                v = solve_banded((1, 1), ab, v)
                norm = np.linalg.norm(v)
                if not (norm > 0 and math.isfinite(norm)):
                    raise LinAlgError("degenerate iterate")
                v = v / norm
            return v
        except LinAlgError:
            shift = eigenvalue + SHIFT_JITTER * (attempt + 1) * max(1.0, abs(eigenvalue))
    raise SingularShift(f"shifted factorisation failed near E={eigenvalue:.12g}")


def _to_sampled(problem: FdProblem, mat: _Matrix, v: np.ndarray) -> SampledFunction:
    psi = v.copy()
    psi[0] *= mat.scale0
    if problem.boundary_at_zero is Boundary.NEUMANN:
        grid = np.append(mat.nodes, problem.x_max)
        values = np.append(psi, 0.0)
    else:
        grid = np.concatenate(([problem.left], mat.nodes, [problem.x_max]))
        values = np.concatenate(([0.0], psi, [0.0]))
    values = values / math.sqrt(trapezoid(values * values, grid))
    big = np.abs(values) > 1e-8 * np.max(np.abs(values))
    first = int(np.argmax(big))
    if values[first] < 0:
        values = -values
    derivs = np.gradient(values, grid[1] - grid[0])
    if problem.boundary_at_zero is Boundary.NEUMANN:
        derivs[0] = 0.0
    return SampledFunction(grid=grid, values=values, derivs=derivs)


def _check_tail(problem: FdProblem, vec: np.ndarray, eigenvalue: float) -> None:
    peak = float(np.max(np.abs(vec)))
    ends = [abs(vec[-1])]
    if problem.boundary_at_zero is Boundary.FULL_LINE:
        ends.append(abs(vec[0]))
    tail = max(ends) / peak
    if tail > FD_TAIL_RATIO:
        raise InsufficientBox(
            f"eigenvector at E={eigenvalue:.8g} has tail {tail:.2e} of its peak at the wall "
            f"(x_max={problem.x_max:g}); enlarge the box"
        )


def fd_eigenvalues(problem: FdProblem, count: int) -> List[float]:
    """Lowest ``count`` eigenvalues, ascending."""
    if count < 1:
        raise DomainError("count must be >= 1")
    if count > problem.n_points // 4:
        raise DomainError(f"count={count} exceeds n_points/4={problem.n_points // 4}")
    mat = _assemble(problem)
    values = _lowest(mat, count)
    _check_tail(problem, _inverse_iteration(mat, float(values[-1])), float(values[-1]))
    return [float(v) for v in values]


def fd_eigenvector(problem: FdProblem, eigenvalue: float) -> SampledFunction:
    mat = _assemble(problem)
    return _to_sampled(problem, mat, _inverse_iteration(mat, eigenvalue))


@dataclass(frozen=True)
class RichardsonResult:
    values: List[float]
    coarse: List[float]
    fine: List[float]
    orders: List[float]   # nan where the differences are at roundoff level


def richardson_pair(problem: FdProblem, count: int, *, check_order: bool = True) -> RichardsonResult:
    """(4 E_{2n} - E_n)/3 per level; observed order from grids n, 2n, 4n."""
    e1 = np.array(fd_eigenvalues(problem, count))
    e2 = np.array(fd_eigenvalues(problem.refined(2), count))
    e4 = np.array(fd_eigenvalues(problem.refined(4), count))

    orders = []
    for a, b, c in zip(e1, e2, e4):
        d1, d2 = a - b, b - c
        noise = 1e-13 * max(1.0, abs(a)) * problem.n_points
        if abs(d2) <= noise or abs(d1) <= noise or d1 * d2 <= 0:
            orders.append(math.nan)
        else:
            orders.append(math.log2(d1 / d2))

    lo, hi = RICHARDSON_ORDER_BOUNDS
    if check_order:
        bad = [(i, p) for i, p in enumerate(orders) if math.isfinite(p) and not lo <= p <= hi]
        if bad:
            i, p = bad[0]
            raise OrderAnomaly(f"level {i}: observed convergence order {p:.3f} outside [{lo}, {hi}]")

    values = (4.0 * e2 - e1) / 3.0
    return RichardsonResult(
        values=[float(v) for v in values],
        coarse=[float(v) for v in e1],
        fine=[float(v) for v in e2],
        orders=orders,
    )


def containment_xmax(potential: Potential, e_max: float, *, x_start: float = 0.0) -> float:
    """
    Smallest x >= x_start beyond the outer turning point of e_max with
    V(x) >= e_max + FD_MARGIN and tail action int sqrt(V - e_max) dx >= FD_TAIL_ACTION.
    """
    x = x_start
    action = 0.0
    prev_gap = float(potential(np.array([x]))[0]) - e_max
    while x < CONTAINMENT_LIMIT:
        x_next = x + CONTAINMENT_STEP
        gap = float(potential(np.array([x_next]))[0]) - e_max
        if gap <= 0:
            action = 0.0  # still inside the classically allowed region
        else:
            action += 0.5 * CONTAINMENT_STEP * (math.sqrt(max(prev_gap, 0.0)) + math.sqrt(gap))
        x, prev_gap = x_next, gap
        if gap >= FD_MARGIN and action >= FD_TAIL_ACTION:
            return x
    raise InsufficientBox(f"no containing box below x={CONTAINMENT_LIMIT:g} for E={e_max:g}")


def half_line_box(potential: Potential, count: int, *, n_points: int = FD_DEFAULT_POINTS, log_fn: Optional[LogFn] = None) -> float:
    """x_max for the lowest ``count`` levels of an even potential, found self-consistently."""
    e_max = float(potential(np.array([0.0]))[0]) + 1.0
    n_neu = (count + 1) // 2
    for _ in range(8):
        x_max = containment_xmax(potential, e_max)
        coarse = FdProblem(potential, Boundary.NEUMANN, x_max, max(FD_MIN_POINTS, n_points // 4, 4 * n_neu + 4))
        mat = _assemble(coarse)
        top = float(_lowest(mat, n_neu + 1)[-1])
        if top <= e_max:
            safe_log(log_fn, f"[INFO] oracle box x_max={x_max:.4g} for E <= {e_max:.6g}")
            return x_max
        e_max = top + 1.0
    raise InsufficientBox("box size did not settle")


def symmetric_half_line_spectrum(
    potential: Potential,
    count: int,
    *,
    x_max: Optional[float] = None,
    n_points: int = FD_DEFAULT_POINTS,
    richardson: bool = True,
    log_fn: Optional[LogFn] = None,
) -> List[float]:
    """
    Lowest ``count`` levels of an even potential on the full line: Neumann
    levels take the even global indices, Dirichlet levels the odd ones.
    ``potential`` is evaluated for x >= 0 only.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if x_max is None:
        x_max = half_line_box(potential, count, n_points=n_points, log_fn=log_fn)
    n_even = (count + 1) // 2
    n_odd = count // 2

    def solve(boundary: Boundary, n: int) -> List[float]:
        if n == 0:
            return []
        problem = FdProblem(potential, boundary, x_max, n_points)
        return richardson_pair(problem, n).values if richardson else fd_eigenvalues(problem, n)

    even = solve(Boundary.NEUMANN, n_even)
    odd = solve(Boundary.DIRICHLET, n_odd)
    merged = [even[m // 2] if m % 2 == 0 else odd[m // 2] for m in range(count)]
    return merged


def interlacing_violation(neumann: List[float], dirichlet: List[float]) -> Optional[Tuple[int, float, float]]:
    """First (position, a, b) where E_0^N < E_0^D < E_1^N < ... fails, else None."""
    merged = []
    for i in range(max(len(neumann), len(dirichlet))):
        if i < len(neumann):
            merged.append(neumann[i])
        if i < len(dirichlet):
            merged.append(dirichlet[i])
    for i in range(len(merged) - 1):
        if not merged[i] < merged[i + 1]:
            return i, merged[i], merged[i + 1]
    return None
