# src/WMorse/core/transforms/wronskian.py
"""
Wronskians of symmetric Morse eigenfunctions.

Only (psi, psi') are ever sampled; higher derivatives follow from
psi^{(j+2)} = sum_i C(j, i) (V - E)^{(i)} psi^{(j-i)} with the analytic
derivatives of V on each side of the kink. Columns carry their own log-scale
and rows are normalised before slogdet, so products of e^{-rho/2} tails never
underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from WMorse.config.constants import ODE_TOL, WRONSKIAN_ZERO_TOL
from WMorse.core.special.whittaker import WhittakerTrajectory
from WMorse.core.spectrum.eigenfunctions import eigenfunction_for
from WMorse.core.spectrum.potential import right_branch_potential
from WMorse.core.types import EigenLevel, PotentialParams
from WMorse.utils.errors import DomainError, KinkPoint, WronskianZero

BRANCH_MARGIN = 0.05     # continuation of the right branch into x < 0
RHO_BUCKET = 50.0


class LevelBranch:
    """
    psi_m on its right branch rho = 2g e^{x}, valid for x >= -BRANCH_MARGIN,
    together with the raw Whittaker factor W(rho).
    """

    def __init__(self, params: PotentialParams, level: EigenLevel, rho_hi: float, *, ode_tol: float = ODE_TOL):
        self.params = params
        self.level = level
        self.log_amp = eigenfunction_for(params, level).log_amp
        rho_lo = params.rho0 * math.exp(-BRANCH_MARGIN)
        self.traj = WhittakerTrajectory(params.k, level.order, rho_lo, max(rho_hi, params.rho0), ode_tol=ode_tol)

    def scaled_w(self, rho) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.traj.scaled(rho)

    def scaled_psi(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, du/dx, log_scale) with psi_right(x) = exp(log_scale) u."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        rho = 2.0 * self.params.g * np.exp(x)
        w, dw, ls = self.traj.scaled(rho)
        root = np.sqrt(rho)
        return w / root, (-0.5 * w + rho * dw) / root, ls + self.log_amp


@lru_cache(maxsize=512)
def _branch(params: PotentialParams, level: EigenLevel, rho_bucket: float) -> LevelBranch:
    return LevelBranch(params, level, rho_bucket)


def branch_for(params: PotentialParams, level: EigenLevel, x_hi: float) -> LevelBranch:
    rho_hi = 2.0 * params.g * math.exp(max(x_hi, 0.0))
    return _branch(params, level, RHO_BUCKET * math.ceil(rho_hi / RHO_BUCKET))


def _side_of(x: np.ndarray, side: Optional[int]) -> np.ndarray:
    if side is not None:
        return np.full(x.shape, float(side))
    if np.any(x == 0.0):
        raise KinkPoint("Wronskian requested at the kink x = 0")
    return np.sign(x)


def derivative_stack(
    params: PotentialParams,
    level: EigenLevel,
    x,
    n_deriv: int,
    *,
    side: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    psi^{(j)}(x), j < n_deriv, scaled by a per-point log factor: returns
    (stack[j, i], log_scale[i]). ``side`` (+1/-1) picks the branch explicitly,
    which allows evaluating either branch a little past x = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = _side_of(x, side)
    t = s * x  # right-branch coordinate
    branch = branch_for(params, level, float(np.max(t)))
    u, du, ls = branch.scaled_psi(t)
    p = float(level.parity.sign)
    # left side: psi(x) = p psi_r(-x), psi'(x) = -p psi_r'(-x)
    left = s < 0
    u = np.where(left, p * u, u)
    du = np.where(left, -p * du, du)

    stack = [u, du]
    if n_deriv > 2:
        vmE = [right_branch_potential(params, t, i) * s ** i for i in range(n_deriv - 2)]
        vmE[0] = vmE[0] - level.energy
        for j in range(n_deriv - 2):
            acc = np.zeros_like(u)
            for i in range(j + 1):
                acc = acc + comb(j, i, exact=True) * vmE[i] * stack[j - i]
            stack.append(acc)
    return np.array(stack[:n_deriv]), ls


@dataclass(frozen=True)
class LogWronskian:
    sign: np.ndarray
    log_abs: np.ndarray
    rel_size: np.ndarray   # |det| after row/column normalisation

    @property
    def value(self) -> np.ndarray:
        return self.sign * np.exp(self.log_abs)


def _slogdet(columns: List[np.ndarray], logs: List[np.ndarray]) -> LogWronskian:
    # columns[c] has shape (m, n_points)
    mat = np.stack(columns, axis=-1)          # (m, n_points, m)
    mat = np.moveaxis(mat, 1, 0)              # (n_points, m_rows, m_cols)
    row_scale = np.max(np.abs(mat), axis=2, keepdims=True)
    row_scale = np.where(row_scale > 0, row_scale, 1.0)
    mat = mat / row_scale
    sign, logdet = np.linalg.slogdet(mat)
    log_abs = logdet + np.sum(np.log(row_scale[..., 0]), axis=1) + np.sum(np.array(logs), axis=0)
    return LogWronskian(sign=sign, log_abs=log_abs, rel_size=np.exp(logdet))


def log_wronskian(
    params: PotentialParams,
    levels: Sequence[EigenLevel],
    x,
    *,
    side: Optional[int] = None,
    derivative: bool = False,
) -> LogWronskian:
    """
    W[psi_{l_1}, ..., psi_{l_m}](x) in sign/log form. With ``derivative`` the
    last row holds m-th derivatives, which gives dW/dx.
    """
    m = len(levels)
    if m < 1:
        raise DomainError("Wronskian of an empty set")
    n_deriv = m + 1 if derivative else m
    columns, logs = [], []
    for level in levels:
        stack, ls = derivative_stack(params, level, x, n_deriv, side=side)
        if derivative:
            stack = np.concatenate([stack[: m - 1], stack[m:]], axis=0)
        columns.append(stack)
        logs.append(ls)
    return _slogdet(columns, logs)


def wronskian_matrix(params: PotentialParams, levels: Sequence[EigenLevel], x, order_n: Optional[int] = None):
    """W[psi_{d_1}, ..., psi_{d_L}](x) for x != 0."""
    if order_n is not None and order_n != len(levels):
        raise DomainError(f"order_n={order_n} does not match {len(levels)} functions")
    lw = log_wronskian(params, levels, x)
    out = lw.value
    return float(out[0]) if np.ndim(x) == 0 else out


def check_nodeless(lw: LogWronskian, where: str = "") -> None:
    bad = np.nonzero(~(lw.rel_size >= WRONSKIAN_ZERO_TOL) | (lw.sign == 0))[0]
    if bad.size:
        raise WronskianZero(f"Wronskian vanishes{where} at {bad.size} point(s) (first index {int(bad[0])})")


# ---- reduction to Whittaker Wronskians ----

def _q_derivative(k: float, mu2: float, rho: np.ndarray, i: int) -> np.ndarray:
    """d^i/drho^i of q = 1/4 - k/rho + (mu^2 - 1/4)/rho^2."""
    sgn = (-1.0) ** i
    term = -k * sgn * math.factorial(i) / rho ** (i + 1) + (mu2 - 0.25) * sgn * math.factorial(i + 1) / rho ** (i + 2)
    if i == 0:
        term = term + 0.25
    return term


def whittaker_log_wronskian(params: PotentialParams, levels: Sequence[EigenLevel], rho) -> LogWronskian:
    """W_rho[W_{k,o_1}, ..., W_{k,o_m}](rho) from W'' = q W, in sign/log form."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    m = len(levels)
    x_hi = math.log(float(np.max(rho)) / params.rho0)
    columns, logs = [], []
    for level in levels:
        w, dw, ls = branch_for(params, level, x_hi).scaled_w(rho)
        stack = [w, dw]
        qs = [_q_derivative(params.k, level.order.squared, rho, i) for i in range(max(m - 2, 0))]
        for j in range(m - 2):
            acc = np.zeros_like(w)
            for i in range(j + 1):
                acc = acc + comb(j, i, exact=True) * qs[i] * stack[j - i]
            stack.append(acc)
        columns.append(np.array(stack[:m]))
        logs.append(ls)
    return _slogdet(columns, logs)


def reduction_exponent(m: int) -> float:
    """Power of rho relating W_x[psi] of m functions to W_rho[W]: m(m-2)/2."""
    return 0.5 * m * (m - 2)


def whittaker_wronskian_reduction(params: PotentialParams, levels: Sequence[EigenLevel], x):
    """
    W[psi_{l_1}, ..., psi_{l_m}](x) for x > 0 through
    rho^{m(m-2)/2} prod(c_j) W_rho[W_{l_1}, ..., W_{l_m}](rho); for m = L + 1
    the exponent is (L-1)(L+1)/2.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x == 0):
        raise KinkPoint("Wronskian requested at the kink x = 0")
    if np.any(x < 0):
        raise DomainError("the Whittaker reduction is stated for x > 0")
    rho = 2.0 * params.g * np.exp(x)
    lw = whittaker_log_wronskian(params, levels, rho)
    log_c = sum(eigenfunction_for(params, level).log_amp for level in levels)
    out = lw.sign * np.exp(lw.log_abs + log_c + reduction_exponent(len(levels)) * np.log(rho))
    return out
