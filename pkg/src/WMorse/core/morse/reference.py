# src/WMorse/core/morse/reference.py
"""
Closed-form full-line Morse system V_M(x) = g^2 e^{2x} - g(2h+1) e^x.

- Discrete spectrum E_n = -(h - n)^2 for integers 0 <= n < h
- Eigenfunctions e^{hx - rho/2} rho^{-n} L_n^{(2h-2n)}(rho), rho = 2g e^x
- Shape invariance: V_M - 2 (log phi_0)'' is V_M with h -> h - 1
"""

from __future__ import annotations

import math
from typing import List

import numpy as np
from scipy.integrate import quad

from WMorse.config.constants import MAX_ABS_X, QUAD_LIMIT, QUAD_TOL
from WMorse.core.types import PotentialParams
from WMorse.utils.errors import DomainError, EmptySpectrum, IndexOutOfSpectrum, OverflowGuard

SUPERPOTENTIAL_STEP = 1e-3


def _guard(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > MAX_ABS_X):
        raise OverflowGuard(f"|x| beyond {MAX_ABS_X:g}")
    return x


def morse_potential_fullline(params: PotentialParams, x):
    x = _guard(x)
    g, h = params.g, params.h
    ex = np.exp(x)
    return g * g * ex * ex - g * (2.0 * h + 1.0) * ex


def morse_potential_minimum(params: PotentialParams) -> tuple[float, float]:
    """(x_min, V_min) with e^{x_min} = (h + 1/2)/g and V_min = -(h + 1/2)^2."""
    if params.k <= 0:
        raise DomainError(f"V_M has no interior minimum for h <= -1/2 (h={params.h:g})")
    return math.log(params.k / params.g), -params.k * params.k


def level_count(h: float) -> int:
    """Number of integers n >= 0 with n < h (E_n strictly negative)."""
    if h <= 0:
        return 0
    return int(math.ceil(h))


def morse_eigenvalues(params: PotentialParams) -> List[float]:
    count = level_count(params.h)
    if count == 0:
        raise EmptySpectrum(f"h={params.h:g} <= 0: continuous spectrum only")
    return [-((params.h - n) ** 2) for n in range(count)]


def laguerre(n: int, alpha: float, x):
    """Generalised Laguerre polynomial L_n^{(alpha)}(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"Laguerre degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur if np.ndim(cur) else float(cur)


def morse_eigenfunction(params: PotentialParams, n: int, x):
    """Unnormalised phi_n(x); full-line rho = 2g e^x."""
    count = level_count(params.h)
    if not 0 <= n < count:
        raise IndexOutOfSpectrum(f"level {n} not in the Morse spectrum (0..{count - 1})")
    x = _guard(x)
    h = params.h
    rho = 2.0 * params.g * np.exp(x)
    log_env = h * x - 0.5 * rho - n * np.log(rho)
    return np.exp(log_env) * laguerre(n, 2.0 * h - 2.0 * n, rho)


def shape_invariance_gap(params: PotentialParams, x, method: str = "analytic"):
    """
    V_M - 2 (log phi_0)'' minus the shifted potential g^2 e^{2x} - g(2h-1) e^x.

    method="analytic" uses (log phi_0)'' = -g e^x. method="superpotential"
    rebuilds the partner from w = phi_0'/phi_0 by 5-point differences and the
    Riccati identity V_M - E_0 = w^2 + w', i.e. V^[1] = 2 w^2 + 2 E_0 - V_M.
    """
    if params.h <= 0:
        raise EmptySpectrum("shape invariance needs a ground state (h > 0)")
    x = _guard(x)
    g, h = params.g, params.h
    ex = np.exp(x)
    v = morse_potential_fullline(params, x)
    shifted = g * g * ex * ex - g * (2.0 * h - 1.0) * ex

    if method == "analytic":
        partner = v + 2.0 * g * ex
    elif method == "superpotential":
        w = _log_derivative(lambda t: h * t - g * np.exp(t), x, SUPERPOTENTIAL_STEP)
        partner = 2.0 * w * w + 2.0 * (-(h * h)) - v
    else:
        raise DomainError(f"unknown method '{method}'")
    return partner - shifted


def _log_derivative(log_phi, x, step: float):
    """5-point central difference of log phi."""
    return (
        -log_phi(x + 2 * step) + 8 * log_phi(x + step) - 8 * log_phi(x - step) + log_phi(x - 2 * step)
    ) / (12.0 * step)


def morse_overlap(params: PotentialParams, n: int, m: int, x_lo: float = -30.0, x_hi: float = 6.0) -> float:
    """int phi_n phi_m dx over [x_lo, x_hi]."""
    def f(t):
        return float(morse_eigenfunction(params, n, t) * morse_eigenfunction(params, m, t))

    val, _ = quad(f, x_lo, x_hi, epsabs=0.0, epsrel=QUAD_TOL, limit=QUAD_LIMIT)
    return val
