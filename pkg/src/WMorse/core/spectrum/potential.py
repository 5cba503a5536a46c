# src/WMorse/core/spectrum/potential.py
"""
Symmetric Morse potential V(x) = rho^2/4 - k rho, rho = 2g e^{|x|}.
"""

from __future__ import annotations

import math

import numpy as np

from WMorse.config.constants import MAX_ABS_X
from WMorse.core.types import PotentialParams
from WMorse.utils.errors import DomainError, OverflowGuard


def rho_of_x(params: PotentialParams, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > MAX_ABS_X):
        raise OverflowGuard(f"|x| beyond {MAX_ABS_X:g}")
    return 2.0 * params.g * np.exp(np.abs(x))


def symmetric_potential(params: PotentialParams, x):
    rho = rho_of_x(params, x)
    return 0.25 * rho * rho - params.k * rho


def right_branch_potential(params: PotentialParams, x, derivative: int = 0):
    """
    d^i/dx^i of g^2 e^{2x} - 2gk e^x, the x > 0 branch continued to all x.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x > MAX_ABS_X):
        raise OverflowGuard(f"x beyond {MAX_ABS_X:g}")
    g, k = params.g, params.k
    ex = np.exp(x)
    return (2.0 ** derivative) * g * g * ex * ex - 2.0 * g * k * ex


def potential_floor(params: PotentialParams) -> float:
    """min_x V: -k^2 when the outer minimum rho = 2k lies beyond rho_0, else V(0)."""
    if params.k >= params.g:
        return -params.k * params.k
    return params.g * params.g - 2.0 * params.g * params.k


def classical_turning_point(params: PotentialParams, energy: float) -> float:
    """Outer x_t >= 0 with V(x_t) = E."""
    disc = params.k * params.k + energy
    if disc < 0:
        raise DomainError(f"E={energy:g} lies below the potential minimum -k^2")
    rho_t = 2.0 * (params.k + math.sqrt(disc))
    if rho_t <= params.rho0:
        raise DomainError(f"E={energy:g} lies below V(0)={potential_floor(params):g}; no turning point for x > 0")
    return math.log(rho_t / params.rho0)
