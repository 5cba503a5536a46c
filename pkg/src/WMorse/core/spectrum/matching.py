# src/WMorse/core/spectrum/matching.py
"""
Matching conditions at the kink rho_0 = 2g (derivatives in rho):

    Even (psi'(0) = 0):  B = -W(rho_0) + 2 rho_0 W'(rho_0)
    Odd  (psi(0) = 0):   D =  W(rho_0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from WMorse.config.constants import ODE_TOL
from WMorse.core.special.whittaker import whittaker_w
from WMorse.core.types import OrderParam, Parity, PotentialParams


@dataclass(frozen=True)
class MatchingCoefficients:
    """A and C need W_{-k}(-rho) (complex argument) and are reported as NaN."""

    A: float
    B: float
    C: float
    D: float


def residual_for_order(params: PotentialParams, parity: Parity, order: OrderParam, *, ode_tol: float = ODE_TOL) -> float:
    ev = whittaker_w(params.k, order, params.rho0, ode_tol=ode_tol)
    if parity is Parity.ODD:
        return ev.value
    return -ev.value + 2.0 * params.rho0 * ev.derivative


def matching_residual(params: PotentialParams, parity: Parity, energy: float, *, ode_tol: float = ODE_TOL) -> float:
    return residual_for_order(params, parity, OrderParam.from_energy(energy), ode_tol=ode_tol)


def matching_coefficients(params: PotentialParams, energy: float, *, ode_tol: float = ODE_TOL) -> MatchingCoefficients:
    ev = whittaker_w(params.k, OrderParam.from_energy(energy), params.rho0, ode_tol=ode_tol)
    return MatchingCoefficients(
        A=math.nan,
        B=-ev.value + 2.0 * params.rho0 * ev.derivative,
        C=math.nan,
        D=ev.value,
    )
