# src/WMorse/core/analysis/wkb.py
"""
Bohr-Sommerfeld counting for the symmetric Morse potential.

    n(nu) = (2/pi) int_0^{x_t} sqrt(nu^2 - g^2 e^{2x} + 2gk e^x) dx - 1/2
    x_t   = log[(k + sqrt(k^2 + nu^2)) / g]

The full-line action is 4x the half-line integral, so n counts levels of both
parities (negative ones included when k > 0). The square-root zero at x_t is
removed with u^2 = x_t - x before a fixed Gauss-Legendre rule.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from WMorse.config.constants import WKB_GAUSS_NODES
from WMorse.core.spectrum.potential import right_branch_potential
from WMorse.core.types import PotentialParams
from WMorse.utils.errors import DomainError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(WKB_GAUSS_NODES)


def wkb_turning_point(params: PotentialParams, nu: float) -> float:
    return math.log((params.k + math.sqrt(params.k * params.k + nu * nu)) / params.g)


def wkb_lower_order(params: PotentialParams) -> float:
    """Smallest nu for which the turning point lies at x > 0."""
    g, k = params.g, params.k
    return math.sqrt(max(g * g - 2.0 * g * k, 0.0)) * (1.0 + 1e-10) + 1e-6


def wkb_count(params: PotentialParams, nu: float) -> float:
    if not nu > 0:
        raise DomainError(f"nu must be > 0, got {nu}")
    x_t = wkb_turning_point(params, nu)
    if x_t <= 0:
        raise DomainError(f"turning point x_t={x_t:.3e} <= 0 for nu={nu:g}")

    s = math.sqrt(x_t)
    u = 0.5 * s * (_NODES + 1.0)
    x = x_t - u * u
    gap = np.maximum(nu * nu - right_branch_potential(params, x), 0.0)
    integral = 0.5 * s * float(np.sum(_WEIGHTS * 2.0 * u * np.sqrt(gap)))
    return 2.0 / math.pi * integral - 0.5


def wkb_invert(params: PotentialParams, n: float, *, xtol: float = 1e-13) -> float:
    """nu with wkb_count(nu) = n; the lowest admissible nu when n lies below its count."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    lo = wkb_lower_order(params)
    f_lo = wkb_count(params, lo) - n
    if f_lo >= 0:
        return lo
    hi = max(2.0 * lo, 1.0)
    while wkb_count(params, hi) - n <= 0:
        hi *= 2.0
    return brentq(lambda nu: wkb_count(params, nu) - n, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


def wkb_spacing(params: PotentialParams, nu: float) -> float:
    """Predicted distance in nu between consecutive levels near nu."""
    lo_bound = wkb_lower_order(params)
    delta = 1e-3 * max(nu, 1.0)
    lo = max(nu - delta, lo_bound)
    hi = max(nu, lo_bound) + delta
    dn = wkb_count(params, hi) - wkb_count(params, lo)
    if dn <= 0:
        raise DomainError(f"WKB count not increasing near nu={nu:g}")
    return (hi - lo) / dn
