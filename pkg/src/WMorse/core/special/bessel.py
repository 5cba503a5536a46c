# src/WMorse/core/special/bessel.py
"""
Modified Bessel function K from its cosh-integral representation:

    K_{i nu}(x) = int_0^inf e^{-x cosh t} cos(nu t) dt
    K_alpha(x)  = int_0^inf e^{-x cosh t} cosh(alpha t) dt

The integrand is carried exponentially scaled by e^{x}, so it starts at 1 and
the truncation point is where x (cosh t - 1) reaches BESSEL_TAIL.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from WMorse.config.constants import BESSEL_TAIL, QUAD_LIMIT, QUAD_TOL
from WMorse.utils.errors import DomainError, QuadratureFailure


def _check(nu: float, x: float) -> None:
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"Bessel argument must be > 0, got {x}")
    if not (nu >= 0 and math.isfinite(nu)):
        raise DomainError(f"order must be finite and >= 0, got {nu}")


def _run_quad(f, t_max: float, tol: float, **kwargs) -> float:
    epsabs = tol * 1e-4
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, 0.0, t_max, epsabs=epsabs, epsrel=tol, limit=QUAD_LIMIT, **kwargs)
    if not math.isfinite(val) or err > 10.0 * max(epsabs, tol * abs(val)):
        raise QuadratureFailure(f"K-integral error estimate {err:.2e} above tolerance {tol:.1e}")
    return val


def bessel_k_imag_order(nu: float, x: float, tol: float = QUAD_TOL) -> float:
    """K_{i nu}(x) for nu >= 0, x > 0."""
    _check(nu, x)
    t_max = math.acosh(1.0 + BESSEL_TAIL / x)

    def scaled(t):
        return math.exp(-x * (math.cosh(t) - 1.0))

    if nu == 0:
        val = _run_quad(scaled, t_max, tol)
    else:
        val = _run_quad(scaled, t_max, tol, weight="cos", wvar=nu)
    return math.exp(-x) * val


def bessel_k_real_order(alpha: float, x: float, tol: float = QUAD_TOL) -> float:
    """K_alpha(x) for real alpha; validates the quadrature rule against closed forms."""
    alpha = abs(float(alpha))
    _check(alpha, x)

    # exponent -x (cosh t - 1) + alpha t is decreasing past t* = asinh(alpha / x)
    t_star = math.asinh(alpha / x)
    peak = -x * (math.cosh(t_star) - 1.0) + alpha * t_star
    t_max = max(t_star, 1e-3)
    while -x * (math.cosh(t_max) - 1.0) + alpha * t_max > peak - BESSEL_TAIL:
        t_max *= 1.25

    def scaled(t):
        return math.exp(-x * (math.cosh(t) - 1.0) + alpha * t - peak) * 0.5 * (1.0 + math.exp(-2.0 * alpha * t))

    val = _run_quad(scaled, t_max, tol, points=[t_star] if 0 < t_star < t_max else None)
    return math.exp(peak - x) * val


def bessel_k_imag_order_grid(nu: float, x, tol: float = QUAD_TOL) -> np.ndarray:
    """Vectorised convenience wrapper over ``bessel_k_imag_order``."""
    return np.array([bessel_k_imag_order(nu, float(xi), tol) for xi in np.atleast_1d(x)])
