# src/WMorse/core/spectrum/eigenfunctions.py
"""
Normalised eigenfunctions psi_m(x) = c rho^{-1/2} W_{k,order}(rho), rho = 2g e^{|x|},
times sign(x) for odd levels.

One Whittaker trajectory per level covers [rho_0, rho_max]; c comes from
2 int_{rho_0}^{rho_max} W^2 / rho^2 drho and is cached with the trajectory.
"""

from __future__ import annotations

import math
import threading
import warnings
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from WMorse.config.constants import ODE_TOL, OVERFLOW_GUARD_X, QUAD_LIMIT, QUAD_TOL, TAIL_LOG_RATIO
from WMorse.core.special.whittaker import WhittakerTrajectory
from WMorse.core.types import EigenLevel, Parity, PotentialParams, SampledFunction
from WMorse.utils.errors import QuadratureFailure


def tail_cutoff(k: float, energy: float, rho_start: float) -> float:
    """
    rho_max past the turning point where e^{-rho} rho^{2k-2} has dropped by
    e^{-TAIL_LOG_RATIO} (1e-18) relative to its value at the start.
    """
    rho_t = 2.0 * (k + math.sqrt(max(k * k + energy, 0.0)))
    start = max(rho_t, rho_start)
    rho = start
    while (rho - start) - (2.0 * k - 2.0) * math.log(rho / start) <= TAIL_LOG_RATIO:
        rho += 1.0
        if rho >= OVERFLOW_GUARD_X:
            return OVERFLOW_GUARD_X
    return rho


def adaptive_integral(f: Callable[[float], float], a: float, b: float, tol: float = QUAD_TOL) -> float:
    """Adaptive quadrature on [a, b]; QUADPACK warnings become QuadratureFailure when the error estimate is poor."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        val, err = quad(f, a, b, epsabs=0.0, epsrel=tol, limit=QUAD_LIMIT)
    if not math.isfinite(val):
        raise QuadratureFailure(f"quadrature on [{a:g}, {b:g}] returned {val}")
    if caught and err > 1e3 * tol * abs(val):
        raise QuadratureFailure(f"quadrature on [{a:g}, {b:g}]: error {err:.2e} ({caught[-1].message})")
    return val


class Eigenfunction:
    """psi for one level; evaluation is vectorised over x."""

    def __init__(self, params: PotentialParams, level: EigenLevel, *, ode_tol: float = ODE_TOL, quad_tol: float = QUAD_TOL):
        self.params = params
        self.level = level
        self.ode_tol = ode_tol
        self.rho_max = tail_cutoff(params.k, level.energy, params.rho0)
        self._lock = threading.Lock()
        self._traj = WhittakerTrajectory(params.k, level.order, params.rho0, self.rho_max, ode_tol=ode_tol)

        _, _, ref = self._traj.scaled(params.rho0)
        self._ref_log = float(ref[0])

        def integrand(r: float) -> float:
            w, _, log_scale = self._traj.scaled(r)
            wr = float(w[0]) * math.exp(float(log_scale[0]) - self._ref_log)
            return wr * wr / (r * r)

        raw = 2.0 * adaptive_integral(integrand, params.rho0, self.rho_max, quad_tol)
        if not raw > 0:
            raise QuadratureFailure(f"non-positive norm for level {level.index}")
        # psi = rho^{-1/2} w exp(log_scale + log_amp)
        self.log_amp = -self._ref_log - 0.5 * math.log(raw)

    def _trajectory_for(self, rho_hi: float) -> WhittakerTrajectory:
        with self._lock:
            if rho_hi > self._traj.x_far:
                self._traj = WhittakerTrajectory(
                    self.params.k, self.level.order, self.params.rho0, min(rho_hi, OVERFLOW_GUARD_X), ode_tol=self.ode_tol
                )
            return self._traj

    def scaled_rho(self, rho) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, du/dx, log_scale) with psi_right = exp(log_scale) * u at rho = 2g e^{x}."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        u = np.zeros_like(rho)
        du = np.zeros_like(rho)
        log_scale = np.zeros_like(rho)
        # beyond the guard psi is below e^{-350}
        inside = rho <= OVERFLOW_GUARD_X
        if np.any(inside):
            r = rho[inside]
            traj = self._trajectory_for(float(np.max(r)))
            w, dw, ls = traj.scaled(r)
            root = np.sqrt(r)
            u[inside] = w / root
            du[inside] = (-0.5 * w + r * dw) / root
            log_scale[inside] = ls + self.log_amp
        return u, du, log_scale

    def right_branch(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """psi and psi' of the x > 0 branch, continued analytically (rho = 2g e^{x})."""
        rho = 2.0 * self.params.g * np.exp(np.asarray(x, dtype=float))
        u, du, log_scale = self.scaled_rho(rho)
        factor = np.exp(log_scale)
        return u * factor, du * factor

    def __call__(self, x) -> Tuple[np.ndarray, np.ndarray]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        psi, dpsi = self.right_branch(np.abs(x))
        s = np.sign(x)
        if self.level.parity is Parity.ODD:
            return s * psi, dpsi
        return psi, s * dpsi


@lru_cache(maxsize=256)
def eigenfunction_for(params: PotentialParams, level: EigenLevel, ode_tol: float = ODE_TOL, quad_tol: float = QUAD_TOL) -> Eigenfunction:
    return Eigenfunction(params, level, ode_tol=ode_tol, quad_tol=quad_tol)


def eigenfunction(params: PotentialParams, level: EigenLevel, x):
    """Normalised psi_m(x); scalar in, scalar out."""
    psi, _ = eigenfunction_for(params, level)(x)
    return float(psi[0]) if np.ndim(x) == 0 else psi


def eigenfunction_sampled(params: PotentialParams, level: EigenLevel, grid) -> SampledFunction:
    psi, dpsi = eigenfunction_for(params, level)(grid)
    return SampledFunction(grid=np.asarray(grid, dtype=float), values=psi, derivs=dpsi)
