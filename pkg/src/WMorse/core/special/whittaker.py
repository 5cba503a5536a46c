# src/WMorse/core/special/whittaker.py
"""
Whittaker W_{k,mu}(x) for real mu and imaginary mu = i nu.

- Seeds W, W' at x_far from the large-argument series
- Integrates phi'' = q(x) phi inward with DOP853 (scipy), in fixed-length
  segments; the state is renormalised at the start of each segment and the
  scale is accumulated in log form, so deep tails never underflow
- Keeps the dense output, so one integration answers any x in [x_lo, x_hi]
- Reports the ODE residual: per accepted step |dphi'(step) - int q phi|,
  the integral taken with Gauss-Legendre nodes on the dense output
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from WMorse.config.constants import (
    ODE_TOL,
    OVERFLOW_GUARD_X,
    RESIDUAL_GAUSS_NODES,
    SEED_TOL,
    WHITTAKER_RESIDUAL_TOL,
    WHITTAKER_SEGMENT,
    X_FAR_ATTEMPTS,
    X_FAR_MIN,
    X_FAR_STEP,
)
from WMorse.core.special.asymptotic import AsymptoticSeed, asymptotic_seed
from WMorse.core.types import OrderParam
from WMorse.utils.errors import DomainError, NonConvergence, OverflowGuard, SeedFailure

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(RESIDUAL_GAUSS_NODES)


@dataclass(frozen=True)
class WhittakerEval:
    value: float
    derivative: float
    ode_residual: float


def seed_start(k: float, order: OrderParam, x_hi: float) -> float:
    """First x_far tried: beyond 2 x_hi, the turning point and X_FAR_MIN."""
    turning = 2.0 * (k + math.sqrt(max(k * k - order.squared, 0.0)))
    return max(2.0 * x_hi, turning, X_FAR_MIN)


def select_seed(k: float, order: OrderParam, x_hi: float, *, tol: float = SEED_TOL) -> AsymptoticSeed:
    """Smallest admissible x_far (in steps of X_FAR_STEP) whose series meets ``tol``."""
    start = seed_start(k, order, x_hi)
    last: Optional[SeedFailure] = None
    for attempt in range(X_FAR_ATTEMPTS):
        try:
            return asymptotic_seed(k, order, start + attempt * X_FAR_STEP, tol=tol)
        except SeedFailure as e:
            last = e
    raise SeedFailure(f"no admissible x_far in [{start:g}, {start + (X_FAR_ATTEMPTS - 1) * X_FAR_STEP:g}]: {last}")


@dataclass
class _Segment:
    lo: float
    hi: float
    log_scale: float
    sol: object  # scipy OdeSolution


class WhittakerTrajectory:
    """
    One inward integration of the Whittaker equation covering [x_lo, x_hi].

    ``scaled(x)`` returns (w, dw, log_scale) with W = exp(log_scale) * w;
    calling the trajectory returns (W, W') directly.
    """

    def __init__(
        self,
        k: float,
        order: OrderParam,
        x_lo: float,
        x_hi: Optional[float] = None,
        *,
        ode_tol: float = ODE_TOL,
        seed_tol: float = SEED_TOL,
        x_far: Optional[float] = None,
        residual_tol: float = WHITTAKER_RESIDUAL_TOL,
        segment: float = WHITTAKER_SEGMENT,
    ):
        x_hi = x_lo if x_hi is None else x_hi
        if not (x_lo > 0 and math.isfinite(x_lo)):
            raise DomainError(f"Whittaker argument must be > 0, got {x_lo}")
        if x_hi < x_lo:
            raise DomainError(f"empty range [{x_lo}, {x_hi}]")
        if x_hi > OVERFLOW_GUARD_X:
            raise OverflowGuard(f"Whittaker argument {x_hi:g} beyond guard {OVERFLOW_GUARD_X:g}")

        self.k = float(k)
        self.order = order
        self.x_lo = float(x_lo)
        self.x_hi = float(x_hi)

        if x_far is None:
            self.seed = select_seed(self.k, order, self.x_hi, tol=seed_tol)
        else:
            if x_far < x_hi:
                raise DomainError(f"x_far={x_far} lies inside the requested range")
            self.seed = asymptotic_seed(self.k, order, float(x_far), tol=seed_tol)

        self._segments: List[_Segment] = []
        self.ode_residual = 0.0
        self._integrate(ode_tol, segment)
        if self.ode_residual > residual_tol:
            raise NonConvergence(
                f"Whittaker ODE residual {self.ode_residual:.2e} exceeds {residual_tol:.1e} "
                f"(k={self.k:g}, order={order.kind.value} {order.value:g})"
            )
        # ascending order for lookup
        self._segments.reverse()
        self._his = np.array([s.hi for s in self._segments])

    @property
    def x_far(self) -> float:
        return self.seed.x_far

    def _integrate(self, ode_tol: float, segment: float) -> None:
        k, mu2 = self.k, self.order.squared

        def rhs(t, y):
            q = 0.25 - k / t + (mu2 - 0.25) / (t * t)
            return [y[1], q * y[0]]

        state = np.array([self.seed.scaled_value, self.seed.scaled_derivative], dtype=float)
        log_scale = self.seed.log_scale
        t = self.seed.x_far

        while True:
            norm = float(np.max(np.abs(state)))
            if not (norm > 0 and math.isfinite(norm)):
                raise NonConvergence(f"Whittaker state degenerated at x={t:g}")
            state = state / norm
            log_scale += math.log(norm)

            t_next = max(self.x_lo, t - segment)
            res = solve_ivp(
                rhs,
                (t, t_next),
                state,
                method="DOP853",
                rtol=ode_tol,
                atol=ode_tol * 1e-2,
                dense_output=True,
            )
            if not res.success:
                raise NonConvergence(f"DOP853 failed on [{t_next:g}, {t:g}]: {res.message}")

            self._segments.append(_Segment(lo=t_next, hi=t, log_scale=log_scale, sol=res.sol))
            self.ode_residual = max(self.ode_residual, _step_residual(res, k, mu2))

            state = res.y[:, -1]
            t = t_next
            if t <= self.x_lo:
                break

    def scaled(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        tol = 1e-12 * max(1.0, self.x_hi)
        if np.any(x < self.x_lo - tol) or np.any(x > self.seed.x_far + tol):
            raise DomainError(f"x outside trajectory range [{self.x_lo:g}, {self.x_hi:g}]")
        x = np.clip(x, self.x_lo, self.seed.x_far)

        idx = np.clip(np.searchsorted(self._his, x, side="left"), 0, len(self._segments) - 1)
        w = np.empty_like(x)
        dw = np.empty_like(x)
        log_scale = np.empty_like(x)
        for i in np.unique(idx):
            sel = idx == i
            seg = self._segments[i]
            y = np.asarray(seg.sol(x[sel]))
            w[sel] = y[0]
            dw[sel] = y[1]
            log_scale[sel] = seg.log_scale
        return w, dw, log_scale

    def __call__(self, x) -> Tuple[np.ndarray, np.ndarray]:
        w, dw, log_scale = self.scaled(x)
        factor = np.exp(log_scale)
        return w * factor, dw * factor

    def evaluate(self, x: float) -> WhittakerEval:
        value, deriv = self(x)
        return WhittakerEval(float(value[0]), float(deriv[0]), self.ode_residual)


def _step_residual(res, k: float, mu2: float) -> float:
    """max over accepted steps of |phi'(b) - phi'(a) - int_a^b q phi|, relative to the segment scale."""
    ts = np.asarray(res.t)
    if ts.size < 2:
        return 0.0
    a, b = ts[:-1], ts[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    phi = np.asarray(res.sol(nodes.ravel()))[0].reshape(nodes.shape)
    q = 0.25 - k / nodes + (mu2 - 0.25) / (nodes * nodes)
    integral = half * np.sum(_GL_WEIGHTS[None, :] * q * phi, axis=1)
    jump = res.y[1, 1:] - res.y[1, :-1]
    scale = max(float(np.max(np.abs(res.y))), float(np.max(np.abs(integral))), 1e-300)
    return float(np.max(np.abs(jump - integral)) / scale)


def whittaker_w(
    k: float,
    order: OrderParam,
    x: float,
    *,
    ode_tol: float = ODE_TOL,
    seed_tol: float = SEED_TOL,
    x_far: Optional[float] = None,
) -> WhittakerEval:
    """W_{k,order}(x) and dW/dx, with the ODE residual of the integration path."""
    return WhittakerTrajectory(k, order, x, x, ode_tol=ode_tol, seed_tol=seed_tol, x_far=x_far).evaluate(x)


def whittaker_w_closed_form(k: float, mu: float, x):
    """
    Elementary cases of W for real order:
    W_{mu+1/2,mu}(x) = e^{-x/2} x^{mu+1/2}, which includes W_{0,1/2}(x) = e^{-x/2}
    via the mu -> -mu symmetry.
    """
    mu = abs(float(mu))
    x = np.asarray(x, dtype=float)
    if math.isclose(k, mu + 0.5, abs_tol=1e-14):
        return np.exp(-0.5 * x) * x ** (mu + 0.5)
    if math.isclose(k, 0.5 - mu, abs_tol=1e-14):
        return np.exp(-0.5 * x) * x ** (0.5 - mu)
    raise DomainError(f"no closed form for W_(k={k:g}, mu={mu:g})")
