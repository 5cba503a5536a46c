# src/WMorse/core/special/asymptotic.py
"""
Large-argument expansion of W_{k,mu}(x):

    W ~ e^{-x/2} x^k sum_s (1/2+mu-k)_s (1/2-mu-k)_s / (s! (-x)^s)

The Pochhammer product only involves mu^2, so real and imaginary orders share
one code path and every coefficient is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from WMorse.config.constants import SEED_CANCELLATION_LIMIT, SEED_MAX_TERMS, SEED_TOL
from WMorse.core.types import OrderParam
from WMorse.utils.errors import DomainError, SeedFailure


@dataclass(frozen=True)
class AsymptoticSeed:
    """Truncated-series estimate of (W, dW/dx) at x_far.

    Values are also carried as ``exp(log_scale) * scaled_*`` so that seeds far
    out in the tail do not underflow.
    """

    x_far: float
    log_scale: float
    scaled_value: float
    scaled_derivative: float
    truncation_error: float
    terms_used: int

    @property
    def value(self) -> float:
        return math.exp(self.log_scale) * self.scaled_value

    @property
    def derivative(self) -> float:
        return math.exp(self.log_scale) * self.scaled_derivative


def asymptotic_seed(
    k: float,
    order: OrderParam,
    x_far: float,
    n_terms: int = SEED_MAX_TERMS,
    *,
    tol: float = SEED_TOL,
) -> AsymptoticSeed:
    """
    Sum the asymptotic series at ``x_far`` until the last retained term is
    below ``tol`` relative to the partial sum.

    Raises:
        SeedFailure: the terms start growing again (divergent tail) or
            ``n_terms`` is exhausted before the tolerance is met.
    """
    if not x_far > 0:
        raise DomainError(f"x_far must be > 0, got {x_far}")
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")

    mu2 = order.squared
    series = 1.0
    d_series = 0.0  # d/dx of the series part
    term = 1.0
    prev_abs = 1.0
    peak = 1.0
    decreasing = False

    for s in range(n_terms):
        c = 0.5 - k + s
        term = term * (c * c - mu2) / ((s + 1) * (-x_far))
        series += term
        d_series -= (s + 1) * term / x_far
        mag = abs(term)
        peak = max(peak, mag)

        if mag <= tol * abs(series):
            if peak > SEED_CANCELLATION_LIMIT * abs(series):
                raise SeedFailure(
                    f"asymptotic series loses precision to cancellation at x_far={x_far:g} "
                    f"(peak term {peak / abs(series):.1e} x sum)"
                )
            return _seed(k, x_far, series, d_series, mag / abs(series), s + 1)

        if mag < prev_abs:
            decreasing = True
        elif decreasing:
            raise SeedFailure(
                f"asymptotic series diverges at x_far={x_far:g} "
                f"(smallest term {prev_abs / abs(series):.3e} > tol {tol:.1e})"
            )
        prev_abs = mag

    raise SeedFailure(f"asymptotic series did not reach tol {tol:.1e} in {n_terms} terms at x_far={x_far:g}")


def _seed(k: float, x_far: float, series: float, d_series: float, err: float, terms: int) -> AsymptoticSeed:
    log_scale = -0.5 * x_far + k * math.log(x_far)
    d_scaled = (-0.5 + k / x_far) * series + d_series
    return AsymptoticSeed(
        x_far=x_far,
        log_scale=log_scale,
        scaled_value=series,
        scaled_derivative=d_scaled,
        truncation_error=err,
        terms_used=terms,
    )
