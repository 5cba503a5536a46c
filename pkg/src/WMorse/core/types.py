# src/WMorse/core/types.py
"""
Value types shared by the engine modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from WMorse.utils.errors import ConfigError, DomainError


class OrderKind(str, Enum):
    REAL = "real"
    IMAGINARY = "imaginary"


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of_index(cls, m: int) -> "Parity":
        return cls.EVEN if m % 2 == 0 else cls.ODD

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1


@dataclass(frozen=True)
class OrderParam:
    """Second Whittaker index: real mu (E = -mu^2) or imaginary i*nu (E = nu^2)."""

    kind: OrderKind
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0:
            raise DomainError(f"order value must be finite and >= 0, got {self.value}")

    @classmethod
    def real(cls, mu: float) -> "OrderParam":
        # W depends on mu only through mu^2
        return cls(OrderKind.REAL, abs(float(mu)))

    @classmethod
    def imaginary(cls, nu: float) -> "OrderParam":
        return cls(OrderKind.IMAGINARY, abs(float(nu)))

    @classmethod
    def from_energy(cls, energy: float) -> "OrderParam":
        if energy == 0:
            raise DomainError("E = 0 has no order representative (both forms degenerate)")
        if energy > 0:
            return cls.imaginary(math.sqrt(energy))
        return cls.real(math.sqrt(-energy))

    @property
    def squared(self) -> float:
        """mu^2 as it enters the Whittaker equation (negative for imaginary order)."""
        v2 = self.value * self.value
        return v2 if self.kind is OrderKind.REAL else -v2

    @property
    def energy(self) -> float:
        return -self.squared


@dataclass(frozen=True)
class PotentialParams:
    """Coupling g > 0 and shape parameter k = h + 1/2."""

    g: float
    k: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g) and self.g > 0):
            raise ConfigError(f"g must be > 0, got {self.g}")
        if not math.isfinite(self.k):
            raise ConfigError(f"k must be finite, got {self.k}")

    @classmethod
    def from_h(cls, g: float, h: float) -> "PotentialParams":
        return cls(g=float(g), k=float(h) + 0.5)

    @property
    def h(self) -> float:
        return self.k - 0.5

    @property
    def rho0(self) -> float:
        return 2.0 * self.g

    def as_dict(self) -> dict:
        return {"g": self.g, "k": self.k, "h": self.h}


@dataclass(frozen=True)
class EigenLevel:
    index: int
    parity: Parity
    order: OrderParam
    energy: float
    residual: float

    def __post_init__(self) -> None:
        if Parity.of_index(self.index) is not self.parity:
            raise DomainError(f"level {self.index} cannot have parity {self.parity.value}")


@dataclass(frozen=True)
class SampledFunction:
    """A function on a uniform grid with values and first derivatives."""

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        derivs = np.full_like(values, np.nan) if self.derivs is None else np.asarray(self.derivs, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("grid must be one-dimensional with at least two nodes")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise DomainError("grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError("grid must be uniform")
        if values.shape != grid.shape or derivs.shape != grid.shape:
            raise DomainError("values and derivs must match the grid length")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivs", derivs)

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def mirrored_pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Indices (i, j) with grid[i] == -grid[j], i over the positive half."""
        n = self.grid.size
        pos = np.nonzero(self.grid > 0)[0]
        partner = n - 1 - pos
        ok = np.isclose(self.grid[partner], -self.grid[pos], atol=1e-9 * max(1.0, abs(self.grid[-1])))
        return pos[ok], partner[ok]


def symmetric_grid(x_max: float, n_samples: int) -> np.ndarray:
    """Uniform grid on [-x_max, x_max]; odd sample counts put x = 0 on a node."""
    if n_samples < 2:
        raise ConfigError("n_samples must be >= 2")
    return np.linspace(-x_max, x_max, n_samples)
