# src/WMorse/core/spectrum/solver.py
"""
Discrete spectrum of the symmetric Morse Hamiltonian.

- Roots of the even/odd matching residuals are bracketed on a uniform grid in
  the order parameter (nu for E > 0, mu for E < 0) and refined with brentq
- Positive-side windows are sized from the WKB count; the window grows up to
  WINDOW_EXTENSIONS times before the spectrum is declared incomplete
- Levels: negative energies first (k > 0), then positive; parity must
  alternate Even, Odd, Even, ... with the global index
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from WMorse.config.constants import (
    ENERGY_BAND,
    ODE_TOL,
    ROOT_TOL,
    SCAN_MAX_STEP,
    WINDOW_EXTENSIONS,
    WINDOW_SAFETY_LEVELS,
)
from WMorse.core.analysis.wkb import wkb_invert, wkb_spacing
from WMorse.core.spectrum.matching import residual_for_order
from WMorse.core.types import EigenLevel, OrderKind, OrderParam, Parity, PotentialParams
from WMorse.utils.errors import DomainError, IncompleteSpectrum, ParityOrderViolation
from WMorse.utils.logging_utils import LogFn, safe_log
from WMorse.utils.parallel import parallel_map


@dataclass(frozen=True)
class ScanRoot:
    energy: float
    order: OrderParam
    residual: float

    def __iter__(self):
        # unpacks as (E_root, residual)
        return iter((self.energy, self.residual))


def _order_interval(e_lo: float, e_hi: float) -> Tuple[OrderKind, float, float]:
    if not e_lo < e_hi:
        raise DomainError(f"empty energy window [{e_lo:g}, {e_hi:g}]")
    if e_lo >= 0:
        lo = max(e_lo, ENERGY_BAND)
        if lo >= e_hi:
            return OrderKind.IMAGINARY, 0.0, 0.0
        return OrderKind.IMAGINARY, math.sqrt(lo), math.sqrt(e_hi)
    if e_hi <= 0:
        hi = min(e_hi, -ENERGY_BAND)
        if e_lo >= hi:
            return OrderKind.REAL, 0.0, 0.0
        return OrderKind.REAL, math.sqrt(-hi), math.sqrt(-e_lo)
    raise DomainError(f"energy window [{e_lo:g}, {e_hi:g}] straddles E = 0")


def default_step(params: PotentialParams, kind: OrderKind, a: float, b: float) -> float:
    """min(SCAN_MAX_STEP, half the WKB spacing at the window midpoint)."""
    if kind is OrderKind.REAL:
        return 0.5 * SCAN_MAX_STEP
    try:
        return min(SCAN_MAX_STEP, 0.5 * wkb_spacing(params, 0.5 * (a + b)))
    except DomainError:
        return 0.5 * SCAN_MAX_STEP


def scan_roots(
    params: PotentialParams,
    parity: Parity,
    e_lo: float,
    e_hi: float,
    step: Optional[float] = None,
    tol: float = ROOT_TOL,
    *,
    ode_tol: float = ODE_TOL,
    log_fn: Optional[LogFn] = None,
) -> List[ScanRoot]:
    """
    All sign changes of the matching residual for ``parity`` with E in
    [e_lo, e_hi] (one sign only). ``step`` is in order-parameter units; roots
    are refined until |dE| < tol. Sorted by ascending energy.
    """
    kind, a, b = _order_interval(e_lo, e_hi)
    if b <= a:
        return []
    if step is None:
        step = default_step(params, kind, a, b)
    if not step > 0:
        raise DomainError(f"step must be > 0, got {step}")

    if kind is OrderKind.IMAGINARY:
        try:
            spacing = wkb_spacing(params, 0.5 * (a + b))
            if spacing < 2.0 * step:
                safe_log(
                    log_fn,
                    f"[WARN] StepTooCoarse: WKB spacing {spacing:.3g} < 2 x step {step:.3g} "
                    f"({parity.value}, nu in [{a:.4g}, {b:.4g}])",
                )
        except DomainError:
            pass

    make = OrderParam.imaginary if kind is OrderKind.IMAGINARY else OrderParam.real

    def f(t: float) -> float:
        return residual_for_order(params, parity, make(t), ode_tol=ode_tol)

    nodes = np.linspace(a, b, max(2, int(math.ceil((b - a) / step)) + 1))
    values = parallel_map(f, list(nodes))

    brackets = []
    for i in range(len(nodes) - 1):
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            brackets.append((nodes[i], nodes[i]))
        elif fa * fb < 0:
            brackets.append((nodes[i], nodes[i + 1]))
    if values[-1] == 0.0:
        brackets.append((nodes[-1], nodes[-1]))

    def refine(bracket: Tuple[float, float]) -> ScanRoot:
        lo, hi = bracket
        if lo == hi:
            t = lo
        else:
            # |dE| = 2 t |dt|
            t = brentq(f, lo, hi, xtol=tol / (2.0 * hi), rtol=4 * np.finfo(float).eps)
        order = make(t)
        return ScanRoot(energy=order.energy, order=order, residual=f(t))

    roots = parallel_map(refine, brackets)
    roots.sort(key=lambda r: r.energy)
    safe_log(log_fn, f"[INFO] {parity.value}: {len(roots)} root(s) for E in [{e_lo:.6g}, {e_hi:.6g}]")
    return roots


def _merge(parts: List[Tuple[Parity, ScanRoot]], tol: float) -> List[Tuple[Parity, ScanRoot]]:
    parts = sorted(parts, key=lambda p: p[1].energy)
    out: List[Tuple[Parity, ScanRoot]] = []
    for parity, root in parts:
        # a root sitting exactly on a shared window edge is found twice
        if out and out[-1][0] is parity and abs(out[-1][1].energy - root.energy) <= 10 * tol:
            continue
        out.append((parity, root))
    return out


def negative_roots(params: PotentialParams, *, tol: float = ROOT_TOL, ode_tol: float = ODE_TOL, log_fn: Optional[LogFn] = None):
    """Both parities for E in (-k^2, 0), merged by energy; empty for k <= 0."""
    if params.k <= 0:
        return []
    found = []
    for parity in (Parity.EVEN, Parity.ODD):
        found += [(parity, r) for r in scan_roots(params, parity, -params.k ** 2, -ENERGY_BAND, tol=tol, ode_tol=ode_tol, log_fn=log_fn)]
    return _merge(found, tol)


def positive_lower_order(params: PotentialParams) -> float:
    """nu floor of the positive-energy scan: sqrt(g(g-k)) for k <= 0."""
    if params.k <= 0:
        return math.sqrt(params.g * (params.g - params.k))
    return math.sqrt(ENERGY_BAND)


def compute_spectrum(
    params: PotentialParams,
    n_levels: int,
    *,
    tol: float = ROOT_TOL,
    ode_tol: float = ODE_TOL,
    log_fn: Optional[LogFn] = None,
) -> List[EigenLevel]:
    if n_levels < 1:
        raise DomainError(f"n_levels must be >= 1, got {n_levels}")

    found = negative_roots(params, tol=tol, ode_tol=ode_tol, log_fn=log_fn)
    if found:
        safe_log(log_fn, f"[INFO] {len(found)} negative-energy level(s) for k={params.k:g}")

    if len(found) < n_levels:
        need = n_levels - len(found)
        positives: List[Tuple[Parity, ScanRoot]] = []
        nu_from = positive_lower_order(params)
        target = n_levels - 1 + WINDOW_SAFETY_LEVELS
        for _ in range(WINDOW_EXTENSIONS + 1):
            nu_to = max(wkb_invert(params, target), nu_from + SCAN_MAX_STEP)
            for parity in (Parity.EVEN, Parity.ODD):
                positives += [
                    (parity, r)
                    for r in scan_roots(params, parity, nu_from ** 2, nu_to ** 2, tol=tol, ode_tol=ode_tol, log_fn=log_fn)
                ]
            positives = _merge(positives, tol)
            if len(positives) >= need:
                break
            safe_log(log_fn, f"[WARN] window nu <= {nu_to:.6g} holds {len(positives)}/{need} positive levels; extending")
            nu_from = nu_to
            target += WINDOW_SAFETY_LEVELS + need
        else:
            raise IncompleteSpectrum(
                f"found {len(found) + len(positives)} of {n_levels} levels after {WINDOW_EXTENSIONS} window extensions"
            )
        found = found + positives

    levels = _assemble(found[:n_levels])
    safe_log(log_fn, f"[DONE] {len(levels)} level(s) for g={params.g:g}, k={params.k:g}")
    return levels


def _assemble(found: List[Tuple[Parity, ScanRoot]]) -> List[EigenLevel]:
    levels: List[EigenLevel] = []
    for m, (parity, root) in enumerate(found):
        if parity is not Parity.of_index(m):
            raise ParityOrderViolation(
                f"level {m} (E={root.energy:.10g}) has parity {parity.value}; "
                f"expected {Parity.of_index(m).value}"
            )
        if levels and not root.energy > levels[-1].energy:
            raise ParityOrderViolation(f"energies not strictly increasing at level {m}")
        levels.append(EigenLevel(index=m, parity=parity, order=root.order, energy=root.energy, residual=root.residual))
    return levels
