# src/WMorse/core/analysis/interlacing.py
"""
Zeros of the even and odd matching conditions in nu, and the ordering and
bound checks they must satisfy:

    x/2 < lambda_0 < eta_0 < lambda_1 < eta_1 < ...       (k <= 0)
    E_0 > g(g - k)                                        (k <= 0)
    -k^2 < E_m < 0, mu strictly decreasing                 (k > 0, negative levels)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from WMorse.core.spectrum.solver import compute_spectrum, negative_roots
from WMorse.core.types import EigenLevel, OrderKind, Parity, PotentialParams
from WMorse.utils.errors import DomainError
from WMorse.utils.logging_utils import LogFn


@dataclass(frozen=True)
class ZeroSequences:
    lambdas: Tuple[float, ...]
    etas: Tuple[float, ...]
    # False when the first positive-energy level is odd (k > 0 with an odd number of bound negative levels)
    even_first: bool = True

    @property
    def merged(self) -> List[float]:
        first, second = (self.lambdas, self.etas) if self.even_first else (self.etas, self.lambdas)
        out: List[float] = []
        for i in range(max(len(first), len(second))):
            if i < len(first):
                out.append(first[i])
            if i < len(second):
                out.append(second[i])
        return out


@dataclass(frozen=True)
class InterlacingResult:
    ok: bool
    violation: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def zero_sequences(
    params: PotentialParams,
    count: int,
    *,
    levels: Optional[Sequence[EigenLevel]] = None,
    log_fn: Optional[LogFn] = None,
) -> ZeroSequences:
    """First ``count`` positive-energy zeros nu of each matching condition."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if levels is None:
        n_neg = len(negative_roots(params))
        levels = compute_spectrum(params, n_neg + 2 * count + 1, log_fn=log_fn)
    positive = [lv for lv in levels if lv.order.kind is OrderKind.IMAGINARY]
    lambdas = tuple(lv.order.value for lv in positive if lv.parity is Parity.EVEN)[:count]
    etas = tuple(lv.order.value for lv in positive if lv.parity is Parity.ODD)[:count]
    if len(lambdas) < count or len(etas) < count:
        raise DomainError(f"only {len(lambdas)} even / {len(etas)} odd positive zeros in the supplied levels")
    even_first = not positive or positive[0].parity is Parity.EVEN
    return ZeroSequences(lambdas=lambdas, etas=etas, even_first=even_first)


def interlacing_check(zeros: ZeroSequences, x: Optional[float] = None) -> InterlacingResult:
    """
    Strict alternation of the merged sequence, plus lambda_0 > x/2 when ``x``
    is given. ``violation`` is the merged index i with merged[i] >= merged[i+1]
    (0 for a failed bound).
    """
    if not zeros.lambdas or not zeros.etas:
        raise DomainError("interlacing needs nonempty sequences")
    if x is not None and not zeros.lambdas[0] > 0.5 * x:
        return InterlacingResult(False, 0, f"lambda_0={zeros.lambdas[0]:.10g} <= x/2={0.5 * x:.10g}")
    merged = zeros.merged
    for i in range(len(merged) - 1):
        if not merged[i] < merged[i + 1]:
            return InterlacingResult(False, i, f"merged[{i}]={merged[i]:.10g} >= merged[{i + 1}]={merged[i + 1]:.10g}")
    for seq, name in ((zeros.lambdas, "lambda"), (zeros.etas, "eta")):
        for i in range(len(seq) - 1):
            if not seq[i] < seq[i + 1]:
                return InterlacingResult(False, i, f"{name} not increasing at {i}")
    return InterlacingResult(True)


@dataclass(frozen=True)
class BoundsReport:
    ok: bool
    messages: List[str] = field(default_factory=list)


def spectral_bounds_check(params: PotentialParams, levels: Sequence[EigenLevel]) -> BoundsReport:
    """
    k <= 0: E_0 > g(g - k). k > 0: every negative energy in (-k^2, 0) with mu
    strictly decreasing in the index. For 0 < k < g nothing is asserted on the
    positive levels.
    """
    if not levels:
        raise DomainError("no levels to check")
    messages: List[str] = []
    if params.k <= 0:
        floor = params.g * (params.g - params.k)
        if not levels[0].energy > floor:
            messages.append(f"E_0={levels[0].energy:.10g} <= g(g-k)={floor:.10g}")
    else:
        negative = [lv for lv in levels if lv.order.kind is OrderKind.REAL]
        bottom = -params.k * params.k
        for lv in negative:
            if not bottom < lv.energy < 0:
                messages.append(f"E_{lv.index}={lv.energy:.10g} outside ({bottom:.10g}, 0)")
        for a, b in zip(negative, negative[1:]):
            if not b.order.value < a.order.value:
                messages.append(f"mu not decreasing between levels {a.index} and {b.index}")
    return BoundsReport(ok=not messages, messages=messages)
