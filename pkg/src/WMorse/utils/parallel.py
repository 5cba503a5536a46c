# src/WMorse/utils/parallel.py
"""
Thread-pool helpers. Results always come back in input order so that scans
and Gram matrices are identical whatever the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from WMorse.config.constants import THREADS_ENV

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Worker cap from WMORSE_THREADS (0 or unset = auto)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError:
        requested = 0
    if requested <= 0:
        return max(1, min(8, os.cpu_count() or 1))
    return requested


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
