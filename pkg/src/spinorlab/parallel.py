"""Deterministic task mapping for sweeps and Monte Carlo batches.

The worker count is capped by the SPINORLAB_THREADS environment variable
(integer >= 1, default 1).  Tasks are independent and results are collected
in submission order, so outputs are bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_ENV_VAR = "SPINORLAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{_ENV_VAR} must be an integer >= 1, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{_ENV_VAR} must be an integer >= 1, got {n}")
    return n


def ordered_map(fn, items) -> list:
    """map(fn, items) as a list, preserving order; threaded when allowed."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
