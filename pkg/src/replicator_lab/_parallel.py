"""Order-preserving parallel map capped by ``REPLICATOR_LAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_VAR = "REPLICATOR_LAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{ENV_VAR} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """``[fn(i) for i in items]``, fanned out over processes when allowed.

    Results are always assembled in input order.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
