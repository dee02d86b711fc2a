"""Deterministic worker pool helpers."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "HOLDERLAB_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items, threads=None):
    """Map ``fn`` over ``items``; results come back in input order.

    Compiled kernels release the GIL, so threads give real parallelism while
    keeping every reduction in a fixed order.
    """
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
