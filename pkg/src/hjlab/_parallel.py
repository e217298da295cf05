"""Process-pool helpers with deterministic reductions.

Estimators in this package are pure functions of (config, seed, grid index),
so disorder replicas can be farmed out to any number of workers.  Results are
always reduced in replica order with a pairwise summation tree, which makes
every reported mean bit-identical no matter how many workers ran.

``HJLAB_THREADS`` caps the worker count (default: ``os.cpu_count()``).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

_ENV_VAR = "HJLAB_THREADS"


def worker_count() -> int:
    """Parallelism cap: HJLAB_THREADS if set, else the CPU count."""
    raw = os.environ.get(_ENV_VAR)
    if raw:
        try:
            k = int(raw)
        except ValueError as exc:
            raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from exc
        if k < 1:
            raise ValueError(f"{_ENV_VAR} must be >= 1, got {k}")
        return k
    return os.cpu_count() or 1


def map_ordered(fn: Callable, args: Sequence, max_workers: int | None = None) -> list:
    """Map ``fn`` over ``args``, preserving input order.

    Runs serially when only one worker is available or the task list is
    short; otherwise uses a process pool.  ``fn`` and the arguments must be
    picklable.
    """
    n_workers = max_workers if max_workers is not None else worker_count()
    n_workers = min(n_workers, len(args)) if args else 1
    if n_workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, args))


def pairwise_sum(items: Iterable[np.ndarray | float]) -> np.ndarray | float:
    """Sum in a fixed pairwise tree so the result is order-of-execution free."""
    buf = list(items)
    if not buf:
        raise ValueError("pairwise_sum of empty sequence")
    while len(buf) > 1:
        nxt = []
        for i in range(0, len(buf) - 1, 2):
            nxt.append(buf[i] + buf[i + 1])
        if len(buf) % 2:
            nxt.append(buf[-1])
        buf = nxt
    return buf[0]


def pairwise_mean(items: Sequence[np.ndarray | float]) -> np.ndarray | float:
    return pairwise_sum(items) / len(items)
