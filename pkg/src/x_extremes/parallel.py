"""Order-preserving worker pool used by sample- and pixel-parallel loops.

Results are assembled by input index, so output is independent of the
thread count; numpy kernels release the GIL, which is where the win is.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "X_EXTREMES_THREADS"


def resolve_threads(requested: int | None) -> int:
    """CLI flag wins, then the X_EXTREMES_THREADS env var, then 1."""
    if requested is not None:
        n = int(requested)
    else:
        n = int(os.environ.get(THREADS_ENV, "1"))
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    return n


def thread_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T], threads: int = 1) -> list[R]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
