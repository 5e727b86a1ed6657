"""Deterministic parallel map.

Results come back in input order and every task is self-contained, so the
outcome is identical for any worker count.
"""

from __future__ import annotations

from typing import Callable, Iterable, TypeVar

from joblib import Parallel, delayed

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    return Parallel(n_jobs=min(workers, len(items)))(delayed(func)(item) for item in items)
