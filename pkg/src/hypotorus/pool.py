"""Shared worker pool with an environment-variable thread cap.

Scans over mode indices and sigma grids are embarrassingly parallel; every
call site submits an ordered list of tasks and merges results in input
order, so parallel execution never changes output.  HYPO_THREADS caps the
pool size (default: cpu count, at most 8).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_budget() -> int:
    raw = os.environ.get("HYPO_THREADS", "")
    if raw.strip():
        try:
            k = int(raw)
        except ValueError as exc:
            raise ValueError(f"HYPO_THREADS must be an integer, got {raw!r}") from exc
        return max(1, k)
    return max(1, min(8, os.cpu_count() or 1))


def ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply fn to every item, in parallel when the budget allows.

    Results come back in input order regardless of completion order, so the
    output is identical to [fn(x) for x in items].
    """
    items = list(items)
    workers = min(thread_budget(), len(items)) if items else 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
