"""Shared search plumbing: node budgets and deterministic parallel first-hit."""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, TypeVar

from .errors import SearchBudgetExceeded

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_NODE_BUDGET = 10**7


class Budget:
    """Counts search nodes across threads and raises once the limit is passed."""

    def __init__(self, limit: Optional[int] = DEFAULT_NODE_BUDGET):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def tick(self, n: int = 1) -> None:
        with self._lock:
            self.used += n
            if self.limit is not None and self.used > self.limit:
                raise SearchBudgetExceeded(f"search visited more than {self.limit} nodes")


def first_hit(items: Sequence[T], fn: Callable[[T], Optional[R]], workers: int = 1) -> Optional[tuple[int, R]]:
    """Index and result of the first item (in order) for which ``fn`` is not None.

    With several workers, items are evaluated in consecutive batches and the
    lowest-index success in the earliest successful batch wins, so the answer
    does not depend on scheduling.
    """
    if workers <= 1:
        for i, item in enumerate(items):
            out = fn(item)
            if out is not None:
                return i, out
        return None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, len(items), workers):
            batch = items[start : start + workers]
            for offset, out in enumerate(pool.map(fn, batch)):
                if out is not None:
                    return start + offset, out
    return None


def map_ordered(items: Sequence[T], fn: Callable[[T], R], workers: int = 1) -> list[R]:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
