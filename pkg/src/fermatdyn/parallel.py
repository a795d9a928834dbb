"""Deterministic chunked execution.

Search spaces partition into chunks by leading coordinate; chunks may run
on a thread pool, but results are always merged in chunk order, so output
is byte-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")

ENV_WORKERS = "FERMATDYN_WORKERS"


def effective_workers(requested: int | None = None) -> int:
    if requested is not None and requested >= 1:
        return requested
    env = os.environ.get(ENV_WORKERS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def split_lead_values(bound: int, workers: int) -> list[list[int]]:
    """Partition the canonical lead-coordinate range 0..bound."""
    values = list(range(bound + 1))
    chunks = max(1, min(len(values), workers * 4))
    size = -(-len(values) // chunks)
    return [values[i:i + size] for i in range(0, len(values), size)]


def run_ordered(tasks: Sequence[Callable[[], T]], workers: int) -> list[T]:
    """Runs tasks (possibly concurrently) and returns results in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]
