"""Seeded random streams and the order-preserving worker pool."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "GAMMACLUST_THREADS"


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for ``(seed, *keys)``.

    Streams come from a counter-based generator keyed by the seed and the
    path of spawn keys, so results do not depend on which worker draws them.
    """
    ss = np.random.SeedSequence(int(seed) & (2 ** 64 - 1), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return cap


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``list(map(fn, items))`` on the worker pool; output order is input order."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
