"""Set-partition enumeration by restricted growth strings.

A restricted growth string (RGS) ``a`` of length n has ``a[0] = 0`` and
``a[i] <= 1 + max(a[:i])``; RGSs are in bijection with set partitions.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np


def restricted_growth_strings(n: int, max_blocks: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every RGS of length ``n`` with at most ``max_blocks`` blocks, lexicographically."""
    if n == 0:
        yield ()
        return
    k = n if max_blocks is None else min(max_blocks, n)
    if k < 1:
        return
    a = [0] * n
    b = [0] * n  # b[i] = max(a[:i])
    while True:
        yield tuple(a)
        # rightmost position that can still grow
        i = n - 1
        while i > 0 and (a[i] > b[i] or a[i] + 1 >= k):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m = max(b[i], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = m


@lru_cache(maxsize=64)
def rgs_array(n: int, max_blocks: int | None = None) -> np.ndarray:
    """All RGSs of length ``n`` with at most ``max_blocks`` blocks as a read-only int8 array.

    Row order equals :func:`restricted_growth_strings`.
    """
    k = n if max_blocks is None else min(max_blocks, n)
    if n == 0:
        out = np.zeros((1, 0), dtype=np.int8)
        out.setflags(write=False)
        return out
    if k < 1:
        out = np.zeros((0, n), dtype=np.int8)
        out.setflags(write=False)
        return out
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int16)  # number of blocks used so far, minus one
    for _ in range(1, n):
        choices = np.minimum(top + 1, k - 1) + 1
        parent = np.repeat(np.arange(rows.shape[0]), choices)
        starts = np.cumsum(choices) - choices
        nxt = (np.arange(parent.size) - np.repeat(starts, choices)).astype(np.int8)
        rows = np.concatenate([rows[parent], nxt[:, None]], axis=1)
        top = np.maximum(top[parent], nxt)
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if n == 0 or k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def count_partitions(n: int, max_blocks: int | None = None) -> int:
    """Number of set partitions of an n-set into at most ``max_blocks`` blocks."""
    k = n if max_blocks is None else min(max_blocks, n)
    if n == 0:
        return 1
    return sum(stirling2(n, j) for j in range(1, k + 1))


def canonicalize_rows(labels: np.ndarray) -> np.ndarray:
    """Renumber each row's non-negative labels by first appearance; ``-1`` is kept.

    Vectorized over rows, so identical partitions map to identical rows.
    """
    lab = np.asarray(labels, dtype=np.int64)
    if lab.ndim != 2:
        raise ValueError("expected a 2-d label array")
    b, n = lab.shape
    if b == 0 or n == 0:
        return lab.copy()
    k = int(lab.max()) + 1
    if k <= 0:
        return lab.copy()
    first = np.full((b, k), n, dtype=np.int64)
    rr, cc = np.nonzero(lab >= 0)
    np.minimum.at(first, (rr, lab[rr, cc]), cc)
    # rank of each label value by first position; absent values sort last
    order = np.argsort(first, axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(k)[None, :].repeat(b, axis=0), axis=1)
    out = np.where(lab >= 0, np.take_along_axis(rank, np.where(lab >= 0, lab, 0), axis=1), -1)
    return out
