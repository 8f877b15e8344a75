"""Brute-force ground truth and instance generators for small spaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError, PlantingFailed
from .metric import Clustering, MetricSpace, geq, load_space
from .partitions import rgs_array
from .verify import is_cluster, is_clustering


def enumerate_all_clusterings(space: MetricSpace, alpha: float, gamma: float,
                              max_n: int = 12) -> list[Clustering]:
    """Every (alpha, gamma)-clustering of ``space``, by checking all set partitions.

    Partitions with a part lighter than ``alpha`` are discarded up front (an
    exact mass test); each survivor goes through :func:`is_clustering`. The
    one-part partition is included whenever it qualifies.
    """
    n = space.n
    if n > max_n:
        raise BudgetExceeded(f"exhaustive enumeration limited to n <= {max_n}, got {n}")
    rgs = rgs_array(n).astype(np.int64)
    k = rgs.max(axis=1) + 1
    # part masses per row; unused part slots get mass +inf so they never fail
    mass = np.zeros((rgs.shape[0], n))
    np.add.at(mass, (np.arange(rgs.shape[0])[:, None].repeat(n, 1), rgs), space.weight[None, :])
    mass[np.arange(n)[None, :] >= k[:, None]] = np.inf
    heavy = np.all(geq(mass, alpha), axis=1)
    out = []
    for row, kk in zip(rgs[heavy], k[heavy]):
        C = Clustering(row, int(kk))
        if is_clustering(space, C, alpha, gamma).ok:
            out.append(C)
    return out


def enumerate_all_clusters(space: MetricSpace, alpha: float, gamma: float,
                           max_n: int = 15) -> list[frozenset[int]]:
    """Every (alpha, gamma)-cluster of ``space``, testing all non-empty subsets."""
    n = space.n
    if n > max_n:
        raise BudgetExceeded(f"subset enumeration limited to n <= {max_n}, got {n}")
    bits = (np.arange(1, 2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    masses = bits @ space.weight
    out = []
    for mask, m in zip(bits.astype(bool), masses):
        if m <= 0 or not geq(m, alpha):
            continue
        if is_cluster(space, mask, alpha, gamma).ok:
            out.append(frozenset(np.flatnonzero(mask).tolist()))
    return out


def partitions_into_clusters(n: int, clusters: Sequence[frozenset[int]], limit: int | None = None) -> list[list[frozenset[int]]]:
    """All exact covers of ``range(n)`` by members of ``clusters`` (no laminarity assumed)."""
    by_point: list[list[frozenset[int]]] = [[] for _ in range(n)]
    for c in set(clusters):
        by_point[min(c)].append(c)
    found: list[list[frozenset[int]]] = []

    def rec(covered: frozenset[int], chosen: list[frozenset[int]]):
        if limit is not None and len(found) >= limit:
            return
        if len(covered) == n:
            found.append(list(chosen))
            return
        p = next(i for i in range(n) if i not in covered)
        # the cluster covering p must have p as its least uncovered element,
        # and since all smaller points are covered, p is its minimum
        for c in by_point[p]:
            if covered.isdisjoint(c):
                chosen.append(c)
                rec(covered | c, chosen)
                chosen.pop()

    rec(frozenset(), [])
    return found


# ----------------------------------------------------------------------------
# generators

def gen_uniform(n: int, weights=None) -> MetricSpace:
    """All off-diagonal distances 1."""
    if n < 1:
        raise DomainError("n must be positive")
    d = np.ones((n, n)) - np.eye(n)
    return load_space(d, weights)


def gen_paired(n: int, gamma_prime: float) -> MetricSpace:
    """``n`` pairs at distance 1, every other distance ``gamma_prime``.

    Pair ``i`` is the points ``2i`` and ``2i + 1``.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if gamma_prime < 0.5:
        raise DomainError("gamma_prime < 1/2 breaks the triangle inequality")
    m = 2 * n
    d = np.full((m, m), float(gamma_prime))
    for i in range(n):
        d[2 * i, 2 * i + 1] = d[2 * i + 1, 2 * i] = 1.0
    np.fill_diagonal(d, 0.0)
    return load_space(d)


def paired_labels(n: int) -> Clustering:
    return Clustering(np.repeat(np.arange(n), 2), n)


CYCLE4 = np.array([
    [0, 1, 2, 1],
    [1, 0, 1, 2],
    [2, 1, 0, 1],
    [1, 2, 1, 0],
], dtype=float)


def gen_cycle4() -> MetricSpace:
    """Graph metric of the 4-cycle v0 v1 v2 v3."""
    return load_space(CYCLE4)


@dataclass
class PlantedSpec:
    part_sizes: list[int]
    intra_scale: float = 1.0
    intra_jitter: float = 0.2
    inter_distance: float | None = None
    target_gamma: float = 2.0
    seed: int = 0
    max_retries: int = 20


def gen_planted(spec: PlantedSpec) -> tuple[MetricSpace, Clustering]:
    """Clusters with intra distances in ``[s, s (1 + jitter)]`` and a constant inter distance.

    The inter distance starts at ``target_gamma * s * (1 + jitter)`` unless
    given, and grows by 25% per retry until the planted labels verify as an
    (min part mass, target_gamma)-clustering.
    """
    sizes = list(spec.part_sizes)
    if not sizes or min(sizes) < 1:
        raise DomainError("part sizes must be positive")
    if not 0 <= spec.intra_jitter <= 1:
        raise DomainError("intra_jitter must lie in [0, 1] to keep the triangle inequality")
    if spec.intra_scale <= 0 or spec.target_gamma <= 1:
        raise DomainError("intra_scale must be positive and target_gamma > 1")
    s, eta = spec.intra_scale, spec.intra_jitter
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.size
    rng = np.random.default_rng(spec.seed)
    jit = rng.uniform(0.0, 1.0, size=(n, n))
    jit = np.triu(jit, 1)
    jit = jit + jit.T
    same = labels[:, None] == labels[None, :]
    D = spec.inter_distance if spec.inter_distance is not None else spec.target_gamma * s * (1 + eta)
    D = max(D, s * (1 + eta) / 2)
    clustering = Clustering(labels, len(sizes))
    for _ in range(spec.max_retries + 1):
        d = np.where(same, s * (1 + eta * jit), D)
        np.fill_diagonal(d, 0.0)
        space = load_space(d)
        alpha = float(clustering.masses(space).min())
        if is_clustering(space, clustering, alpha, spec.target_gamma).ok:
            return space, clustering
        D *= 1.25
    raise PlantingFailed(f"planted clustering failed to verify after {spec.max_retries} retries")


def gen_random_euclidean(n: int, dim: int = 2, seed: int = 0, blobs: int = 0,
                         spread: float = 0.05) -> MetricSpace:
    """Points uniform in the unit cube, or Gaussian blobs around ``blobs`` uniform centers."""
    if n < 1 or dim < 1:
        raise DomainError("n and dim must be positive")
    rng = np.random.default_rng(seed)
    if blobs > 0:
        centers = rng.uniform(0.0, 1.0, size=(blobs, dim))
        which = rng.integers(0, blobs, size=n)
        pts = centers[which] + rng.normal(0.0, spread, size=(n, dim))
    else:
        pts = rng.uniform(0.0, 1.0, size=(n, dim))
    diff = pts[:, None, :] - pts[None, :, :]
    return load_space(np.sqrt((diff ** 2).sum(axis=-1)))


def gen_hierarchical(n: int, seed: int = 0, levels: int = 3, ratio: float = 8.0) -> MetricSpace:
    """Random ultrametric from a random hierarchy; separated scales make nested clusters.

    Points are split recursively into random groups; points first separated
    at depth ``l`` sit at distance ``ratio ** (levels - l)`` plus a jitter in
    ``[0, 1/2)``. The unjittered distances form an ultrametric with every
    distance at least 1, so the added jitter cannot break the triangle inequality.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if ratio <= 1:
        raise DomainError("ratio must exceed 1")
    rng = np.random.default_rng(seed)
    depth_split = np.full((n, n), levels, dtype=int)

    def split(idx: np.ndarray, depth: int):
        if idx.size <= 1 or depth >= levels:
            return
        groups = rng.integers(0, rng.integers(2, 4), size=idx.size)
        for g in np.unique(groups):
            inner = idx[groups == g]
            outer = idx[groups != g]
            depth_split[np.ix_(inner, outer)] = np.minimum(depth_split[np.ix_(inner, outer)], depth)
            split(inner, depth + 1)

    split(np.arange(n), 0)
    base = ratio ** (levels - depth_split).astype(float)
    jit = rng.uniform(0.0, 0.5, size=(n, n))
    jit = np.triu(jit, 1)
    jit = jit + jit.T
    d = base + jit
    np.fill_diagonal(d, 0.0)
    return load_space(d)
