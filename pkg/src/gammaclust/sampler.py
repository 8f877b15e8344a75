"""Sampling-based search for every (alpha, gamma)-clustering of a finite space.

One repetition draws an i.i.d. sample, walks every partition of the sample
into at most ``floor(1/alpha)`` blocks, and turns each into a labeling of the
whole space by the strict "gamma times closer" Voronoi rule. Candidates are
rounded (unassigned points go to the nearest part) and verified exactly.

Only partitions that keep all copies of a sampled point in one block are
walked. The partition consistent with a true clustering always has that
property, and two copies of a point in different blocks can never both be
consistent with a clustering, so nothing recoverable is skipped; the walk
costs ``count_partitions(#distinct sampled points)`` instead of ``K ** m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, EmptyPart, TooManyPartitions
from .metric import ATOL, Clustering, MetricSpace, geq, partition_distance
from .partitions import canonicalize_rows, count_partitions, rgs_array
from .runtime import make_rng, pmap
from .verify import (
    ClusteringReport,
    batch_accepts,
    is_clustering,
    is_eps_clustering,
    min_separation,
    theory_bounds,
)

DEFAULT_BUDGET = 10 ** 8
CHUNK_ROWS = 4096


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of one search.

    ``delta`` is the slack subtracted from gamma when inducing labels
    (default ``(gamma - 1) / 2``); ``t`` is the symmetric-difference radius in
    the sample-size formula (default half the minimum separation of distinct
    clusterings). ``m`` overrides the formula's sample size and ``eps``
    defaults to ``1 / (n + 1)`` once a space is known.
    """

    alpha: float
    gamma: float
    delta: Optional[float] = None
    t: Optional[float] = None
    fail_prob: float = 0.5
    seed: int = 0
    repetitions: int = 20
    eps: Optional[float] = None
    m: Optional[int] = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        a, g = self.alpha, self.gamma
        if not (0 < a <= 1):
            raise DomainError(f"alpha must lie in (0, 1], got {a}")
        if not g > 1:
            raise DomainError(f"gamma must exceed 1, got {g}")
        if self.delta is None:
            object.__setattr__(self, "delta", (g - 1) / 2)
        if self.t is None:
            object.__setattr__(self, "t", min_separation(a, g) / 2)
        if not (0 < self.delta < g - 1):
            raise DomainError(f"delta must lie in (0, gamma - 1), got {self.delta}")
        if not self.t > 0:
            raise DomainError("t must be positive")
        if not (0 < self.fail_prob < 1):
            raise DomainError("fail_prob must lie in (0, 1)")
        if self.repetitions < 1:
            raise DomainError("repetitions must be at least 1")
        if self.m is not None and self.m < 1:
            raise DomainError("m must be positive")
        if self.eps is not None and self.eps < 0:
            raise DomainError("eps must be non-negative")

    @property
    def max_parts(self) -> int:
        return int(math.floor(1 / self.alpha + 1e-9))

    def resolved_eps(self, n: int) -> float:
        return 1.0 / (n + 1) if self.eps is None else self.eps

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("alpha", "gamma", "delta", "t", "fail_prob", "seed", "repetitions", "eps", "m", "budget")}


def rate_coefficient(alpha: float, gamma: float, slack: float) -> float:
    """``((gamma - 1) * slack * alpha / (sqrt(8) * gamma * (gamma**2 + 1)))**2``."""
    return ((gamma - 1) * slack * alpha / (math.sqrt(8) * gamma * (gamma * gamma + 1))) ** 2


def sample_size(config: SamplerConfig) -> int:
    """Smallest m with ``3 / (t alpha) * exp(-c m) <= fail_prob``, c the rate coefficient."""
    c = rate_coefficient(config.alpha, config.gamma, config.delta)
    need = math.log(3 / (config.t * config.alpha * config.fail_prob)) / c
    return max(1, math.ceil(need - 1e-9))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """An i.i.d. sample stored as per-point multiplicities."""

    counts: np.ndarray

    @property
    def m(self) -> int:
        return int(self.counts.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    @property
    def indices(self) -> np.ndarray:
        return np.repeat(np.arange(self.counts.size), self.counts)

    @classmethod
    def from_indices(cls, n: int, indices: Sequence[int]) -> "SampleSet":
        idx = np.asarray(indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise DomainError("sample index out of range")
        return cls(np.bincount(idx, minlength=n))


def draw_sample(space: MetricSpace, m: int, rng: np.random.Generator) -> SampleSet:
    # multiplicities of m i.i.d. draws from the space's weights
    return SampleSet(rng.multinomial(m, space.weight))


def _induce_rows(space: MetricSpace, support: np.ndarray, counts: np.ndarray,
                 block_labels: np.ndarray, k: int, gamma: float) -> np.ndarray:
    """Voronoi labels for a batch of partitions of the distinct sample points.

    ``block_labels`` is ``(B, u)``. Point x gets block i iff
    ``gamma * ΔU(x, A_i) < ΔU(x, A_j)`` for every other non-empty block j.
    """
    B, u = block_labels.shape
    onehot = np.zeros((B, u, k))
    np.put_along_axis(onehot, block_labels[:, :, None].astype(np.int64), 1.0, axis=2)
    onehot *= counts[None, :, None]
    size = onehot.sum(axis=1)  # (B, k) multiset sizes
    used = size > 0
    # (B, k, u) @ (u, n) -> (B, k, n), transposed to (B, n, k)
    num = np.matmul(onehot.transpose(0, 2, 1), space.dist[support, :]).transpose(0, 2, 1)
    prox = np.where(used[:, None, :], num / np.where(used, size, 1.0)[:, None, :], np.inf)
    best = np.argmin(prox, axis=2)
    low = np.take_along_axis(prox, best[:, :, None], axis=2)[:, :, 0]
    np.put_along_axis(prox, best[:, :, None], np.inf, axis=2)
    second = prox.min(axis=2)
    win = gamma * low < second
    return np.where(win, best, -1)


def induce_partition(space: MetricSpace, sample_parts: Sequence[Sequence[int]], gamma: float) -> Clustering:
    """Label each point by the sample part it is strictly ``gamma`` times closer to.

    ``sample_parts`` are multisets of point indices (repeats count in the
    unweighted mean). Points with no such part get ``-1``. Parts that
    attract no point are dropped and the rest keep their relative order.
    """
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    parts = [np.asarray(list(p), dtype=int) for p in sample_parts]
    if not parts or any(p.size == 0 for p in parts):
        raise EmptyPart("every sample part must be non-empty")
    k = len(parts)
    prox = np.stack([space.dist[:, p].mean(axis=1) for p in parts], axis=1)
    wins = np.zeros((space.n, k), dtype=bool)
    for i in range(k):
        others = np.delete(prox, i, axis=1)
        wins[:, i] = np.all(gamma * prox[:, [i]] < others, axis=1) if k > 1 else True
    if np.any(wins.sum(axis=1) > 1):
        raise AssertionError("two parts both strictly gamma-closer; gamma must exceed 1")
    raw = np.where(wins.any(axis=1), wins.argmax(axis=1), -1)
    used = np.unique(raw[raw >= 0])
    remap = np.full(k, -1)
    remap[used] = np.arange(used.size)
    labels = np.where(raw >= 0, remap[np.maximum(raw, 0)], -1)
    return Clustering(labels, int(used.size))


@dataclass(frozen=True, eq=False)
class CandidateClustering:
    sample: SampleSet
    sample_parts: tuple[tuple[int, ...], ...]  # distinct sampled points per block
    induced: Clustering
    verdict: ClusteringReport


def _partition_count_guard(u: int, k: int, budget: int) -> int:
    count = count_partitions(u, k)
    if count > budget:
        raise TooManyPartitions(
            f"{count} partitions of {u} distinct sampled points into <= {k} blocks exceed the budget "
            f"of {budget}; lower the sample size (m) or raise the budget")
    return count


def enumerate_candidates(space: MetricSpace, config: SamplerConfig, sample: Optional[SampleSet] = None,
                         repetition: int = 0) -> list[CandidateClustering]:
    """All induced candidates for one sample, with their (eps, alpha - eps, gamma - delta) verdicts.

    Without an explicit ``sample``, draws ``config.m`` (or :func:`sample_size`)
    points from stream ``(config.seed, repetition)``.
    """
    if sample is None:
        m = config.m or sample_size(config)
        sample = draw_sample(space, m, make_rng(config.seed, repetition))
    support = sample.support
    counts = sample.counts[support].astype(float)
    k = config.max_parts
    _partition_count_guard(support.size, k, config.budget)
    rgs = rgs_array(support.size, k)
    g_induce = config.gamma - config.delta
    eps = config.resolved_eps(space.n)
    a_check = max(config.alpha - eps, ATOL)
    cache: dict[bytes, tuple[Clustering, ClusteringReport]] = {}
    out = []
    for start in range(0, rgs.shape[0], CHUNK_ROWS):
        block = rgs[start:start + CHUNK_ROWS]
        induced = _induce_rows(space, support, counts, block, k, g_induce)
        for row, lab in zip(block, induced):
            key = lab.tobytes()
            if key not in cache:
                C = induce_from_raw(lab)
                cache[key] = (C, is_eps_clustering(space, C, eps, a_check, g_induce))
            C, rep = cache[key]
            parts = tuple(tuple(support[row == b].tolist()) for b in range(int(row.max()) + 1))
            out.append(CandidateClustering(sample, parts, C, rep))
    return out


def induce_from_raw(raw: np.ndarray) -> Clustering:
    # compress block indices of non-empty parts, keeping their order
    raw = np.asarray(raw, dtype=int)
    used = np.unique(raw[raw >= 0])
    remap = np.full(int(raw.max()) + 1 if used.size else 1, -1)
    remap[used] = np.arange(used.size)
    return Clustering(np.where(raw >= 0, remap[np.maximum(raw, 0)], -1), int(used.size))


def round_rows(space: MetricSpace, labels: np.ndarray, k: int) -> np.ndarray:
    """Assign every ``-1`` point to the named part of least weighted proximity.

    Rows with no named point are returned all ``-1``.
    """
    lab = np.asarray(labels, dtype=np.int64)
    B, n = lab.shape
    w = space.weight
    onehot = np.zeros((B, n, k))
    rr, cc = np.nonzero(lab >= 0)
    onehot[rr, cc, lab[rr, cc]] = w[cc]
    mass = onehot.sum(axis=1)
    present = mass > 0
    num = np.matmul(onehot.transpose(0, 2, 1), space.dist).transpose(0, 2, 1)
    prox = np.where(present[:, None, :], num / np.where(present, mass, 1.0)[:, None, :], np.inf)
    nearest = np.argmin(prox, axis=2)
    rounded = np.where(lab >= 0, lab, nearest)
    empty = ~np.any(present, axis=1)
    rounded[empty] = -1
    # points named into a zero-mass part stay as they are; those parts survive
    return rounded


def unique_rows(rows: np.ndarray, k: int) -> np.ndarray:
    """Distinct rows of a label array with values in ``-1..k-1``, in sorted order."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] <= 1:
        return rows
    base = k + 1
    n = rows.shape[1]
    if n * math.log2(base) < 62:
        keys = (rows + 1) @ (base ** np.arange(n - 1, -1, -1, dtype=np.int64))
        _, first = np.unique(keys, return_index=True)
        return rows[first]
    # wide rows: hash the bytes, then sort only the survivors
    small = rows.astype(np.int8 if k < 127 else np.int32)
    seen: dict[bytes, int] = {}
    for i, r in enumerate(small):
        seen.setdefault(r.tobytes(), i)
    out = rows[list(seen.values())]
    return out[np.lexsort(out.T[::-1])]


@dataclass
class RunStats:
    repetition: int
    m: int
    distinct_points: int
    partitions: int
    induced_distinct: int
    rounded_distinct: int
    accepted: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    config: SamplerConfig
    clusterings: list[Clustering]
    reports: list[ClusteringReport]
    runs: list[RunStats] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "clusterings": [
                {**C.to_dict(), "verdict": r.to_dict()} for C, r in zip(self.clusterings, self.reports)
            ],
            "runs": [r.to_dict() for r in self.runs],
        }


def _one_repetition(space: MetricSpace, config: SamplerConfig, rep: int, m: int) -> tuple[np.ndarray, RunStats]:
    sample = draw_sample(space, m, make_rng(config.seed, rep))
    support = sample.support
    counts = sample.counts[support].astype(float)
    k = config.max_parts
    count = _partition_count_guard(support.size, k, config.budget)
    rgs = rgs_array(support.size, k)
    g_induce = config.gamma - config.delta
    induced = []
    for start in range(0, rgs.shape[0], CHUNK_ROWS):
        rows = _induce_rows(space, support, counts, rgs[start:start + CHUNK_ROWS], k, g_induce)
        induced.append(unique_rows(canonicalize_rows(unique_rows(rows, k)), k))
    induced = unique_rows(np.concatenate(induced), k)
    rounded = round_rows(space, induced, k)
    rounded = rounded[np.all(rounded >= 0, axis=1)]
    rounded = unique_rows(canonicalize_rows(rounded), k)
    ok = batch_accepts(space, rounded, k, config.alpha, config.gamma) if rounded.size else np.zeros(0, bool)
    stats = RunStats(rep, m, int(support.size), count, int(induced.shape[0]), int(rounded.shape[0]), int(ok.sum()))
    return rounded[ok], stats


def search_clusterings(space: MetricSpace, config: SamplerConfig) -> SearchResult:
    """Run ``config.repetitions`` independent sampling rounds and merge verified clusterings.

    Every returned clustering passes :func:`is_clustering` exactly. Outputs are
    ordered by first discovery (repetition, then canonical label order), which
    makes the result independent of how repetitions are scheduled.
    """
    m = config.m or sample_size(config)
    per_rep = pmap(lambda r: _one_repetition(space, config, r, m), range(config.repetitions))
    found: dict[tuple[int, ...], Clustering] = {}
    runs = []
    for rows, stats in per_rep:
        runs.append(stats)
        for row in rows:
            C = Clustering.from_labels(row)
            found.setdefault(C.key(), C)
    clusterings: list[Clustering] = []
    reports: list[ClusteringReport] = []
    for C in found.values():
        rep = is_clustering(space, C, config.alpha, config.gamma)
        if not rep.ok:
            continue
        # zero-weight points can make distinct labelings the same partition up to mass
        if any(partition_distance(space, C, D) <= ATOL for D in clusterings):
            continue
        clusterings.append(C)
        reports.append(rep)
    _check_theory(space, config, clusterings)
    return SearchResult(config, clusterings, reports, runs)


def _check_theory(space: MetricSpace, config: SamplerConfig, clusterings: list[Clustering]) -> None:
    sep = min_separation(config.alpha, config.gamma)
    for i, A in enumerate(clusterings):
        for B in clusterings[i + 1:]:
            d = partition_distance(space, A, B)
            if not geq(d, sep):
                raise RuntimeError(f"distinct clusterings at distance {d} < separation bound {sep}")
    if clusterings and math.log(len(clusterings)) > theory_bounds(config.alpha, config.gamma).log_max_count:
        raise RuntimeError("more clusterings than the space-independent count bound allows")


def find_all_clusterings(space: MetricSpace, alpha: float, gamma: float, seed: int = 0,
                         repetitions: int = 20, **options) -> list[Clustering]:
    """Every (alpha, gamma)-clustering found by :func:`search_clusterings`.

    Extra keyword options (``delta``, ``t``, ``fail_prob``, ``m``, ``budget``,
    ``eps``) go to :class:`SamplerConfig`.
    """
    config = SamplerConfig(alpha, gamma, seed=seed, repetitions=repetitions, **options)
    return search_clusterings(space, config).clusterings
