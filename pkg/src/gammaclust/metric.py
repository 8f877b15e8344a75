"""Finite metric probability spaces, proximities and the partition distance.

A space is a symmetric distance matrix plus a probability vector over the
points. Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    AsymmetricMatrix,
    BadWeights,
    EmptySet,
    NegativeDistance,
    NonzeroDiagonal,
    ShapeMismatch,
    TriangleViolation,
)

RTOL = 1e-9
ATOL = 1e-12


def geq(a, b):
    """Tolerant ``a >= b`` used by every metric and inequality check."""
    return a >= b - RTOL * np.abs(b) - ATOL


def leq(a, b):
    return a <= b + RTOL * np.abs(b) + ATOL


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """``n`` points with distance matrix ``dist`` and probability ``weight``.

    Build through :func:`load_space`, which validates the metric axioms.
    """

    dist: np.ndarray
    weight: np.ndarray

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def mass(self, points) -> float:
        return float(self.weight[as_index(points, self.n)].sum())

    def to_dict(self) -> dict:
        return {"n": self.n, "dist": self.dist.tolist(), "weights": self.weight.tolist()}

    def __repr__(self) -> str:
        return f"MetricSpace(n={self.n})"


def load_space(dist_matrix, weights=None) -> MetricSpace:
    """Validate a distance matrix (and optional weights) into a :class:`MetricSpace`.

    Missing weights default to the uniform distribution. Symmetry, the zero
    diagonal and the triangle inequality are checked at relative tolerance
    ``RTOL`` (absolute ``ATOL`` near zero); the stored matrix is symmetrized.
    """
    d = np.asarray(dist_matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise ShapeMismatch(f"distance matrix must be square and non-empty, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise NegativeDistance("distances must be finite")
    n = d.shape[0]
    if np.any(d < -ATOL):
        i, j = map(int, np.argwhere(d < -ATOL)[0])
        raise NegativeDistance(f"d({i},{j}) = {d[i, j]} < 0")
    diag = np.abs(np.diag(d))
    if np.any(diag > ATOL):
        i = int(np.argmax(diag))
        raise NonzeroDiagonal(f"d({i},{i}) = {d[i, i]} != 0")
    asym = np.abs(d - d.T) > RTOL * np.maximum(np.abs(d), np.abs(d.T)) + ATOL
    if np.any(asym):
        i, j = map(int, np.argwhere(asym)[0])
        raise AsymmetricMatrix(f"d({i},{j}) = {d[i, j]} but d({j},{i}) = {d[j, i]}")
    d = np.clip((d + d.T) / 2.0, 0.0, None)
    np.fill_diagonal(d, 0.0)

    # via[i, k] = d[i, j] + d[j, k] for a fixed intermediate j
    for j in range(n):
        via = d[:, j, None] + d[None, j, :]
        bad = d > via + RTOL * via + ATOL
        if np.any(bad):
            i, k = map(int, np.argwhere(bad)[0])
            raise TriangleViolation((i, j, k))

    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise BadWeights(f"expected {n} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise BadWeights("weights must be finite and non-negative")
        total = w.sum()
        if abs(total - 1.0) > RTOL + ATOL:
            raise BadWeights(f"weights sum to {total!r}, not 1")
        w = w / total
    return MetricSpace(_frozen(d), _frozen(w))


def as_index(points, n: int) -> np.ndarray:
    """Normalize a point set (iterable of indices or boolean mask) to a sorted index array."""
    a = np.asarray(points)
    if a.dtype == bool:
        if a.shape != (n,):
            raise ShapeMismatch(f"mask of shape {a.shape} for a space of {n} points")
        return np.flatnonzero(a)
    a = np.unique(a.astype(int).ravel()) if a.size else np.zeros(0, dtype=int)
    if a.size and (a[0] < 0 or a[-1] >= n):
        raise ShapeMismatch(f"point index out of range for a space of {n} points")
    return a


def delta(space: MetricSpace, x: int, A) -> float:
    """Weighted mean distance from ``x`` to the set ``A`` (``x``'s own zero term included)."""
    idx = as_index(A, space.n)
    w = space.weight[idx]
    total = w.sum()
    if idx.size == 0 or total <= 0:
        raise EmptySet("proximity to an empty or zero-mass set")
    return float(w @ space.dist[x, idx] / total)


def delta_sets(space: MetricSpace, A, B) -> float:
    """Mean of d(x, y) with x, y drawn from the measure restricted to A and B."""
    ia, ib = as_index(A, space.n), as_index(B, space.n)
    wa, wb = space.weight[ia], space.weight[ib]
    if ia.size == 0 or ib.size == 0 or wa.sum() <= 0 or wb.sum() <= 0:
        raise EmptySet("proximity between empty or zero-mass sets")
    return float(wa @ space.dist[np.ix_(ia, ib)] @ wb / (wa.sum() * wb.sum()))


def delta_uniform(space: MetricSpace, x: int, A: Sequence[int]) -> float:
    """Unweighted mean of d(x, .) over the multiset ``A`` (repeats count)."""
    idx = np.asarray(list(A) if not isinstance(A, np.ndarray) else A, dtype=int).ravel()
    if idx.size == 0:
        raise EmptySet("uniform proximity to an empty multiset")
    return float(space.dist[x, idx].mean())


@dataclass(frozen=True, eq=False)
class Clustering:
    """Labels in ``{-1, 0, ..., k-1}``; ``-1`` marks the exceptional set."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=int)
        if lab.ndim != 1:
            raise ShapeMismatch("labels must be one-dimensional")
        if lab.size and (lab.min() < -1 or lab.max() >= self.k):
            raise ShapeMismatch(f"labels out of range for k={self.k}")
        present = np.unique(lab[lab >= 0])
        if present.size != self.k:
            raise ShapeMismatch(f"every one of the k={self.k} parts must be non-empty")
        object.__setattr__(self, "labels", _frozen(lab))

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "Clustering":
        """Build from arbitrary integer labels; non-negative labels are renumbered by first appearance."""
        lab = canonical_labels(np.asarray(list(labels), dtype=int))
        return cls(lab, int(lab.max()) + 1 if np.any(lab >= 0) else 0)

    @classmethod
    def from_parts(cls, n: int, parts: Iterable[Iterable[int]]) -> "Clustering":
        lab = np.full(n, -1, dtype=int)
        count = 0
        for i, part in enumerate(parts):
            idx = np.asarray(list(part), dtype=int)
            if idx.size == 0:
                raise ShapeMismatch(f"part {i} is empty")
            if np.any(lab[idx] != -1):
                raise ShapeMismatch("parts overlap")
            lab[idx] = i
            count += 1
        return cls(lab, count)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def has_exceptional(self) -> bool:
        return bool(np.any(self.labels < 0))

    def parts(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == i) for i in range(self.k)]

    def masses(self, space: MetricSpace) -> np.ndarray:
        return np.bincount(self.labels[self.labels >= 0], weights=space.weight[self.labels >= 0],
                           minlength=self.k)[: self.k]

    def exceptional_mass(self, space: MetricSpace) -> float:
        return float(space.weight[self.labels < 0].sum())

    def key(self) -> tuple[int, ...]:
        """Relabeling-invariant identity of the partition."""
        return tuple(canonical_labels(self.labels).tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, Clustering) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_dict(self) -> dict:
        return {"k": self.k, "labels": self.labels.tolist()}

    def __repr__(self) -> str:
        return f"Clustering(k={self.k}, parts={[p.tolist() for p in self.parts()]})"


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber non-negative labels 0, 1, ... in order of first appearance; keep -1."""
    labels = np.asarray(labels, dtype=int)
    out = np.full(labels.shape, -1, dtype=int)
    seen: dict[int, int] = {}
    for pos, lab in enumerate(labels.tolist()):
        if lab < 0:
            continue
        if lab not in seen:
            seen[lab] = len(seen)
        out[pos] = seen[lab]
    return out


def overlap_matrix(space: MetricSpace, C: Clustering, C2: Clustering) -> np.ndarray:
    """``O[i, j] = P(C_i ∩ C2_j)`` over named parts only."""
    if C.n != space.n or C2.n != space.n:
        raise ShapeMismatch("clusterings must be defined on the given space")
    both = (C.labels >= 0) & (C2.labels >= 0)
    flat = C.labels[both] * C2.k + C2.labels[both]
    o = np.bincount(flat, weights=space.weight[both], minlength=C.k * C2.k)
    return o.reshape(C.k, C2.k)


def partition_distance(space: MetricSpace, C: Clustering, C2: Clustering) -> float:
    """Mass of the union of symmetric differences under the best matching of parts.

    Parts of the larger clustering left unmatched are paired with empty sets,
    and exceptional points (label -1) always count as mismatched, so the value
    is ``1 - max matched overlap``.
    """
    o = overlap_matrix(space, C, C2)
    if o.size == 0:
        return 1.0
    rows, cols = linear_sum_assignment(o, maximize=True)
    return float(min(1.0, max(0.0, 1.0 - o[rows, cols].sum())))
