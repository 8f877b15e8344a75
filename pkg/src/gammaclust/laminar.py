"""Clusters with gamma > 3: balls, their containment forest, and partitions.

For gamma > 3 any two clusters are nested or disjoint and every cluster is
a ball around one of its own points, so all clusters are found by testing
the O(n^2) balls ``B(x, r)`` with ``r`` ranging over distances from ``x``.
Completeness assumes every point has positive weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptySet, GammaTooSmall, LaminarityViolation
from .metric import Clustering, MetricSpace
from .runtime import pmap
from .verify import is_cluster


@dataclass(frozen=True)
class BallCluster:
    center: int
    radius: float
    members: frozenset[int]
    mass: float
    achieved_gamma: float

    def to_dict(self) -> dict:
        return {
            "center": self.center,
            "radius": self.radius,
            "members": sorted(self.members),
            "mass": self.mass,
            "achieved_gamma": None if np.isinf(self.achieved_gamma) else self.achieved_gamma,
        }


def _balls_around(space: MetricSpace, x: int, alpha: float, gamma: float) -> list[BallCluster]:
    row = space.dist[x]
    out = []
    seen = set()
    for r in np.unique(row):
        members = frozenset(np.flatnonzero(row <= r).tolist())
        if members in seen:
            continue
        seen.add(members)
        try:
            rep = is_cluster(space, sorted(members), alpha, gamma)
        except EmptySet:
            continue
        if rep.ok:
            out.append(BallCluster(x, float(r), members, rep.achieved_alpha, float(rep.achieved_gamma)))
    return out


def enumerate_ball_clusters(space: MetricSpace, alpha: float, gamma: float) -> list[BallCluster]:
    """All (alpha, gamma)-clusters for gamma > 3, found among balls.

    Deduplicated by member set; the representative with the smallest center
    (then smallest radius) is kept. Ordered by center, then radius.
    """
    if not gamma > 3:
        raise GammaTooSmall(f"ball enumeration needs gamma > 3, got {gamma}")
    per_center = pmap(lambda x: _balls_around(space, x, alpha, gamma), range(space.n))
    kept: dict[frozenset[int], BallCluster] = {}
    for balls in per_center:
        for b in balls:
            kept.setdefault(b.members, b)
    return list(kept.values())


@dataclass
class LaminarForest:
    """Containment forest: ``parent[i]`` is the smallest node strictly containing node ``i``."""

    nodes: list[BallCluster]
    parent: list[Optional[int]]
    children: list[list[int]] = field(default_factory=list)

    @property
    def roots(self) -> list[int]:
        return [i for i, p in enumerate(self.parent) if p is None]

    @property
    def leaves(self) -> list[int]:
        return [i for i, c in enumerate(self.children) if not c]

    def to_dict(self) -> dict:
        return {
            "nodes": [b.to_dict() for b in self.nodes],
            "parent": {str(i): p for i, p in enumerate(self.parent)},
        }


def _mask(members: frozenset[int]) -> int:
    m = 0
    for i in members:
        m |= 1 << i
    return m


def build_forest(clusters: Sequence[BallCluster]) -> LaminarForest:
    """Arrange clusters by inclusion; raises :class:`LaminarityViolation` on a crossing pair."""
    uniq: dict[frozenset[int], BallCluster] = {}
    for c in clusters:
        uniq.setdefault(c.members, c)
    # larger sets first, so candidate parents precede their children
    nodes = sorted(uniq.values(), key=lambda b: (-len(b.members), min(b.members)))
    masks = [_mask(b.members) for b in nodes]
    sizes = [len(b.members) for b in nodes]
    parent: list[Optional[int]] = [None] * len(nodes)
    for i, mi in enumerate(masks):
        for j in range(len(nodes)):
            if j == i:
                continue
            mj = masks[j]
            inter = mi & mj
            if inter == 0:
                continue
            if inter == mi and sizes[j] > sizes[i]:
                if parent[i] is None or sizes[j] < sizes[parent[i]]:
                    parent[i] = j
            elif inter != mj:
                raise LaminarityViolation((sorted(nodes[i].members), sorted(nodes[j].members)))
    children: list[list[int]] = [[] for _ in nodes]
    for i, p in enumerate(parent):
        if p is not None:
            children[p].append(i)
    return LaminarForest(nodes, parent, children)


def _labels_from(n: int, groups: list[frozenset[int]]) -> Clustering:
    return Clustering.from_parts(n, [sorted(g) for g in sorted(groups, key=min)])


def _covers(n: int, groups: list[frozenset[int]]) -> bool:
    return sum(len(g) for g in groups) == n and len(frozenset().union(*groups)) == n


def find_partition(space: MetricSpace, forest: LaminarForest, alpha: float, gamma: float,
                   min_parts: int = 1) -> Optional[Clustering]:
    """A partition of the space into forest clusters, or ``None``.

    Roots are pairwise disjoint and every cluster sits below some root, so a
    partition exists iff the roots cover the space; the roots themselves are
    returned. With ``min_parts > 1`` a bottom-up pass finds, per node, the
    finest partition of that node into clusters (the node itself, or the
    union of its children's finest partitions when the children cover it),
    and the finest partition of the space is returned if it has enough parts.
    """
    n = space.n
    roots = [forest.nodes[i].members for i in forest.roots]
    if not roots or not _covers(n, roots):
        return None
    if min_parts <= 1:
        result = roots
    else:
        finest: dict[int, list[frozenset[int]]] = {}
        # children always come after parents in node order, so walk backwards
        for i in range(len(forest.nodes) - 1, -1, -1):
            node = forest.nodes[i].members
            kids = forest.children[i]
            split = [g for c in kids for g in finest[c]]
            kid_sets = [forest.nodes[c].members for c in kids]
            if kids and _covers_set(node, kid_sets) and len(split) > 1:
                finest[i] = split
            else:
                finest[i] = [node]
        result = [g for r in forest.roots for g in finest[r]]
        if len(result) < min_parts:
            return None
    for g in result:
        if not is_cluster(space, sorted(g), alpha, gamma).ok:
            raise AssertionError(f"forest node {sorted(g)} does not verify at ({alpha}, {gamma})")
    return _labels_from(n, result)


def _covers_set(node: frozenset[int], parts: list[frozenset[int]]) -> bool:
    return sum(len(p) for p in parts) == len(node) and frozenset().union(*parts) == node


def minimal_partition(space: MetricSpace, forest: LaminarForest, alpha: float, gamma: float) -> Optional[Clustering]:
    """The unique partition into minimal clusters (forest leaves), if the leaves cover the space."""
    leaves = [forest.nodes[i].members for i in forest.leaves]
    if not leaves or not _covers(space.n, leaves):
        return None
    for g in leaves:
        if not is_cluster(space, sorted(g), alpha, gamma).ok:
            raise AssertionError(f"leaf {sorted(g)} does not verify at ({alpha}, {gamma})")
    return _labels_from(space.n, leaves)
