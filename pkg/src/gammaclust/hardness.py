"""3DM gadget graphs, isolated-triangle partitions, and graph metrics at gamma = 2.5 + eps.

Vertex layout of a gadget graph for an instance with ``q`` and triples
``M``: ``y_i -> i - 1``, ``z_i -> q + i - 1``, ``w_i -> 2q + i - 1`` (1-based
``i``), then nine private vertices per triple, ``m_j`` of triple ``t``
(0-based) at ``3q + 9t + j - 1``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import BudgetExceeded, DisconnectedGraph, DomainError
from .metric import Clustering, MetricSpace, load_space
from .verify import is_cluster, is_clustering

# per-gadget edges; "y", "z", "w" are the triple's shared vertices, ints are m_1..m_9
GADGET_EDGES: tuple[tuple[object, object], ...] = (
    ("y", 1), ("y", 2), (1, 2), (1, 3), (1, 6), (2, 4), (2, 7),
    (3, 4), (3, 5), (3, 6), (4, 5), (4, 7), (5, 8), (5, 9), (6, 8),
    (6, "z"), (7, 9), (7, "w"), (8, 9), (8, "z"), (9, "w"),
)

# triangles of a gadget chosen when the triple is / is not in the matching
MATCHED_TRIANGLES = (("y", 1, 2), ("z", 6, 8), ("w", 7, 9), (3, 4, 5))
UNMATCHED_TRIANGLES = ((1, 3, 6), (2, 4, 7), (5, 8, 9))


@dataclass(frozen=True)
class ThreeDMInstance:
    q: int
    triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("q must be positive")
        if not self.triples:
            raise DomainError("the triple set must be non-empty")
        norm = tuple(tuple(int(c) for c in t) for t in self.triples)
        for t in norm:
            if len(t) != 3 or not all(1 <= c <= self.q for c in t):
                raise DomainError(f"triple {t} out of range 1..{self.q}")
        if len(set(norm)) != len(norm):
            raise DomainError("duplicate triples")
        object.__setattr__(self, "triples", norm)

    @classmethod
    def from_dict(cls, d: dict) -> "ThreeDMInstance":
        return cls(int(d["q"]), tuple(tuple(t) for t in d["triples"]))

    def to_dict(self) -> dict:
        return {"q": self.q, "triples": [list(t) for t in self.triples]}


@dataclass(frozen=True)
class GadgetGraph:
    instance: ThreeDMInstance
    names: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    adjacency: np.ndarray
    space: MetricSpace
    connected: bool

    @property
    def n(self) -> int:
        return len(self.names)

    def vertex(self, t: int, v) -> int:
        """Index of gadget vertex ``v`` ("y", "z", "w" or 1..9) in triple ``t`` (0-based)."""
        q = self.instance.q
        if v == "y":
            return self.instance.triples[t][0] - 1
        if v == "z":
            return q + self.instance.triples[t][1] - 1
        if v == "w":
            return 2 * q + self.instance.triples[t][2] - 1
        return 3 * q + 9 * t + int(v) - 1

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.to_dict(),
            "names": list(self.names),
            "edges": [list(e) for e in self.edges],
            "connected": self.connected,
            "space": self.space.to_dict(),
        }


def graph_metric(n: int, edges: Sequence[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray, bool]:
    """Adjacency, shortest-path distances and connectivity of an unweighted graph.

    Pairs in different components get distance ``n``, which exceeds every
    finite path length and so keeps the matrix a metric.
    """
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if u == v:
            raise DomainError("self-loops are not allowed")
        adj[u, v] = adj[v, u] = True
    g = csr_matrix(adj.astype(float))
    d = shortest_path(g, directed=False, unweighted=True)
    ncomp, _ = connected_components(g, directed=False)
    d[np.isinf(d)] = float(n)
    return adj, d, ncomp <= 1


def gadget_graph(inst: ThreeDMInstance) -> GadgetGraph:
    q = inst.q
    names = [f"y{i}" for i in range(1, q + 1)] + [f"z{i}" for i in range(1, q + 1)] \
        + [f"w{i}" for i in range(1, q + 1)]
    for t in range(len(inst.triples)):
        names += [f"m{j}_{t + 1}" for j in range(1, 10)]
    n = len(names)

    def idx(t, v):
        if v in ("y", "z", "w"):
            side = "yzw".index(v)
            return side * q + inst.triples[t][side] - 1
        return 3 * q + 9 * t + v - 1

    edges = sorted({tuple(sorted((idx(t, a), idx(t, b))))
                    for t in range(len(inst.triples)) for a, b in GADGET_EDGES})
    adj, d, connected = graph_metric(n, edges)
    if not connected:
        warnings.warn(DisconnectedGraph(f"gadget graph on {n} vertices is disconnected"), stacklevel=2)
    return GadgetGraph(inst, tuple(names), tuple(edges), adj, load_space(d), connected)


# ----------------------------------------------------------------------------
# triangles

def triangles(adj: np.ndarray) -> list[tuple[int, int, int]]:
    n = adj.shape[0]
    out = []
    for a in range(n):
        for b in np.flatnonzero(adj[a, a + 1:]) + a + 1:
            for c in np.flatnonzero(adj[b, b + 1:] & adj[a, b + 1:]) + b + 1:
                out.append((a, int(b), int(c)))
    return out


def triangle_partitions(adj: np.ndarray, limit: Optional[int] = None) -> Iterator[list[tuple[int, int, int]]]:
    """Every partition of the vertices into triangles (not necessarily isolated)."""
    n = adj.shape[0]
    if n % 3:
        return
    by_min: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for t in triangles(adj):
        by_min[t[0]].append(t)
    covered = [False] * n
    chosen: list[tuple[int, int, int]] = []
    found = 0

    def rec(start: int):
        nonlocal found
        p = start
        while p < n and covered[p]:
            p += 1
        if p == n:
            found += 1
            yield list(chosen)
            return
        for t in by_min[p]:
            if covered[t[1]] or covered[t[2]]:
                continue
            for v in t:
                covered[v] = True
            chosen.append(t)
            yield from rec(p + 1)
            chosen.pop()
            for v in t:
                covered[v] = False
            if limit is not None and found >= limit:
                return

    yield from rec(0)


def is_isolated_triangle_partition(adj: np.ndarray, parts: Sequence[Sequence[int]]) -> tuple[bool, Optional[str]]:
    """Whether ``parts`` partitions the vertices into isolated triangles; otherwise a reason."""
    n = adj.shape[0]
    seen = np.zeros(n, dtype=int)
    for p in parts:
        seen[list(p)] += 1
    if np.any(seen != 1):
        v = int(np.flatnonzero(seen != 1)[0])
        return False, f"vertex {v} covered {int(seen[v])} times"
    for p in parts:
        p = list(p)
        if len(p) != 3:
            return False, f"part {p} has size {len(p)}"
        a, b, c = p
        if not (adj[a, b] and adj[b, c] and adj[a, c]):
            return False, f"part {p} is not a triangle"
        hits = adj[:, p].sum(axis=1)
        hits[p] = 0
        if hits.max() > 1:
            v = int(np.argmax(hits))
            return False, f"vertex {v} has {int(hits[v])} neighbors in {p}"
    return True, None


# ----------------------------------------------------------------------------
# 3DM

def solve_3dm_small(inst: ThreeDMInstance, max_triples: int = 25) -> Optional[list[tuple[int, int, int]]]:
    """A perfect 3-dimensional matching by backtracking over Y, or ``None``."""
    if len(inst.triples) > max_triples:
        raise BudgetExceeded(f"exhaustive 3DM limited to {max_triples} triples")
    q = inst.q
    by_y: list[list[tuple[int, int, int]]] = [[] for _ in range(q + 1)]
    for t in inst.triples:
        by_y[t[0]].append(t)
    used_z = [False] * (q + 1)
    used_w = [False] * (q + 1)
    chosen: list[tuple[int, int, int]] = []

    def rec(y: int) -> bool:
        if y > q:
            return True
        for t in by_y[y]:
            if used_z[t[1]] or used_w[t[2]]:
                continue
            used_z[t[1]] = used_w[t[2]] = True
            chosen.append(t)
            if rec(y + 1):
                return True
            chosen.pop()
            used_z[t[1]] = used_w[t[2]] = False
        return False

    return list(chosen) if rec(1) else None


def matching_partition(graph: GadgetGraph, matching: Sequence[tuple[int, int, int]]) -> list[tuple[int, ...]]:
    """Triangles from the matched / unmatched gadget choices for a given matching."""
    chosen = set(map(tuple, matching))
    parts = []
    for t, triple in enumerate(graph.instance.triples):
        shape = MATCHED_TRIANGLES if triple in chosen else UNMATCHED_TRIANGLES
        parts += [tuple(sorted(graph.vertex(t, v) for v in tri)) for tri in shape]
    return sorted(parts)


@dataclass(frozen=True)
class TriangleVerdict:
    isolated: bool
    clustering: bool
    clusters: bool
    reason: Optional[str]

    @property
    def agree(self) -> bool:
        return self.isolated == self.clustering == self.clusters


def triangle_verdict(graph: GadgetGraph, parts: Sequence[Sequence[int]], gamma: float = 2.5) -> TriangleVerdict:
    """Isolated-triangle test next to the clustering and per-part cluster tests at (3/|V|, gamma)."""
    n = graph.n
    alpha = 3.0 / n
    iso, why = is_isolated_triangle_partition(graph.adjacency, parts)
    C = Clustering.from_parts(n, [sorted(p) for p in parts])
    rep = is_clustering(graph.space, C, alpha, gamma)
    bad = [p for p in parts if not is_cluster(graph.space, sorted(p), alpha, gamma).ok]
    reason = why
    if reason is None and not rep.ok:
        reason = f"clustering fails, witness {rep.witness}"
    if reason is None and bad:
        reason = f"part {sorted(bad[0])} is not a cluster"
    return TriangleVerdict(iso, rep.ok, not bad, reason)


def triangle_clusterings(adj: np.ndarray, space: MetricSpace, alpha: float,
                         gamma: float = 2.5) -> list[list[tuple[int, int, int]]]:
    """Triangle partitions (two or more parts) that are (alpha, gamma)-clusterings of ``space``."""
    n = adj.shape[0]
    out = []
    for parts in triangle_partitions(adj):
        if len(parts) < 2:
            continue
        C = Clustering.from_parts(n, [list(p) for p in parts])
        if is_clustering(space, C, alpha, gamma).ok:
            out.append(parts)
    return out


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield [[head]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [[head] + sub[i]] + sub[i + 1:]


def clustering_partitions(graph: GadgetGraph, gamma: float = 2.5) -> list[list[tuple[int, ...]]]:
    """All (3/|V|, gamma)-clusterings with at least two parts of a gadget graph.

    A part holding a vertex with a neighbor outside it must be a triangle; a
    part with no such vertex is a union of whole components. So each
    component is either covered by triangles or placed whole into some part,
    and only those partitions are tried. On a connected graph this reduces to
    triangle partitions.
    """
    if graph.connected:
        return triangle_clusterings(graph.adjacency, graph.space, 3.0 / graph.n, gamma)

    n, adj = graph.n, graph.adjacency
    _, comp = connected_components(adj, directed=False)
    groups = [np.flatnonzero(comp == c) for c in range(comp.max() + 1)]
    tri_opts = []
    for idx in groups:
        sub = adj[np.ix_(idx, idx)]
        tri_opts.append([[tuple(int(idx[v]) for v in t) for t in parts] for parts in triangle_partitions(sub)])
    seen, out = set(), []
    alpha = 3.0 / n
    for mask in range(1 << len(groups)):
        whole = [c for c in range(len(groups)) if mask >> c & 1]
        tiled = [c for c in range(len(groups)) if not mask >> c & 1]
        if any(not tri_opts[c] for c in tiled):
            continue
        for blocks in _set_partitions(whole):
            merged = [tuple(sorted(int(v) for c in b for v in groups[c])) for b in blocks]
            for combo in itertools.product(*(tri_opts[c] for c in tiled)):
                parts = merged + [tuple(sorted(t)) for tp in combo for t in tp]
                if len(parts) < 2:
                    continue
                key = tuple(sorted(parts))
                if key in seen:
                    continue
                seen.add(key)
                C = Clustering.from_parts(n, [list(p) for p in parts])
                if is_clustering(graph.space, C, alpha, gamma).ok:
                    out.append(list(key))
    return out


@dataclass
class ReductionReport:
    instance: ThreeDMInstance
    n_vertices: int
    connected: bool
    matching: Optional[list[tuple[int, int, int]]]
    constructive_ok: Optional[bool]
    triangle_partitions: int
    isolated_partitions: int
    clusterings: int
    triangles_ok: bool
    matching_ok: bool
    equivalence_ok: bool
    notes: list[str]

    @property
    def ok(self) -> bool:
        return (self.triangles_ok and self.matching_ok and self.equivalence_ok
                and self.constructive_ok is not False)

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.to_dict(),
            "n_vertices": self.n_vertices,
            "connected": self.connected,
            "has_3dm": self.matching is not None,
            "matching": [list(t) for t in self.matching] if self.matching is not None else None,
            "constructive_ok": self.constructive_ok,
            "triangle_partitions": self.triangle_partitions,
            "isolated_partitions": self.isolated_partitions,
            "clusterings": self.clusterings,
            "triangles_ok": self.triangles_ok,
            "matching_ok": self.matching_ok,
            "equivalence_ok": self.equivalence_ok,
            "ok": self.ok,
            "notes": list(self.notes),
        }


def check_reduction(inst: ThreeDMInstance, max_vertices: int = 60) -> ReductionReport:
    """Check the gadget reduction on one instance.

    Constructive direction: a matching yields isolated triangles that form a
    (3/|V|, 2.5)-clustering of (3/|V|, 2.5)-clusters. Exhaustive directions
    (graph up to ``max_vertices``): isolated-triangle partitions exist iff a
    matching exists, every one of them passes both tests, a clustering with
    two or more parts exists iff a matching exists, and on connected graphs
    every such clustering is an isolated-triangle partition.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraph)
        graph = gadget_graph(inst)
    if graph.n > max_vertices:
        raise BudgetExceeded(f"exhaustive check limited to {max_vertices} vertices, got {graph.n}")
    notes = []
    matching = solve_3dm_small(inst)
    constructive_ok = None
    if matching is not None:
        parts = matching_partition(graph, matching)
        v = triangle_verdict(graph, parts)
        constructive_ok = v.isolated and v.clustering and v.clusters
        if not constructive_ok:
            notes.append(f"constructive partition fails: {v.reason}")

    tri = list(triangle_partitions(graph.adjacency))
    iso = [p for p in tri if is_isolated_triangle_partition(graph.adjacency, p)[0]]
    matching_ok = bool(iso) == (matching is not None)
    if not matching_ok:
        notes.append("isolated-triangle partition existence disagrees with 3DM existence")

    triangles_ok = True
    for p in iso:
        v = triangle_verdict(graph, p)
        if not (v.clustering and v.clusters):
            triangles_ok = False
            notes.append(f"isolated partition rejected: {v.reason}")
            break
    found = clustering_partitions(graph)
    equivalence_ok = bool(found) == (matching is not None)
    if not equivalence_ok:
        notes.append("clustering existence disagrees with 3DM existence")
    if graph.connected:
        iso_keys = {tuple(sorted(p)) for p in iso}
        if {tuple(sorted(p)) for p in found} != iso_keys:
            triangles_ok = False
            notes.append("clusterings differ from isolated-triangle partitions")
    else:
        notes.append("graph disconnected: clusterings may use whole components")
    return ReductionReport(inst, graph.n, graph.connected, matching, constructive_ok, len(tri),
                           len(iso), len(found), triangles_ok, matching_ok, equivalence_ok, notes)


def all_instances(q: int, max_triples: int) -> Iterator[ThreeDMInstance]:
    """Every instance with the given ``q`` and between 1 and ``max_triples`` triples."""
    universe = list(itertools.product(range(1, q + 1), repeat=3))
    for r in range(1, min(max_triples, len(universe)) + 1):
        for combo in itertools.combinations(universe, r):
            yield ThreeDMInstance(q, combo)


# ----------------------------------------------------------------------------
# graph metrics at gamma = 2.5 + eps

@dataclass(frozen=True)
class Match25Result:
    regime: str
    clustering: Optional[Clustering]
    note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "clustering": self.clustering.to_dict() if self.clustering is not None else None,
            "note": self.note,
        }


def _perfect_matching(n: int, adj: np.ndarray, max_n: int = 22) -> Optional[list[tuple[int, int]]]:
    """Perfect matching by DP over subsets of unmatched vertices (lowest vertex first)."""
    if n > max_n:
        raise BudgetExceeded(f"subset matching limited to n <= {max_n}, got {n}")
    if n % 2:
        return None
    nbrs = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    full = (1 << n) - 1
    memo: dict[int, Optional[tuple[int, int]]] = {}

    def solve(mask: int) -> bool:
        # mask = matched vertices so far
        if mask == full:
            return True
        if mask in memo:
            return memo[mask] is not None
        v = (~mask & full & -(~mask & full)).bit_length() - 1
        memo[mask] = None
        for u in nbrs[v]:
            if not mask >> u & 1 and solve(mask | 1 << v | 1 << u):
                memo[mask] = (v, u)
                return True
        return False

    if not solve(0):
        return None
    pairs, mask = [], 0
    while mask != full:
        v, u = memo[mask]
        pairs.append((min(v, u), max(v, u)))
        mask |= 1 << v | 1 << u
    return sorted(pairs)


def graph_partition_25plus(n: int, edges: Sequence[tuple[int, int]], alpha: float, eps: float,
                           max_n: int = 22) -> Match25Result:
    """A (alpha, 2.5 + eps)-clustering of a connected graph metric with two or more parts.

    ``alpha <= 1/n``: the singletons. ``1/n < alpha <= 2/n``: pairs from a
    perfect matching that avoids every edge lying in a triangle. Above
    ``2/n`` only the one-part partition remains, reported as ``None``.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    adj, d, connected = graph_metric(n, edges)
    if not connected:
        raise DomainError("graph must be connected")
    space = load_space(d)
    tol = 1e-12
    if alpha <= 1.0 / n + tol:
        C = Clustering(np.arange(n), n)
        regime = "singletons"
    elif alpha <= 2.0 / n + tol:
        regime = "matching"
        keep = adj.copy()
        for a, b, c in triangles(adj):
            keep[a, b] = keep[b, a] = keep[a, c] = keep[c, a] = keep[b, c] = keep[c, b] = False
        pairs = _perfect_matching(n, keep, max_n)
        if pairs is None:
            return Match25Result(regime, None, "no perfect matching avoids triangle edges")
        C = Clustering.from_parts(n, [list(p) for p in pairs])
    else:
        return Match25Result("trivial", None, "alpha > 2/n: parts would need 3+ vertices; only the one-part partition remains")
    rep = is_clustering(space, C, alpha, 2.5 + eps)
    if not rep.ok:
        return Match25Result(regime, None, f"candidate fails at gamma = 2.5 + eps, witness {rep.witness}")
    return Match25Result(regime, C)
