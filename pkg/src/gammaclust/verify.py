"""Exact verdicts for (alpha, gamma)-clusters and clusterings, plus closed-form bounds.

Points of zero weight are exempt from the gamma conditions (they form the
only null sets of a finite space). Inequalities are non-strict and use the
tolerance of :func:`gammaclust.metric.geq`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, EmptySet, HasExceptionalPoints, ShapeMismatch
from .metric import ATOL, RTOL, Clustering, MetricSpace, as_index, geq, leq


def _ratio(num: float, den: float) -> float:
    # 0/0 and c/0 both count as unbounded: gamma * 0 <= anything
    if den <= 0:
        return math.inf
    return num / den


def _jsonable(x: float) -> Optional[float]:
    return None if math.isinf(x) else float(x)


@dataclass(frozen=True)
class ClusterReport:
    ok: bool
    achieved_alpha: float
    achieved_gamma: float
    witness: Optional[tuple[int, int]] = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "achieved_alpha": self.achieved_alpha,
            "achieved_gamma": _jsonable(self.achieved_gamma),
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass(frozen=True)
class ClusteringReport:
    ok: bool
    masses: tuple[float, ...]
    achieved_gamma: float
    exceptional_mass: float = 0.0
    witness: Optional[tuple[int, int, int]] = None
    mass_ok: bool = True

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "masses": list(self.masses),
            "achieved_gamma": _jsonable(self.achieved_gamma),
            "exceptional_mass": self.exceptional_mass,
            "witness": list(self.witness) if self.witness else None,
        }


def _check_params(alpha: float, gamma: float) -> None:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not gamma > 1:
        raise DomainError(f"gamma must exceed 1, got {gamma}")


def is_cluster(space: MetricSpace, C, alpha: float, gamma: float) -> ClusterReport:
    """Is ``C`` an (alpha, gamma)-cluster?

    ``achieved_gamma`` is the minimum of ``Δ(y, C) / Δ(x, C)`` over positive-weight
    ``x`` in ``C`` and ``y`` outside it (``inf`` when nothing lies outside).
    """
    _check_params(alpha, gamma)
    idx = as_index(C, space.n)
    w = space.weight
    mass = float(w[idx].sum())
    if idx.size == 0 or mass <= 0:
        raise EmptySet("a cluster must have positive mass")
    prox = space.dist[:, idx] @ w[idx] / mass
    inside = np.zeros(space.n, dtype=bool)
    inside[idx] = True
    live = w > 0
    xs = np.flatnonzero(inside & live)
    ys = np.flatnonzero(~inside & live)
    if ys.size == 0:
        achieved, witness_pair = math.inf, None
    else:
        x = int(xs[np.argmax(prox[xs])])
        y = int(ys[np.argmin(prox[ys])])
        achieved, witness_pair = _ratio(prox[y], prox[x]), (x, y)
    gamma_ok = witness_pair is None or bool(geq(prox[witness_pair[1]], gamma * prox[witness_pair[0]]))
    ok = bool(geq(mass, alpha)) and gamma_ok
    return ClusterReport(ok, mass, achieved, None if gamma_ok else witness_pair)


def proximity_table(space: MetricSpace, C: Clustering) -> np.ndarray:
    """``T[x, i] = Δ(x, C_i)`` for every point and named part (``inf`` for zero-mass parts)."""
    masses = C.masses(space)
    named = C.labels >= 0
    onehot = np.zeros((space.n, C.k))
    onehot[np.flatnonzero(named), C.labels[named]] = space.weight[named]
    T = space.dist @ onehot / np.where(masses > 0, masses, 1.0)
    return np.where(masses > 0, T, np.inf)


def _clustering_verdict(space: MetricSpace, C: Clustering, alpha: float, gamma: float,
                        eps: float) -> ClusteringReport:
    masses = C.masses(space)
    exc = C.exceptional_mass(space)
    mass_ok = bool(np.all(geq(masses, alpha))) and bool(leq(exc, eps))
    achieved, witness = math.inf, None
    if C.k >= 2:
        T = proximity_table(space, C)
        active = np.flatnonzero((C.labels >= 0) & (space.weight > 0))
        own = T[active, C.labels[active]]
        other = T[active].copy()
        other[np.arange(active.size), C.labels[active]] = np.inf
        j = np.argmin(other, axis=1)
        nearest = other[np.arange(active.size), j]
        ratios = np.where(own > 0, nearest / np.where(own > 0, own, 1.0), np.inf)
        if active.size:
            pos = int(np.argmin(ratios))
            achieved = float(ratios[pos])
            fails = ~geq(nearest, gamma * own)
            if np.any(fails):
                pos = int(np.argmax(fails))
                x = int(active[pos])
                witness = (x, int(C.labels[x]), int(j[pos]))
    ok = mass_ok and witness is None
    return ClusteringReport(ok, tuple(float(m) for m in masses), achieved, exc, witness, mass_ok)


def is_clustering(space: MetricSpace, C: Clustering, alpha: float, gamma: float) -> ClusteringReport:
    """Is ``C`` (a full partition) an (alpha, gamma)-clustering?"""
    _check_params(alpha, gamma)
    if C.n != space.n:
        raise ShapeMismatch("clustering and space sizes differ")
    if C.has_exceptional:
        raise HasExceptionalPoints("use is_eps_clustering for labelings with exceptional points")
    if C.k < 1:
        raise DomainError("a clustering needs at least one part")
    return _clustering_verdict(space, C, alpha, gamma, 0.0)


def is_eps_clustering(space: MetricSpace, C: Clustering, eps: float, alpha: float,
                      gamma: float) -> ClusteringReport:
    """Is ``C`` an (eps, alpha, gamma)-clustering with exceptional set ``{x : label = -1}``?

    Proximities are taken to the named parts only.
    """
    _check_params(alpha, gamma)
    if eps < 0:
        raise DomainError("eps must be non-negative")
    if C.n != space.n:
        raise ShapeMismatch("clustering and space sizes differ")
    if C.k < 1:
        return ClusteringReport(False, (), math.inf, C.exceptional_mass(space), None, False)
    return _clustering_verdict(space, C, alpha, gamma, eps)


class Violation(NamedTuple):
    x: int
    y: int
    bound: str
    other_part: int = -1


def check_regularity(space: MetricSpace, C: Clustering, gamma: float,
                     count: Optional[list] = None) -> list[Violation]:
    """Test the distance-regularity bounds that every (alpha, gamma)-clustering obeys.

    For ``x in C_i``, ``y in C_j`` (``i != j``)::

        (gamma - 1) / gamma * Δ(y, C_i) <= d(x, y) <= (gamma**2 + 1) / (gamma * (gamma - 1)) * Δ(y, C_i)

    and for ``x, y in C_i`` and every ``j != i``: ``d(x, y) <= 2 / (gamma - 1) * Δ(x, C_j)``.
    Returns the violated ``(x, y, bound)`` triples; if ``count`` is a list, the
    number of individual inequality checks is appended to it.
    """
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    if C.has_exceptional:
        raise HasExceptionalPoints("regularity is defined for full clusterings")
    out: list[Violation] = []
    checks = 0
    if C.k >= 2:
        T = proximity_table(space, C)
        d = space.dist
        lo_c = (gamma - 1) / gamma
        hi_c = (gamma * gamma + 1) / (gamma * (gamma - 1))
        intra_c = 2 / (gamma - 1)
        live = space.weight > 0
        parts = [p[live[p]] for p in C.parts()]
        for i, Pi in enumerate(parts):
            for j, Pj in enumerate(parts):
                if i == j or Pi.size == 0 or Pj.size == 0:
                    continue
                # cross pairs x in C_i, y in C_j measured against Δ(y, C_i)
                sub = d[np.ix_(Pi, Pj)]
                ref = T[Pj, i][None, :]
                lo_bad = ~geq(sub, lo_c * ref)
                hi_bad = ~leq(sub, hi_c * ref)
                checks += 2 * sub.size
                for a, b in zip(*np.nonzero(lo_bad)):
                    out.append(Violation(int(Pi[a]), int(Pj[b]), "cross-lower", j))
                for a, b in zip(*np.nonzero(hi_bad)):
                    out.append(Violation(int(Pi[a]), int(Pj[b]), "cross-upper", j))
                # intra pairs x, y in C_i against Δ(x, C_j)
                intra = d[np.ix_(Pi, Pi)]
                bad = ~leq(intra, intra_c * T[Pi, j][:, None])
                checks += intra.size
                for a, b in zip(*np.nonzero(bad)):
                    out.append(Violation(int(Pi[a]), int(Pi[b]), "intra", j))
    if count is not None:
        count.append(checks)
    return out


class TheoryBounds(NamedTuple):
    min_sep: float
    log_max_count: float
    max_count: float
    overflow: bool


def min_separation(alpha: float, gamma: float) -> float:
    """Smallest possible partition distance between two distinct (alpha, gamma)-clusterings."""
    return alpha * (gamma - 1) ** 2 / (2 * gamma * gamma - gamma + 1)


def theory_bounds(alpha: float, gamma: float) -> TheoryBounds:
    """Separation of distinct clusterings and the space-independent cap on their number.

    The cap ``f(alpha, gamma) = 2 * B ** E`` with
    ``B = 12 (2 gamma^2 - gamma + 1) / (alpha^2 (gamma - 1)^2)`` and
    ``E = (sqrt(8) gamma (gamma^2 + 1) / ((gamma - 1)^2 alpha))^2 * ln(1/alpha)``
    is returned as its natural log; ``max_count`` is ``inf`` when it overflows.
    """
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not gamma > 1:
        raise DomainError(f"gamma must exceed 1, got {gamma}")
    g1 = gamma - 1
    base = 12 * (2 * gamma * gamma - gamma + 1) / (alpha * alpha * g1 * g1)
    expo = (math.sqrt(8) * gamma * (gamma * gamma + 1) / (g1 * g1 * alpha)) ** 2 * math.log(1 / alpha)
    log_f = math.log(2) + expo * math.log(base)
    try:
        f = math.exp(log_f)
        overflow = False
    except OverflowError:
        f, overflow = math.inf, True
    return TheoryBounds(min_separation(alpha, gamma), log_f, f, overflow)


def _batch_own_nearest(space: MetricSpace, labels: np.ndarray, k: int):
    lab = np.asarray(labels, dtype=np.int64)
    B, n = lab.shape
    w = space.weight
    onehot = np.zeros((B, n, k))
    np.put_along_axis(onehot, lab[:, :, None], 1.0, axis=2)
    onehot *= w[None, :, None]
    masses = onehot.sum(axis=1)
    present = masses > 0
    num = np.matmul(onehot.transpose(0, 2, 1), space.dist).transpose(0, 2, 1)
    prox = num / np.where(present, masses, 1.0)[:, None, :]
    prox = np.where(present[:, None, :], prox, np.inf)
    own = np.take_along_axis(prox, lab[:, :, None], axis=2)[:, :, 0]
    np.put_along_axis(prox, lab[:, :, None], np.inf, axis=2)
    return masses, own, prox.min(axis=2)


def batch_clustering_gamma(space: MetricSpace, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized verdict data for many full labelings at once.

    ``labels`` is ``(B, n)`` with values in ``0..k-1`` (empty parts allowed,
    they get mass 0 and are ignored). Returns ``(masses (B, k), achieved_gamma (B,))``
    with achieved gamma as in :func:`is_clustering`.
    """
    masses, own, nearest = _batch_own_nearest(space, labels, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(own > 0, nearest / np.where(own > 0, own, 1.0), np.inf)
    ratio = np.where((space.weight > 0)[None, :], ratio, np.inf)
    return masses, ratio.min(axis=1)


def batch_accepts(space: MetricSpace, labels: np.ndarray, k: int, alpha: float, gamma: float) -> np.ndarray:
    """Boolean mask of rows of ``labels`` that are (alpha, gamma)-clusterings.

    Same tolerance semantics as :func:`is_clustering`, point by point.
    """
    masses, own, nearest = _batch_own_nearest(space, labels, k)
    present = masses > 0
    mass_ok = np.all(~present | geq(masses, alpha), axis=1)
    with np.errstate(invalid="ignore"):
        point_ok = geq(nearest, gamma * own) | (space.weight <= 0)[None, :]
    return mass_ok & np.all(point_ok, axis=1)


__all__ = [
    "ClusterReport", "ClusteringReport", "Violation", "TheoryBounds",
    "is_cluster", "is_clustering", "is_eps_clustering", "check_regularity",
    "theory_bounds", "min_separation", "proximity_table",
    "batch_clustering_gamma", "batch_accepts", "RTOL", "ATOL",
]
