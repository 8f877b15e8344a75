"""Monte-Carlo check of the sampling bound for empirical proximities.

For an (alpha, gamma)-clustering, a point ``x`` of part ``q`` and another
part ``p``, the event of interest is

    Δ_emp(x, C_p) < (gamma - eps) * Δ_emp(x, C_q)

over an i.i.d. sample of size ``m``; its probability is at most
``3 exp(-(eps (gamma-1) alpha / (sqrt(8) gamma (gamma^2+1)))^2 m)``. A sample
that misses ``C_p`` or ``C_q`` leaves an empirical proximity undefined and is
counted as a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .metric import Clustering, MetricSpace
from .runtime import make_rng
from .verify import is_clustering


def sampling_bound(alpha: float, gamma: float, eps: float, m: int) -> float:
    c = eps * (gamma - 1) * alpha / (math.sqrt(8) * gamma * (gamma ** 2 + 1))
    return 3.0 * math.exp(-c * c * m)


@dataclass(frozen=True)
class MCPoint:
    m: int
    bound: float
    slack: float
    max_freq: float
    worst: tuple[int, int]  # (x, p)
    ok: bool

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "bound": self.bound,
            "slack": self.slack,
            "max_freq": self.max_freq,
            "worst": list(self.worst),
            "ok": self.ok,
        }


def failure_frequencies(space: MetricSpace, C: Clustering, gamma: float, eps: float, m: int,
                        trials: int, rng: np.random.Generator) -> np.ndarray:
    """``F[x, p]``: fraction of trials where the event fails for point ``x`` and part ``p``.

    Entries with ``p`` equal to the part of ``x`` are set to 0.
    """
    n, k = space.n, C.k
    counts = rng.multinomial(m, space.weight, size=trials).astype(float)  # (T, n)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), C.labels] = 1.0
    own = C.labels
    hits = counts @ onehot  # (T, k) sample points per part
    J = np.empty((trials, n, k))
    for p in range(k):
        J[:, :, p] = (counts * onehot[:, p]) @ space.dist  # sum of d(x, Z_j) over Z_j in C_p
    with np.errstate(invalid="ignore", divide="ignore"):
        emp = J / hits[:, None, :]
    emp_own = np.take_along_axis(emp, own[None, :, None].repeat(trials, 0), axis=2)[:, :, 0]
    undefined = (hits[:, None, :] == 0) | (hits[:, own] == 0)[:, :, None]
    bad = undefined | (emp < (gamma - eps) * emp_own[:, :, None])
    fails = bad.mean(axis=0)
    fails[np.arange(n), own] = 0.0
    return fails


def run_montecarlo(space: MetricSpace, C: Clustering, alpha: float, gamma: float, eps: float,
                   ms: Sequence[int], trials: int = 2000, seed: int = 0) -> list[MCPoint]:
    """Empirical failure frequency against the bound plus a 3-sigma binomial slack, per ``m``."""
    if not 0 < eps < gamma:
        raise DomainError("eps must lie in (0, gamma)")
    if not is_clustering(space, C, alpha, gamma).ok:
        raise DomainError("the reference partition is not an (alpha, gamma)-clustering")
    out = []
    for i, m in enumerate(ms):
        F = failure_frequencies(space, C, gamma, eps, int(m), trials, make_rng(seed, i))
        bound = sampling_bound(alpha, gamma, eps, int(m))
        b = min(bound, 1.0)
        slack = 3.0 * math.sqrt(b * (1 - b) / trials)
        x, p = np.unravel_index(int(np.argmax(F)), F.shape)
        top = float(F[x, p])
        out.append(MCPoint(int(m), bound, slack, top, (int(x), int(p)), top <= bound + slack))
    return out
