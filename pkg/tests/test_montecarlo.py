import math

import numpy as np
import pytest

from gammaclust.errors import DomainError
from gammaclust.metric import Clustering
from gammaclust.montecarlo import failure_frequencies, run_montecarlo, sampling_bound
from gammaclust.oracle import PlantedSpec, gen_planted, gen_uniform
from gammaclust.runtime import make_rng


def test_bound_formula():
    c = 0.5 * 1 * 0.2 / (math.sqrt(8) * 2 * 5)
    assert sampling_bound(0.2, 2, 0.5, 100) == pytest.approx(3 * math.exp(-c * c * 100))
    assert sampling_bound(0.5, 1.6, 1.5, 10 ** 6) < 1e-100


def test_frequencies_shape_and_own_part_zero():
    space, C = gen_planted(PlantedSpec([6, 6, 6], target_gamma=2, seed=1))
    F = failure_frequencies(space, C, 2.0, 0.5, 30, 50, make_rng(0))
    assert F.shape == (18, 3)
    assert np.all(F[np.arange(18), C.labels] == 0)
    assert np.all((F >= 0) & (F <= 1))


def test_missing_part_counts_as_failure():
    space, C = gen_planted(PlantedSpec([6, 6, 6], target_gamma=2, seed=1))
    # one draw can never hit both parts involved
    F = failure_frequencies(space, C, 2.0, 0.5, 1, 20, make_rng(0))
    mask = np.ones_like(F, dtype=bool)
    mask[np.arange(18), C.labels] = False
    assert np.all(F[mask] == 1)


def test_non_vacuous_regime():
    space, C = gen_planted(PlantedSpec([10, 10], target_gamma=1.6, seed=2))
    m = 6000
    pts = run_montecarlo(space, C, 0.5, 1.6, 1.5, [m], trials=300, seed=1)
    assert pts[0].bound < 0.2 and pts[0].ok


def test_deterministic_given_seed():
    space, C = gen_planted(PlantedSpec([10, 10, 10], target_gamma=2, seed=0))
    a = run_montecarlo(space, C, 1 / 3, 2, 0.5, [5, 10], trials=200, seed=7)
    b = run_montecarlo(space, C, 1 / 3, 2, 0.5, [5, 10], trials=200, seed=7)
    assert [p.to_dict() for p in a] == [p.to_dict() for p in b]


def test_rejects_non_clustering():
    s = gen_uniform(6)
    C = Clustering.from_parts(6, [[0, 1, 2], [3, 4, 5]])
    with pytest.raises(DomainError):
        run_montecarlo(s, C, 0.5, 2.0, 0.5, [10])
    with pytest.raises(DomainError):
        run_montecarlo(s, C, 0.5, 1.2, 1.5, [10])
