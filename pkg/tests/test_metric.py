import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gammaclust.errors import (AsymmetricMatrix, BadWeights, EmptySet, NegativeDistance,
                               NonzeroDiagonal, ShapeMismatch, TriangleViolation)
from gammaclust.metric import (Clustering, canonical_labels, delta, delta_sets, delta_uniform,
                               load_space, partition_distance)
from gammaclust.oracle import CYCLE4

from conftest import labelings, spaces


def test_cycle4_loads_with_uniform_weights(c4):
    assert c4.n == 4
    np.testing.assert_array_equal(c4.dist, CYCLE4)
    np.testing.assert_allclose(c4.weight, 0.25)


def test_triangle_violation_witness():
    d = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    with pytest.raises(TriangleViolation) as ei:
        load_space(d)
    assert ei.value.witness == (0, 1, 2)


def test_single_point_space():
    s = load_space([[0.0]])
    assert s.n == 1 and s.weight.tolist() == [1.0]


@pytest.mark.parametrize("d, err", [
    ([[0, 1], [2, 0]], AsymmetricMatrix),
    ([[0, -1], [-1, 0]], NegativeDistance),
    ([[1, 1], [1, 0]], NonzeroDiagonal),
    ([[0, 1, 2]], ShapeMismatch),
    ([[0, np.inf], [np.inf, 0]], NegativeDistance),
])
def test_invalid_matrices(d, err):
    with pytest.raises(err):
        load_space(d)


@pytest.mark.parametrize("w", [[0.5, 0.6], [1.5, -0.5], [1.0]])
def test_bad_weights(w):
    with pytest.raises(BadWeights):
        load_space([[0, 1], [1, 0]], w)


def test_tolerance_accepts_rounding_noise():
    d = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float)
    d[0, 2] = d[2, 0] = 2 * (1 + 1e-12)
    load_space(d)


def test_space_is_read_only(c4):
    with pytest.raises(ValueError):
        c4.dist[0, 1] = 3.0


def test_delta_examples(c4):
    assert delta(c4, 0, [0]) == 0
    assert delta(c4, 0, [0, 1]) == pytest.approx(0.5)
    assert delta(c4, 2, [0, 1]) == pytest.approx(1.5)
    assert delta_uniform(c4, 2, [0, 1]) == pytest.approx(1.5)
    assert delta_uniform(c4, 1, [1, 1]) == 0


@pytest.mark.parametrize("c", [1, 2, 3, 5])
def test_delta_uniform_metric(c):
    n = 6
    s = load_space(np.ones((n, n)) - np.eye(n))
    assert delta(s, 0, range(c)) == pytest.approx((c - 1) / c)


def test_delta_sets_examples():
    s = load_space([[0, 1], [1, 0]])
    assert delta_sets(s, [0], [1]) == 1
    assert delta_sets(s, [0, 1], [0, 1]) == pytest.approx(0.5)


def test_empty_sets_rejected(c4):
    with pytest.raises(EmptySet):
        delta(c4, 0, [])
    with pytest.raises(EmptySet):
        delta_uniform(c4, 0, [])
    z = load_space([[0, 1], [1, 0]], [1.0, 0.0])
    with pytest.raises(EmptySet):
        delta(z, 0, [1])


@given(spaces(min_n=2), st.data())
def test_delta_between_min_and_max(space, data):
    x = data.draw(st.integers(0, space.n - 1))
    A = data.draw(st.lists(st.integers(0, space.n - 1), min_size=1, unique=True))
    v = delta(space, x, A)
    row = space.dist[x, A]
    assert row.min() - 1e-12 <= v <= row.max() + 1e-12


@given(spaces(min_n=1), st.data())
def test_delta_sets_symmetric_and_triangle(space, data):
    pick = st.lists(st.integers(0, space.n - 1), min_size=1, unique=True)
    A, B, C = data.draw(pick), data.draw(pick), data.draw(pick)
    ab = delta_sets(space, A, B)
    assert ab == pytest.approx(delta_sets(space, B, A), rel=1e-12, abs=1e-12)
    assert ab <= delta_sets(space, A, C) + delta_sets(space, C, B) + 1e-12


@given(spaces(min_n=1, weighted=False), st.data())
def test_delta_uniform_matches_delta_for_uniform_weights(space, data):
    x = data.draw(st.integers(0, space.n - 1))
    A = data.draw(st.lists(st.integers(0, space.n - 1), min_size=1, unique=True))
    assert delta_uniform(space, x, A) == pytest.approx(delta(space, x, A), rel=1e-12, abs=1e-12)


def test_partition_distance_example():
    s = load_space(np.ones((4, 4)) - np.eye(4))
    C = Clustering.from_parts(4, [[0, 1], [2, 3]])
    D = Clustering.from_parts(4, [[0, 1, 2], [3]])
    assert partition_distance(s, C, D) == pytest.approx(0.25)
    assert partition_distance(s, C, C) == 0
    assert partition_distance(s, C, Clustering.from_parts(4, [[2, 3], [0, 1]])) == 0


def _brute_distance(space, C, D):
    """Min over injections of the mass of the union of symmetric differences, computed directly."""
    A = [set(p.tolist()) for p in C.parts()]
    B = [set(p.tolist()) for p in D.parts()]
    # pad the shorter list with empty sets; unmatched parts contribute all their mass
    size = max(len(A), len(B))
    A += [set()] * (size - len(A))
    B += [set()] * (size - len(B))
    exc = set(np.flatnonzero(C.labels < 0).tolist()) | set(np.flatnonzero(D.labels < 0).tolist())
    best = np.inf
    for perm in itertools.permutations(range(size)):
        union = set(exc)
        for i, j in enumerate(perm):
            union |= A[i] ^ B[j]
        best = min(best, sum(space.weight[list(union)]) if union else 0.0)
    return best


@given(spaces(min_n=1, max_n=7), st.data())
def test_partition_distance_matches_brute_force(space, data):
    C = Clustering.from_labels(data.draw(labelings(space.n)))
    D = Clustering.from_labels(data.draw(labelings(space.n)))
    assert partition_distance(space, C, D) == pytest.approx(_brute_distance(space, C, D), abs=1e-12)


@given(spaces(min_n=1, max_n=7), st.data())
def test_partition_distance_with_exceptional_points(space, data):
    lab = data.draw(labelings(space.n))
    drop = data.draw(st.lists(st.integers(0, space.n - 1), unique=True, max_size=space.n - 1))
    lab = lab.copy()
    lab[drop] = -1
    if not np.any(lab >= 0):
        return
    C = Clustering.from_labels(lab)
    D = Clustering.from_labels(data.draw(labelings(space.n)))
    assert partition_distance(space, C, D) == pytest.approx(_brute_distance(space, C, D), abs=1e-12)


@given(spaces(min_n=1, max_n=7), st.data())
def test_partition_distance_pseudometric(space, data):
    A, B, C = (Clustering.from_labels(data.draw(labelings(space.n))) for _ in range(3))
    ab = partition_distance(space, A, B)
    assert 0 <= ab <= 1 + 1e-12
    assert ab == pytest.approx(partition_distance(space, B, A), abs=1e-12)
    assert ab <= partition_distance(space, A, C) + partition_distance(space, C, B) + 1e-12


def test_clustering_validation():
    with pytest.raises(ShapeMismatch):
        Clustering(np.array([0, 0, 2]), 3)
    with pytest.raises(ShapeMismatch):
        Clustering.from_parts(3, [[0, 1], [1, 2]])
    C = Clustering.from_labels([5, 5, -1, 2])
    assert C.k == 2 and C.labels.tolist() == [0, 0, -1, 1]
    assert C == Clustering.from_labels([1, 1, -1, 0])
    assert len({C, Clustering.from_labels([1, 1, -1, 0])}) == 1


def test_canonical_labels_keeps_exceptional():
    assert canonical_labels(np.array([3, -1, 3, 1, 0])).tolist() == [0, -1, 0, 1, 2]
