import numpy as np
import pytest
from hypothesis import given, strategies as st

from gammaclust.partitions import (canonicalize_rows, count_partitions, restricted_growth_strings,
                                   rgs_array, stirling2)

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147]


@pytest.mark.parametrize("n", range(10))
def test_bell_numbers(n):
    assert count_partitions(n) == BELL[n]
    assert rgs_array(n).shape[0] == BELL[n]


def test_three_points_two_blocks():
    assert list(restricted_growth_strings(3, 2)) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 8) for k in range(1, n + 1)])
def test_array_matches_generator(n, k):
    gen = np.array(list(restricted_growth_strings(n, k)), dtype=np.int8)
    np.testing.assert_array_equal(rgs_array(n, k), gen)
    assert gen.shape[0] == count_partitions(n, k) == sum(stirling2(n, j) for j in range(1, k + 1))


def test_rgs_rows_are_distinct_and_canonical():
    rows = rgs_array(7, 3)
    assert len({r.tobytes() for r in rows}) == rows.shape[0]
    np.testing.assert_array_equal(canonicalize_rows(rows), rows)
    assert rows.max() <= 2


@given(st.lists(st.lists(st.integers(-1, 5), min_size=6, max_size=6), min_size=1, max_size=20))
def test_canonicalize_rows_is_relabeling_invariant(rows):
    a = np.array(rows)
    perm = np.random.default_rng(0).permutation(6)
    b = np.where(a >= 0, perm[np.maximum(a, 0)], -1)
    np.testing.assert_array_equal(canonicalize_rows(a), canonicalize_rows(b))
    c = canonicalize_rows(a)
    assert np.all((c >= 0) == (a >= 0))
