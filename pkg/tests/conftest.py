import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from gammaclust.metric import load_space
from gammaclust.oracle import gen_cycle4

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def c4():
    return gen_cycle4()


@st.composite
def spaces(draw, min_n=1, max_n=8, weighted=True):
    """Random Euclidean spaces, optionally with random positive weights."""
    n = draw(st.integers(min_n, max_n))
    dim = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, size=(n, dim))
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    w = None
    if weighted and draw(st.booleans()):
        w = rng.uniform(0.1, 1.0, size=n)
        w /= w.sum()
    return load_space(d, w)


@st.composite
def labelings(draw, n, max_k=4):
    k = draw(st.integers(1, min(max_k, n)))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    return np.asarray(labels)
