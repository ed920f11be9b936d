import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tne.fusion import STRATEGIES, fuse, fuse_max, fuse_min, fuse_wmean

shapes = st.tuples(st.integers(1, 6), st.integers(1, 10), st.integers(1, 8), st.integers(0, 2**32 - 1))


def _inputs(K, V, d, seed):
    rng = np.random.default_rng(seed)
    node = rng.normal(size=(V, d))
    topic = rng.normal(size=(K, d))
    phi = rng.dirichlet(np.ones(V), size=K)
    return node, topic, phi


@settings(max_examples=100, deadline=None)
@given(shapes)
def test_node_half_is_bitwise_copy(case):
    K, V, d, seed = case
    node, topic, phi = _inputs(K, V, d, seed)
    for s in STRATEGIES:
        omega = fuse(s, node, topic, phi).omega
        assert omega.shape == (V, 2 * d)
        assert np.array_equal(omega[:, :d], node)


@settings(max_examples=100, deadline=None)
@given(shapes, st.integers(-20, 20), st.floats(0.01, 100.0))
def test_max_min_invariant_to_positive_scaling(case, e, c):
    K, V, d, seed = case
    node, topic, phi = _inputs(K, V, d, seed)
    for fn in (fuse_max, fuse_min):
        base = fn(node, topic, phi).omega
        assert np.array_equal(fn(node, topic, phi * 2.0 ** e).omega, base)
        assert np.array_equal(fn(node, topic, phi * c).omega, base)


@settings(max_examples=100, deadline=None)
@given(shapes)
def test_wmean_linear_in_topic_vectors(case):
    K, V, d, seed = case
    rng = np.random.default_rng(seed)
    # dyadic values keep every product and sum exact in float64
    node = rng.integers(-8, 8, size=(V, d)).astype(float)
    t1 = rng.integers(-8, 8, size=(K, d)).astype(float)
    t2 = rng.integers(-8, 8, size=(K, d)).astype(float)
    counts = rng.integers(0, 5, size=(K, V)).astype(float)
    # pad each column to a power-of-two total so the weights are dyadic too
    col = counts.sum(axis=0)
    scale = 2.0 ** np.ceil(np.log2(np.maximum(col, 1.0)))
    counts[-1] += scale - col
    phi = counts / scale
    a, b = 2.0, -0.5
    lhs = fuse_wmean(node, a * t1 + b * t2, phi).omega[:, d:]
    rhs = a * fuse_wmean(node, t1, phi).omega[:, d:] + b * fuse_wmean(node, t2, phi).omega[:, d:]
    assert np.array_equal(lhs, rhs)


def test_max_example():
    node = np.array([[1.0, 2.0], [3.0, 4.0]])
    topic = np.array([[10.0, 10.0], [20.0, 20.0]])
    phi = np.array([[0.9, 0.2], [0.1, 0.8]])
    np.testing.assert_array_equal(fuse_max(node, topic, phi).omega,
                                  [[1, 2, 10, 10], [3, 4, 20, 20]])
    np.testing.assert_array_equal(fuse_min(node, topic, phi).omega,
                                  [[1, 2, 20, 20], [3, 4, 10, 10]])
    np.testing.assert_allclose(fuse_wmean(node, topic, phi).omega,
                               [[1, 2, 11, 11], [3, 4, 18, 18]])


def test_ties_go_to_lowest_topic():
    node = np.zeros((1, 1))
    topic = np.array([[1.0], [2.0], [3.0]])
    phi = np.array([[0.5], [0.5], [0.5]])
    assert fuse_max(node, topic, phi).omega[0, 1] == 1.0
    assert fuse_min(node, topic, phi).omega[0, 1] == 1.0


def test_wmean_renormalizes_columns():
    rng = np.random.default_rng(0)
    node, topic = rng.normal(size=(4, 3)), rng.normal(size=(2, 3))
    phi = rng.dirichlet(np.ones(2), size=4).T
    np.testing.assert_allclose(fuse_wmean(node, topic, phi * 3.0).omega,
                               fuse_wmean(node, topic, phi).omega, rtol=1e-12)


def test_shape_checks():
    node, topic, phi = _inputs(3, 5, 4, 0)
    with pytest.raises(ValueError, match="dimension"):
        fuse_max(node, topic[:, :2], phi)
    with pytest.raises(ValueError, match="posterior"):
        fuse_max(node, topic, phi[:, :4])
    with pytest.raises(ValueError):
        fuse("sum", node, topic, phi)
