import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tne.embedding import (
    generate_node_context_pairs,
    noise_table,
    read_embedding,
    sgns_pair_grad,
    sgns_pair_loss,
    sgns_step,
    sgns_train,
    train_node_embedding,
    train_tne,
    train_topic_embedding,
    update_node_context_pairs,
    write_embedding,
)
from tne.topics import TopicAssignment, lda_fit
from tne.walks import WalkCorpus, generate_walks


def _brute_pairs(walks, window):
    out = []
    for w in walks:
        for i in range(len(w)):
            for j in range(max(0, i - window), min(len(w), i + window + 1)):
                if j != i:
                    out.append((w[i], w[j]))
    return out


corpora = st.lists(st.lists(st.integers(0, 7), min_size=1, max_size=9), min_size=1, max_size=6)


@settings(max_examples=200, deadline=None)
@given(corpora, st.integers(1, 5))
def test_pairs_match_brute_force(walks, window):
    corpus = WalkCorpus.from_walks(walks, 8)
    stream = generate_node_context_pairs(corpus, window)
    brute = _brute_pairs(walks, window)
    assert len(stream) == len(brute)
    assert stream.pairs().tolist() == [list(p) for p in brute]
    counts = np.bincount([c for _, c in brute], minlength=8) if brute else np.zeros(8)
    np.testing.assert_array_equal(stream.output_counts(), counts)


def test_small_walk_pairs_exclude_self():
    corpus = WalkCorpus.from_walks([[0, 1, 2]], 3)
    assert generate_node_context_pairs(corpus, 1).pairs().tolist() == [[0, 1], [1, 0], [1, 2], [2, 1]]
    assert len(generate_node_context_pairs(corpus, 10)) == 6


def test_topic_substitution_replaces_centers_only():
    corpus = WalkCorpus.from_walks([[0, 1, 2], [2, 0]], 3)
    z = np.array([1, 0, 1, 0, 0], dtype=np.int32)
    assignment = TopicAssignment(2, "lda", z, corpus.offsets)
    nodes = generate_node_context_pairs(corpus, 2)
    topics = update_node_context_pairs(nodes, assignment)
    assert len(topics) == len(nodes)
    np.testing.assert_array_equal(topics.pairs()[:, 1], nodes.pairs()[:, 1])
    np.testing.assert_array_equal(topics.pairs()[:, 0], z[nodes.centers()])
    assert topics.input_vocab == 2


def test_topic_substitution_names_missing_occurrence():
    corpus = WalkCorpus.from_walks([[0, 1, 2], [2, 0]], 3)
    short = TopicAssignment(2, "lda", np.array([1, 0, 1, 0], dtype=np.int32), np.array([0, 3, 4]))
    with pytest.raises(ValueError, match=r"walk 1, position 1"):
        update_node_context_pairs(generate_node_context_pairs(corpus, 2), short)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(100):
        d = int(rng.integers(1, 9))
        k = int(rng.integers(1, 6))
        x, yp, yn = rng.normal(size=d), rng.normal(size=d), rng.normal(size=(k, d))
        g_in, g_pos, g_neg = sgns_pair_grad(x, yp, yn)
        for vec, grad in ((x, g_in), (yp, g_pos), (yn.reshape(-1), g_neg.reshape(-1))):
            for i in range(vec.shape[0]):
                old = vec[i]
                vec[i] = old + h
                up = sgns_pair_loss(x, yp, yn)
                vec[i] = old - h
                down = sgns_pair_loss(x, yp, yn)
                vec[i] = old
                fd = (up - down) / (2 * h)
                assert abs(fd - grad[i]) <= 1e-6 * max(1.0, abs(fd))


def test_step_is_gradient_descent_for_distinct_ids():
    rng = np.random.default_rng(1)
    W_in = rng.normal(size=(4, 5))
    W_out = rng.normal(size=(6, 5))
    x, y, negs = 2, 1, np.array([0, 3, 5])
    lr = 0.05
    loss0 = sgns_pair_loss(W_in[x], W_out[y], W_out[negs])
    g_in, g_pos, g_neg = sgns_pair_grad(W_in[x], W_out[y], W_out[negs])
    want_in, want_out = W_in.copy(), W_out.copy()
    want_in[x] -= lr * g_in
    want_out[y] -= lr * g_pos
    want_out[negs] -= lr * g_neg
    loss = sgns_step(W_in, W_out, x, y, negs, lr, np.empty(5))
    assert loss == pytest.approx(loss0, rel=1e-12)
    np.testing.assert_allclose(W_in, want_in, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(W_out, want_out, rtol=1e-12, atol=1e-15)


def test_step_skips_negative_equal_to_positive():
    rng = np.random.default_rng(2)
    W_in, W_out = rng.normal(size=(2, 3)), rng.normal(size=(3, 3))
    a_in, a_out = W_in.copy(), W_out.copy()
    sgns_step(W_in, W_out, 0, 1, np.array([1, 1]), 0.1, np.empty(3))
    sgns_step(a_in, a_out, 0, 1, np.zeros(0, dtype=np.int64), 0.1, np.empty(3))
    np.testing.assert_array_equal(W_in, a_in)
    np.testing.assert_array_equal(W_out, a_out)


def test_noise_table_encodes_powered_counts():
    counts = np.array([1.0, 8.0, 0.0, 27.0])
    prob, alias = noise_table(counts, 0.75)
    implied = prob.copy()
    np.add.at(implied, alias, 1.0 - prob)
    want = counts ** 0.75 / (counts ** 0.75).sum()
    np.testing.assert_allclose(implied / 4, want, atol=1e-12)


@pytest.fixture(scope="module")
def karate_corpus(karate):
    g, _ = karate
    return g, generate_walks(g, 10, 10, seed=0)


def test_training_is_deterministic_and_learns(karate_corpus):
    g, corpus = karate_corpus
    pairs = generate_node_context_pairs(corpus, 5)
    a = sgns_train(pairs, d=16, seed=3, epochs=4)
    b = sgns_train(pairs, d=16, seed=3, epochs=4)
    assert np.array_equal(a.input_matrix, b.input_matrix)
    assert a.trained_pairs == 4 * len(pairs)
    assert a.epoch_loss[-1] < a.epoch_loss[0]
    # observed pairs score higher than shuffled ones
    p = pairs.pairs()
    s_true = np.einsum("ij,ij->i", a.input_matrix[p[:, 0]], a.context_matrix[p[:, 1]])
    shuffled = np.random.default_rng(0).permutation(p[:, 1])
    s_rand = np.einsum("ij,ij->i", a.input_matrix[p[:, 0]], a.context_matrix[shuffled])
    assert s_true.mean() > s_rand.mean() + 0.5


def test_initialization_range(karate_corpus):
    _, corpus = karate_corpus
    pairs = generate_node_context_pairs(corpus, 1)
    # lr0 tiny: matrices stay essentially at their initial values
    emb = sgns_train(pairs, d=8, lr0=1e-12, seed=0)
    assert np.abs(emb.input_matrix).max() <= 0.5 / 8
    assert np.abs(emb.context_matrix).max() < 1e-9


def test_tne_shapes_and_separable_trainers(karate_corpus):
    g, corpus = karate_corpus
    assignment, _ = lda_fit(corpus, 3, iterations=10, burn_in=2, seed=0)
    node, topic = train_tne(corpus, assignment, gamma=3, d=8, seed=5, node_tokens=g.tokens)
    assert node.input_matrix.shape == (34, 8) and topic.input_matrix.shape == (3, 8)
    assert topic.tokens == ("topic_0", "topic_1", "topic_2")
    alone = train_topic_embedding(corpus, assignment, gamma=3, d=8, seed=5)
    assert np.array_equal(alone.input_matrix, topic.input_matrix)
    node2 = train_node_embedding(corpus, gamma=3, d=8, seed=5)
    assert np.array_equal(node2.input_matrix, node.input_matrix)


def test_parallel_training_runs(karate_corpus):
    _, corpus = karate_corpus
    emb = sgns_train(generate_node_context_pairs(corpus, 3), d=8, seed=0, threads=2)
    assert np.isfinite(emb.input_matrix).all()


def test_embedding_file_round_trip_is_exact():
    rng = np.random.default_rng(4)
    m = rng.normal(size=(3, 4)) * 1e-3
    buf = io.StringIO()
    write_embedding(m, ["a", "b", "c"], buf)
    assert buf.getvalue().splitlines()[0] == "3 4"
    tokens, back = read_embedding(io.StringIO(buf.getvalue()))
    assert tokens == ["a", "b", "c"]
    assert np.array_equal(back, m)
    with pytest.raises(ValueError):
        write_embedding(m, ["a"], io.StringIO())
