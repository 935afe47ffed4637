import itertools

import numpy as np
import pytest

from uniquerank.graph import AttributedGraph
from uniquerank.kernel import SimilarityMatrix, similarity_matrix
from uniquerank.ranking import (
    ConvergenceError,
    RankingConfig,
    TransitionMatrix,
    attrirank,
    build_attribute_transition,
    build_structural_transition,
    centrality,
    pagerank,
    power_iterate,
    structural_rank,
    uniform_structural_transition,
    uniquerank,
)
from uniquerank.synth import PerturbationSpec, apply_perturbation, make_symmetric_graph

from conftest import loop_attribute, loop_structural, random_graph, stationary_solve


# ---------------------------------------------------------------- config


@pytest.mark.parametrize(
    "kwargs", [dict(d=1.5), dict(alpha=-0.1), dict(tolerance=0), dict(max_iterations=0), dict(init="zeros")]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        RankingConfig(**kwargs)


# ---------------------------------------------------------------- transitions


def test_attribute_transition_uniform():
    g = AttributedGraph.from_edges(4, [], np.zeros((4, 2)))
    q = build_attribute_transition(similarity_matrix(g, 1.0)).to_dense()
    np.testing.assert_allclose(q, 0.25)


def test_attribute_transition_two_nodes():
    s = SimilarityMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]), 1.0)
    q = build_attribute_transition(s).to_dense()
    np.testing.assert_allclose(q[:, 0], [1 / 1.5, 0.5 / 1.5])


def test_attribute_transition_three_nodes_hand():
    g = AttributedGraph.from_edges(3, [], np.array([[0.0], [1.0], [3.0]]))
    q = build_attribute_transition(similarity_matrix(g, 1.0)).to_dense()
    e = np.exp
    col0 = np.array([1, e(-1), e(-9)]) / (1 + e(-1) + e(-9))
    col2 = np.array([e(-9), e(-4), 1]) / (e(-9) + e(-4) + 1)
    np.testing.assert_allclose(q[:, 0], col0, rtol=1e-14)
    np.testing.assert_allclose(q[:, 2], col2, rtol=1e-14)


def test_structural_alpha_one_is_uniform(rng):
    g = random_graph(rng, 20, directed=True)
    p = build_structural_transition(g, similarity_matrix(g, 2.0), 1.0).to_dense()
    for i in range(20):
        out = g.out_neighbors(i)
        if out.size:
            np.testing.assert_allclose(p[out, i], 1 / out.size)


def test_structural_weight_arithmetic():
    # node 0 -> {1, 2}; min neighbor sims of 1 and 2 are 0.5 and 0.25 (set via a custom matrix)
    g = AttributedGraph.from_edges(3, [(0, 1), (0, 2)])
    v = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.9], [0.25, 0.9, 1.0]])
    p = build_structural_transition(g, SimilarityMatrix(v, 1.0), 0.0).to_dense()
    np.testing.assert_allclose(p[[1, 2], 0], [1 / 3, 2 / 3])


def test_structural_dangling_column():
    g = AttributedGraph.from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)], np.arange(4.0)[:, None], directed=True)
    p = build_structural_transition(g, similarity_matrix(g, 1.0), 0.5).to_dense()
    np.testing.assert_allclose(p[:, 3], 0.25)


@pytest.mark.parametrize("directed", [False, True])
def test_structural_matches_loop_oracle(rng, directed):
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(2, 30)), directed=directed)
        s = similarity_matrix(g, float(rng.uniform(0.5, 5)))
        a = float(rng.uniform())
        got = build_structural_transition(g, s, a).to_dense()
        np.testing.assert_allclose(got, loop_structural(g, s.values, a), rtol=1e-13, atol=1e-15)


def test_column_stochastic_random(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 25))
        g = random_graph(rng, n, directed=bool(rng.integers(2)))
        s = similarity_matrix(g, float(rng.uniform(0.1, 10)))
        for t in (build_structural_transition(g, s, float(rng.uniform())), build_attribute_transition(s)):
            m = t.to_dense()
            assert np.all(m >= 0)
            assert np.abs(m.sum(axis=0) - 1).max() < 1e-12


# ---------------------------------------------------------------- iteration


def test_power_iterate_d0_uniform_attributes():
    g = AttributedGraph.from_edges(5, [(0, 1), (1, 2)], np.zeros((5, 1)))
    s = similarity_matrix(g, 1.0)
    r = uniquerank(g, s, RankingConfig(d=0.0))
    np.testing.assert_allclose(r.scores, 0.2, atol=1e-15)


def test_power_iterate_fixed_point(rng):
    g = random_graph(rng, 30)
    s = similarity_matrix(g, 2.0)
    cfg = RankingConfig()
    p, q = build_structural_transition(g, s, cfg.alpha), build_attribute_transition(s)
    r = power_iterate(p, q, cfg)
    assert r.converged
    resid = (1 - cfg.d) * q.matvec(r.scores) + cfg.d * p.matvec(r.scores) - r.scores
    assert np.abs(resid).sum() < cfg.tolerance


def test_power_iterate_dimension_mismatch():
    with pytest.raises(ValueError):
        power_iterate(TransitionMatrix.uniform(3), TransitionMatrix.uniform(4))


def test_nonconvergence_reported():
    g = make_symmetric_graph("cycle", 7)
    g = g.with_attributes(np.arange(7.0)[:, None])
    r = uniquerank(g, similarity_matrix(g, 1.0), RankingConfig(max_iterations=2))
    assert not r.converged and r.iterations_used == 2
    assert abs(r.scores.sum() - 1) < 1e-12


@pytest.mark.parametrize("directed", [False, True])
def test_matches_dense_solve(rng, directed):
    for _ in range(20):
        n = int(rng.integers(2, 51))
        g = random_graph(rng, n, directed=directed)
        s = similarity_matrix(g, float(rng.uniform(0.5, 5)))
        cfg = RankingConfig(alpha=float(rng.uniform()))
        r = uniquerank(g, s, cfg)
        oracle = stationary_solve((1 - cfg.d) * loop_attribute(s.values) + cfg.d * loop_structural(g, s.values, cfg.alpha))
        assert np.abs(r.scores - oracle).max() < 1e-8


def test_attrirank_matches_dense_solve(rng):
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(2, 51)))
        s = similarity_matrix(g, 1.5)
        r = attrirank(g, s)
        oracle = stationary_solve(0.15 * loop_attribute(s.values) + 0.85 * loop_structural(g, s.values, 1.0))
        assert np.abs(r.scores - oracle).max() < 1e-8
        assert abs(r.scores.sum() - 1) < 1e-12


def test_random_inits_agree(rng):
    g = random_graph(rng, 60, directed=True)
    s = similarity_matrix(g, 2.0)
    ref = uniquerank(g, s).scores
    for seed in range(20):
        r = uniquerank(g, s, RankingConfig(init="random", seed=seed))
        assert r.converged
        assert np.abs(r.scores - ref).max() < 1e-8


# ---------------------------------------------------------------- uniquerank / attrirank / pagerank


def test_perturbed_cycle_argmax_d1():
    g = make_symmetric_graph("cycle", 12, n_attributes=2)
    spec = PerturbationSpec((0.0, 0.0), frozenset({4}), (0.8, 0.6))
    g = apply_perturbation(g, spec)
    r = uniquerank(g, similarity_matrix(g, 1.0), RankingConfig(d=1.0))
    assert int(np.argmax(r.scores)) == 4


def test_alpha_one_equals_attrirank(rng):
    g = random_graph(rng, 40)
    s = similarity_matrix(g, 1.0)
    a = uniquerank(g, s, RankingConfig(alpha=1.0)).scores
    b = attrirank(g, s).scores
    assert np.abs(a - b).max() < 1e-9


def test_permutation_equivariance(rng):
    g = random_graph(rng, 30, directed=True)
    perm = rng.permutation(30)
    h = g.permuted(perm)
    a = uniquerank(g, similarity_matrix(g, 2.0)).scores
    b = uniquerank(h, similarity_matrix(h, 2.0)).scores
    np.testing.assert_allclose(b[perm], a, rtol=1e-9)


def test_attrirank_uniform_on_regular_identical():
    g = make_symmetric_graph("hypercube", 3)
    r = attrirank(g, similarity_matrix(g, 1.0))
    np.testing.assert_allclose(r.scores, 1 / 8, atol=1e-14)


def test_pagerank_cycle_uniform():
    g = make_symmetric_graph("cycle", 9)
    np.testing.assert_allclose(pagerank(g).scores, 1 / 9, atol=1e-14)


def test_pagerank_d0_uniform(rng):
    g = random_graph(rng, 15, directed=True)
    np.testing.assert_allclose(pagerank(g, RankingConfig(d=0.0)).scores, 1 / 15)


def test_pagerank_directed_dense_oracle():
    g = AttributedGraph.from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 1), (0, 3)], directed=True)
    # hand-built link matrix, node 3 dangling
    m = np.array(
        [
            [0, 0, 0.5, 0.25],
            [0.5, 0, 0.5, 0.25],
            [0, 1, 0, 0.25],
            [0.5, 0, 0, 0.25],
        ]
    )
    oracle = stationary_solve(0.15 * np.full((4, 4), 0.25) + 0.85 * m)
    assert np.abs(pagerank(g).scores - oracle).max() < 1e-10


def test_pagerank_equals_uniform_q_alpha_one(rng):
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(2, 40)), directed=bool(rng.integers(2)))
        s = similarity_matrix(g, 1.0)
        cfg = RankingConfig(alpha=1.0)
        via_chain = power_iterate(build_structural_transition(g, s, 1.0), TransitionMatrix.uniform(g.n_nodes), cfg)
        assert np.abs(via_chain.scores - pagerank(g).scores).max() < 1e-9


def test_structural_rank_matches_dense_uniform_q(rng):
    g = random_graph(rng, 50, directed=True)
    s = similarity_matrix(g, 2.0)
    cfg = RankingConfig(alpha=0.3)
    dense = power_iterate(build_structural_transition(g, s, 0.3), TransitionMatrix.uniform(50), cfg)
    np.testing.assert_allclose(structural_rank(g, 2.0, cfg).scores, dense.scores, atol=1e-12)


def test_uniform_structural_transition_is_alpha_one(rng):
    g = random_graph(rng, 20)
    np.testing.assert_allclose(
        uniform_structural_transition(g).to_dense(),
        build_structural_transition(g, similarity_matrix(g, 1.0), 1.0).to_dense(),
    )


# ---------------------------------------------------------------- centrality


def test_degree_star():
    g = AttributedGraph.from_edges(6, [(0, i) for i in range(1, 6)])
    np.testing.assert_array_equal(centrality(g, "degree"), [5, 1, 1, 1, 1, 1])


def test_degree_directed_counts_in_and_out():
    g = AttributedGraph.from_edges(3, [(0, 1), (1, 0), (2, 0)], directed=True)
    np.testing.assert_array_equal(centrality(g, "degree"), [3, 2, 1])


def test_harmonic_closeness_path():
    g = AttributedGraph.from_edges(3, [(0, 1), (1, 2)])
    np.testing.assert_allclose(centrality(g, "closeness"), [0.75, 1.0, 0.75])


def test_eigenvector_complete():
    g = make_symmetric_graph("complete", 6)
    c = centrality(g, "eigenvector")
    np.testing.assert_allclose(c, c[0])
    assert abs(np.linalg.norm(c) - 1) < 1e-12


def test_eigenvector_matches_numpy(rng):
    g = random_graph(rng, 30, p=0.3)
    a = g.nbr_csr.toarray().astype(float)
    vals, vecs = np.linalg.eigh(a)
    v = np.abs(vecs[:, -1])
    np.testing.assert_allclose(centrality(g, "eigenvector"), v, atol=1e-7)


def test_eigenvector_bipartite_converges():
    c = centrality(make_symmetric_graph("hypercube", 4), "eigenvector")
    np.testing.assert_allclose(c, 0.25)


def test_eigenvector_nonconvergence():
    g = AttributedGraph.from_edges(6, list(itertools.combinations(range(5), 2)) + [(4, 5)])
    with pytest.raises(ConvergenceError):
        centrality(g, "eigenvector", max_iterations=2)


def test_unknown_centrality():
    with pytest.raises(ValueError):
        centrality(make_symmetric_graph("cycle", 3), "betweenness")
