import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from uniquerank.estimators import AttriRank, CentralityRanker, PageRank, UniqueRank
from uniquerank.evaluation import MethodScores
from uniquerank.graph import normalize_attributes
from uniquerank.kernel import gamma_median_heuristic, similarity_matrix
from uniquerank.ranking import RankingConfig, attrirank, centrality, pagerank, rank_order, uniquerank
from uniquerank.refinement import ScorePlane, refine_top_k

from conftest import random_graph


@pytest.fixture
def graph(rng):
    return random_graph(rng, 50, p=0.1)


def test_uniquerank_matches_functional_api(graph):
    est = UniqueRank(top_k=5, seed_k=8).fit(graph)
    g = normalize_attributes(graph, "min_max")
    gamma = gamma_median_heuristic(g)
    s = similarity_matrix(g, gamma)
    assert est.gamma_ == gamma
    np.testing.assert_array_equal(est.scores_, uniquerank(g, s, RankingConfig()).scores)
    seeds = rank_order(est.scores_)[:8]
    plane = ScorePlane(attrirank(g, s).scores, est.uniqueness_, seeds)
    assert est.selected_.tolist() == refine_top_k(plane, 5)
    assert est.converged_


def test_refine_off_gives_chain_top(graph):
    est = UniqueRank(top_k=4, refine=False, gamma=2.0).fit(graph)
    assert est.selected_.tolist() == est.ranking_[:4].tolist()


def test_attrirank_alpha_one(graph):
    a = AttriRank(gamma=2.0).fit(graph)
    b = UniqueRank(alpha=1.0, gamma=2.0, refine=False).fit(graph)
    np.testing.assert_array_equal(a.scores_, b.scores_)
    assert a.get_params()["gamma"] == 2.0 and "alpha" not in a.get_params()


def test_pagerank_and_centrality(graph):
    np.testing.assert_array_equal(PageRank().fit(graph).scores_, pagerank(graph).scores)
    est = CentralityRanker("closeness", top_k=3).fit(graph)
    np.testing.assert_array_equal(est.scores_, centrality(graph, "closeness"))
    assert est.top(3).tolist() == est.selected_.tolist()


def test_get_params_and_clone(graph):
    est = UniqueRank(alpha=0.3, top_k=7)
    params = est.get_params()
    assert params["alpha"] == 0.3 and params["top_k"] == 7
    c = clone(est)
    assert c.get_params() == params
    c.set_params(d=0.5)
    assert c.d == 0.5 and est.d == 0.85
    for cls in (AttriRank, PageRank, CentralityRanker):
        assert clone(cls()).get_params() == cls().get_params()


def test_adjacency_input(graph):
    dense = np.zeros((graph.n_nodes, graph.n_nodes))
    for i, j in graph.edge_array():
        dense[i, j] = dense[j, i] = 1
    a = UniqueRank(gamma=1.5).fit(graph.attributes, adjacency=dense)
    b = UniqueRank(gamma=1.5).fit(graph)
    np.testing.assert_array_equal(a.scores_, b.scores_)


def test_directed_detected_from_asymmetry():
    x = np.random.default_rng(0).random((4, 2))
    adj = np.zeros((4, 4))
    adj[0, 1] = adj[1, 2] = adj[2, 3] = 1
    est = UniqueRank(gamma=1.0, top_k=2).fit(x, adjacency=adj)
    assert est.graph_.directed


def test_uniform_attribute_walk(graph):
    est = UniqueRank(attribute_walk="uniform", gamma=2.0, top_k=5).fit(graph)
    assert est.scores_.sum() == pytest.approx(1.0, abs=1e-12)
    assert not hasattr(est, "similarity_")
    assert len(est.selected_) == 5


@pytest.mark.parametrize(
    "kwargs",
    [
        {"d": 1.5},
        {"alpha": -0.1},
        {"top_k": 0},
        {"top_k": 5, "seed_k": 2},
        {"normalize": "rank"},
        {"attribute_walk": "bogus"},
        {"gamma": -1.0},
    ],
)
def test_invalid_params(graph, kwargs):
    with pytest.raises(ValueError):
        UniqueRank(**kwargs).fit(graph)


def test_input_errors(graph):
    with pytest.raises(ValueError):
        UniqueRank().fit(graph.attributes)
    with pytest.raises(ValueError):
        UniqueRank().fit(graph.attributes, adjacency=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        CentralityRanker("bogus").fit(graph)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        UniqueRank().top(3)


def test_matches_evaluation_selection(graph):
    g = normalize_attributes(graph, "min_max")
    s = similarity_matrix(g, 2.0)
    est = UniqueRank(gamma=2.0, normalize="none", top_k=5).fit(g)
    assert est.selected_.tolist() == MethodScores(g, s).select("uniquerank", 5)
