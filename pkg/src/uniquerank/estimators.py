"""scikit-learn style front end.

Each ranker takes a graph (or attribute matrix + adjacency) in ``fit`` and
exposes the results as trailing-underscore attributes, so the usual
``get_params`` / ``set_params`` / ``clone`` machinery works.

>>> ur = UniqueRank(top_k=5).fit(graph)            # doctest: +SKIP
>>> ur.selected_, ur.scores_[ur.selected_]         # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_fraction, check_graph, check_positive_int
from .graph import NORMALIZATION_MODES, AttributedGraph, normalize_attributes
from .kernel import gamma_median_heuristic, similarity_matrix, uniqueness_scores
from .ranking import (
    CENTRALITY_KINDS,
    RankingConfig,
    attrirank,
    centrality,
    pagerank,
    rank_order,
    structural_rank,
    uniquerank,
)
from .refinement import ScorePlane, refine_top_k


def resolve_gamma(g: AttributedGraph, gamma, n_pairs: int = 10_000, seed: int = 0) -> float:
    if gamma is None or gamma == "median":
        return gamma_median_heuristic(g, n_pairs, seed) if g.n_nodes > 1 else 1.0
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return float(gamma)


class _Ranker(BaseEstimator):
    def _select(self, scores: np.ndarray) -> None:
        self.scores_ = scores
        self.ranking_ = rank_order(scores)
        k = min(self.top_k, scores.size)
        self.selected_ = self.ranking_[:k].copy()

    def top(self, k: int) -> np.ndarray:
        check_is_fitted(self, "ranking_")
        return self.ranking_[:k].copy()


class UniqueRank(_Ranker):
    """Rank nodes by structural importance and attribute uniqueness.

    Parameters
    ----------
    d : float
        Probability of a structural step versus an attribute-similarity step.
    alpha : float
        1 gives plain structural weights; smaller values favor neighbors
        whose attributes stand out from their own neighborhoods.
    gamma : float or None
        RBF bandwidth; None picks it by the median heuristic.
    normalize : {"min_max", "z_score", "none"}
    top_k, seed_k : int
        Size of the final set and of the chain's candidate set fed to the
        refinement step (``seed_k`` defaults to ``top_k``).
    refine : bool
        Skip the refinement step when False; ``selected_`` is then the
        chain's top-k.
    attribute_walk : {"rbf", "uniform"}
        "uniform" replaces the dense attribute walk by a uniform jump, which
        keeps memory linear in the edge count for very large graphs.
    """

    def __init__(
        self,
        d=0.85,
        alpha=0.5,
        gamma=None,
        normalize="min_max",
        top_k=10,
        seed_k=None,
        refine=True,
        tol=1e-10,
        max_iter=1000,
        gamma_pairs=10_000,
        random_state=0,
        attribute_walk="rbf",
    ):
        self.d = d
        self.alpha = alpha
        self.gamma = gamma
        self.normalize = normalize
        self.top_k = top_k
        self.seed_k = seed_k
        self.refine = refine
        self.tol = tol
        self.max_iter = max_iter
        self.gamma_pairs = gamma_pairs
        self.random_state = random_state
        self.attribute_walk = attribute_walk

    def _config(self, alpha=None) -> RankingConfig:
        return RankingConfig(
            d=check_fraction(self.d, "d"),
            alpha=check_fraction(self.alpha if alpha is None else alpha, "alpha"),
            tolerance=self.tol,
            max_iterations=check_positive_int(self.max_iter, "max_iter"),
        )

    def fit(self, X, y=None, adjacency=None, directed=None):
        if self.normalize not in NORMALIZATION_MODES:
            raise ValueError(f"normalize must be one of {NORMALIZATION_MODES}")
        if self.attribute_walk not in ("rbf", "uniform"):
            raise ValueError("attribute_walk must be 'rbf' or 'uniform'")
        top_k = check_positive_int(self.top_k, "top_k")
        seed_k = top_k if self.seed_k is None else check_positive_int(self.seed_k, "seed_k")
        if seed_k < top_k:
            raise ValueError("seed_k must be >= top_k")

        g = normalize_attributes(check_graph(X, adjacency, directed), self.normalize)
        self.graph_ = g
        self.gamma_ = resolve_gamma(g, self.gamma, self.gamma_pairs, self.random_state)
        config = self._config()
        if self.attribute_walk == "rbf":
            s = similarity_matrix(g, self.gamma_)
            self.similarity_ = s
            chain = uniquerank(g, s, config)
            importance = attrirank(g, s, config).scores
            self.uniqueness_ = uniqueness_scores(g, s)
        else:
            chain = structural_rank(g, self.gamma_, config)
            importance = structural_rank(g, self.gamma_, self._config(alpha=1.0)).scores
            self.uniqueness_ = uniqueness_scores(g, self.gamma_)
        self.importance_ = importance
        self.n_iter_ = chain.iterations_used
        self.converged_ = chain.converged

        self._select(chain.scores)
        k = min(top_k, g.n_nodes)
        if self.refine:
            seeds = self.ranking_[: min(seed_k, g.n_nodes)]
            plane = ScorePlane(importance, self.uniqueness_, seeds)
            self.selected_ = np.asarray(refine_top_k(plane, k), dtype=np.int64)
        return self


class AttriRank(UniqueRank):
    """UniqueRank with ``alpha`` pinned to 1 and no refinement."""

    def __init__(
        self,
        d=0.85,
        gamma=None,
        normalize="min_max",
        top_k=10,
        tol=1e-10,
        max_iter=1000,
        gamma_pairs=10_000,
        random_state=0,
    ):
        super().__init__(
            d=d, alpha=1.0, gamma=gamma, normalize=normalize, top_k=top_k, refine=False,
            tol=tol, max_iter=max_iter, gamma_pairs=gamma_pairs, random_state=random_state,
        )


class PageRank(_Ranker):
    def __init__(self, d=0.85, top_k=10, tol=1e-10, max_iter=1000):
        self.d = d
        self.top_k = top_k
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, adjacency=None, directed=None):
        g = check_graph(X, adjacency, directed)
        config = RankingConfig(
            d=check_fraction(self.d, "d"), tolerance=self.tol,
            max_iterations=check_positive_int(self.max_iter, "max_iter"),
        )
        res = pagerank(g, config)
        self.n_iter_ = res.iterations_used
        self.converged_ = res.converged
        self._select(res.scores)
        return self


class CentralityRanker(_Ranker):
    def __init__(self, kind="degree", top_k=10):
        self.kind = kind
        self.top_k = top_k

    def fit(self, X, y=None, adjacency=None, directed=None):
        if self.kind not in CENTRALITY_KINDS:
            raise ValueError(f"kind must be one of {CENTRALITY_KINDS}")
        self._select(centrality(check_graph(X, adjacency, directed), self.kind))
        return self
