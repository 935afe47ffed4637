"""RBF attribute similarity, bandwidth selection and neighborhood uniqueness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .graph import AttributedGraph

DENSE_NODE_CAP = 50_000

# exp() underflows to 0 for very distant pairs; similarities must stay > 0
# for the attribute walk to remain irreducible.
_FLOOR = np.finfo(float).tiny


class DenseSizeError(MemoryError):
    """Raised when a dense N x N structure is requested above the node cap."""


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    values: np.ndarray
    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        self.values.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]


def _rbf(sq_dist, gamma):
    return np.maximum(np.exp(-gamma * sq_dist), _FLOOR)


def rbf_similarity(x_i, x_j, gamma: float) -> float:
    """``exp(-gamma * ||x_i - x_j||^2)`` for two attribute vectors."""
    x_i = np.asarray(x_i, dtype=float)
    x_j = np.asarray(x_j, dtype=float)
    if x_i.shape != x_j.shape:
        raise ValueError(f"attribute vectors differ in length: {x_i.shape} vs {x_j.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not (np.all(np.isfinite(x_i)) and np.all(np.isfinite(x_j))):
        raise ValueError("attribute vectors must be finite")
    diff = x_i - x_j
    return float(_rbf(np.dot(diff, diff), gamma))


def gamma_median_heuristic(g: AttributedGraph, sample_pairs: int = 10_000, seed: int = 0) -> float:
    """Bandwidth ``1 / median squared distance`` over random distinct node pairs.

    Falls back to 1.0 when the median is zero.
    """
    n = g.n_nodes
    if n < 2:
        raise ValueError("median heuristic needs at least two nodes")
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=sample_pairs)
    j = rng.integers(0, n - 1, size=sample_pairs)
    j = j + (j >= i)
    diff = g.attributes[i] - g.attributes[j]
    med = float(np.median(np.einsum("ij,ij->i", diff, diff)))
    return 1.0 / med if med > 0 else 1.0


def similarity_matrix(
    g: AttributedGraph, gamma: float, max_nodes: int = DENSE_NODE_CAP
) -> SimilarityMatrix:
    """Dense pairwise RBF similarities of all node attribute rows."""
    n = g.n_nodes
    if n > max_nodes:
        raise DenseSizeError(
            f"dense similarity matrix refused for N={n} (cap {max_nodes}); "
            "use the structural-walk ranking for graphs this large"
        )
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if n == 1:
        return SimilarityMatrix(np.ones((1, 1)), float(gamma))
    # pdist/squareform give an exactly symmetric matrix with a zero diagonal
    sq = squareform(pdist(g.attributes, metric="sqeuclidean"))
    return SimilarityMatrix(_rbf(sq, gamma), float(gamma))


def neighbor_similarities(g: AttributedGraph, s: SimilarityMatrix | float) -> np.ndarray:
    """Similarity for each stored entry of ``g.nbr_csr`` (row-major order).

    ``s`` is either a dense :class:`SimilarityMatrix` or a bare gamma, in
    which case only the edge pairs are evaluated.
    """
    coo = g.nbr_csr.tocoo()
    if isinstance(s, SimilarityMatrix):
        return s.values[coo.row, coo.col]
    diff = g.attributes[coo.row] - g.attributes[coo.col]
    return _rbf(np.einsum("ij,ij->i", diff, diff), float(s))


def uniqueness_scores(g: AttributedGraph, s: SimilarityMatrix | float) -> np.ndarray:
    """Reciprocal of each node's mean similarity to its neighbors.

    Neighbors are the union of in- and out-neighbors; isolated nodes get 1.
    """
    sims = neighbor_similarities(g, s)
    deg = np.diff(g.nbr_csr.indptr)
    rows = np.repeat(np.arange(g.n_nodes), deg)
    totals = np.bincount(rows, weights=sims, minlength=g.n_nodes)
    u = np.ones(g.n_nodes)
    has = deg > 0
    u[has] = deg[has] / totals[has]
    return u
