"""Two-walk Markov chain ranking (UniqueRank, AttriRank, PageRank) and
classical centrality baselines.

All transition operators are column-stochastic: entry ``[j, i]`` is the
probability of stepping from ``i`` to ``j``, so a step is ``pi <- M @ pi``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .graph import AttributedGraph
from .kernel import SimilarityMatrix, neighbor_similarities

CENTRALITY_KINDS = ("degree", "closeness", "eigenvector")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class RankingConfig:
    """Hyperparameters of the two-walk chain.

    ``d`` weights the structural walk against the attribute walk, ``alpha``
    trades attribute uniqueness (0) against plain structure (1).
    """

    d: float = 0.85
    alpha: float = 0.5
    tolerance: float = 1e-10
    max_iterations: int = 1000
    init: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"d must lie in [0, 1], got {self.d}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.init not in ("uniform", "random"):
            raise ValueError(f"init must be 'uniform' or 'random', got {self.init!r}")


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic operator.

    Columns flagged in ``dangling`` are treated as uniform ``1/N`` and their
    entries in ``matrix`` are ignored (kept zero), so a uniform jump costs
    O(N) instead of a dense matrix.
    """

    matrix: sp.csr_matrix | np.ndarray
    dangling: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "TransitionMatrix":
        return cls(sp.csr_matrix((n, n)), np.ones(n, dtype=bool))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.matrix @ x
        if self.dangling.any():
            y = y + x[self.dangling].sum() / self.n_nodes
        return np.asarray(y).ravel()

    def to_dense(self) -> np.ndarray:
        m = self.matrix.toarray() if sp.issparse(self.matrix) else np.array(self.matrix)
        m[:, self.dangling] = 1.0 / self.n_nodes
        return m


@dataclass(frozen=True, eq=False)
class RankVector:
    scores: np.ndarray
    iterations_used: int
    converged: bool

    def order(self) -> np.ndarray:
        return rank_order(self.scores)


def rank_order(scores: np.ndarray) -> np.ndarray:
    """Node ids by descending score, ties broken by smaller id."""
    scores = np.asarray(scores)
    return np.lexsort((np.arange(len(scores)), -scores))


# --------------------------------------------------------------------------
# transition builders


def build_attribute_transition(s: SimilarityMatrix) -> TransitionMatrix:
    """Walk on the complete similarity graph: column ``i`` is ``s[:, i]`` normalized."""
    v = s.values
    q = v / v.sum(axis=0, keepdims=True)
    return TransitionMatrix(q, np.zeros(v.shape[0], dtype=bool))


def destination_weights(g: AttributedGraph, s: SimilarityMatrix | float, alpha: float) -> np.ndarray:
    """Per-node weight ``1 / (alpha + (1 - alpha) * min_n s[n, j])`` of stepping into ``j``.

    The minimum runs over the neighbors of ``j`` (in and out); a node with no
    neighbors gets weight 1.
    """
    w = np.ones(g.n_nodes)
    if alpha == 1.0 or g.nbr_csr.nnz == 0:
        return w
    sims = neighbor_similarities(g, s)
    indptr = g.nbr_csr.indptr
    has = np.diff(indptr) > 0
    mins = np.minimum.reduceat(sims, indptr[:-1][has])
    w[has] = 1.0 / (alpha + (1.0 - alpha) * mins)
    return w


def _weighted_out_transition(g: AttributedGraph, w: np.ndarray) -> TransitionMatrix:
    coo = g.out_csr.tocoo()
    src, dst = coo.row, coo.col
    data = w[dst]
    denom = np.bincount(src, weights=data, minlength=g.n_nodes)
    p = sp.csr_matrix((data / denom[src], (dst, src)), shape=(g.n_nodes, g.n_nodes))
    return TransitionMatrix(p, g.out_degree() == 0)


def build_structural_transition(
    g: AttributedGraph, s: SimilarityMatrix | float, alpha: float
) -> TransitionMatrix:
    """Walk along out-edges, biased toward attribute-unusual destinations.

    ``s`` may be a dense similarity matrix or a bare gamma (edge-only
    evaluation for large graphs). Nodes without out-edges jump uniformly.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return _weighted_out_transition(g, destination_weights(g, s, alpha))


def uniform_structural_transition(g: AttributedGraph) -> TransitionMatrix:
    return _weighted_out_transition(g, np.ones(g.n_nodes))


# --------------------------------------------------------------------------
# iteration


def power_iterate(
    p: TransitionMatrix,
    q: TransitionMatrix,
    config: RankingConfig = RankingConfig(),
    callback=None,
) -> RankVector:
    """Iterate ``pi <- (1 - d) Q pi + d P pi`` to its fixed point.

    Stops when the L1 change drops below ``config.tolerance``; after
    ``max_iterations`` the last iterate is returned with ``converged=False``.
    ``callback(iteration, pi)`` is called on every iterate.
    """
    n = p.n_nodes
    if q.n_nodes != n:
        raise ValueError(f"dimension mismatch: P is {n}x{n}, Q is {q.n_nodes}x{q.n_nodes}")
    d = config.d
    if config.init == "uniform":
        pi = np.full(n, 1.0 / n)
    else:
        pi = np.random.default_rng(config.seed).random(n) + 1e-12
        pi /= pi.sum()
    for it in range(1, config.max_iterations + 1):
        nxt = np.zeros(n)
        if d > 0:
            nxt += d * p.matvec(pi)
        if d < 1:
            nxt += (1.0 - d) * q.matvec(pi)
        nxt /= nxt.sum()
        delta = np.abs(nxt - pi).sum()
        pi = nxt
        if callback is not None:
            callback(it, pi)
        if delta < config.tolerance:
            return RankVector(pi, it, True)
    return RankVector(pi, config.max_iterations, False)


def uniquerank(g: AttributedGraph, s: SimilarityMatrix, config: RankingConfig = RankingConfig()) -> RankVector:
    p = build_structural_transition(g, s, config.alpha)
    q = build_attribute_transition(s)
    return power_iterate(p, q, config)


def attrirank(g: AttributedGraph, s: SimilarityMatrix, config: RankingConfig = RankingConfig()) -> RankVector:
    """The ``alpha = 1`` specialization: plain structural walk plus the attribute walk."""
    return uniquerank(g, s, replace(config, alpha=1.0))


def pagerank(g: AttributedGraph, config: RankingConfig = RankingConfig()) -> RankVector:
    return power_iterate(uniform_structural_transition(g), TransitionMatrix.uniform(g.n_nodes), config)


def structural_rank(g: AttributedGraph, gamma: float, config: RankingConfig = RankingConfig()) -> RankVector:
    """Uniqueness-biased structural walk with a uniform jump in place of the attribute walk.

    Never materializes an N x N matrix, so it scales with the edge count.
    """
    p = build_structural_transition(g, gamma, config.alpha)
    return power_iterate(p, TransitionMatrix.uniform(g.n_nodes), config)


# --------------------------------------------------------------------------
# classical centrality


def _harmonic_closeness(g: AttributedGraph, chunk: int = 256) -> np.ndarray:
    n = g.n_nodes
    out = np.zeros(n)
    if n == 1:
        return out
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n))
        dist = csgraph.shortest_path(
            g.out_csr, method="D", directed=g.directed, unweighted=True, indices=idx
        )
        with np.errstate(divide="ignore"):
            inv = np.where(dist > 0, 1.0 / dist, 0.0)
        out[idx] = inv.sum(axis=1)
    return out / (n - 1)


def _eigenvector(g: AttributedGraph, tol: float, max_iterations: int) -> np.ndarray:
    a = g.nbr_csr.astype(float)
    x = np.full(g.n_nodes, 1.0 / np.sqrt(g.n_nodes))
    for _ in range(max_iterations):
        # the +x shift keeps bipartite graphs from oscillating
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < tol:
            return y
        x = y
    raise ConvergenceError(f"eigenvector centrality did not converge in {max_iterations} iterations")


def centrality(
    g: AttributedGraph, kind: str, tol: float = 1e-10, max_iterations: int = 10_000
) -> np.ndarray:
    """Degree, harmonic closeness, or eigenvector centrality.

    * degree: in-degree + out-degree (plain degree when undirected)
    * closeness: ``sum_j 1/d(i, j) / (N - 1)`` along out-edges, unreachable
      pairs contribute 0
    * eigenvector: principal eigenvector of the symmetrized adjacency,
      L2-normalized
    """
    if kind == "degree":
        deg = g.out_degree()
        return (deg + g.in_degree() if g.directed else deg).astype(float)
    if kind == "closeness":
        return _harmonic_closeness(g)
    if kind == "eigenvector":
        return _eigenvector(g, tol, max_iterations)
    raise ValueError(f"unknown centrality kind {kind!r}; expected one of {CENTRALITY_KINDS}")
