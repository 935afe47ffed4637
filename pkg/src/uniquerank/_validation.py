from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils.validation import check_array

from .graph import AttributedGraph


def check_graph(X, adjacency=None, directed: bool | None = None) -> AttributedGraph:
    """Coerce estimator input to an :class:`AttributedGraph`.

    ``X`` is either a graph already, or an ``(N, K)`` attribute matrix paired
    with an ``(N, N)`` adjacency (dense or sparse, nonzero = edge ``i -> j``).
    ``directed`` defaults to whether the adjacency is asymmetric.
    """
    if isinstance(X, AttributedGraph):
        if adjacency is not None:
            raise ValueError("adjacency must not be given together with an AttributedGraph")
        return X
    if adjacency is None:
        raise ValueError("an adjacency matrix is required when X is an attribute matrix")
    X = check_array(X, dtype=float, ensure_2d=True)
    A = sp.csr_matrix(adjacency)
    n = X.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"adjacency has shape {A.shape}, expected ({n}, {n})")
    A.eliminate_zeros()
    if directed is None:
        directed = (A != A.T).nnz > 0
    coo = A.tocoo()
    edges = np.column_stack([coo.row, coo.col])
    return AttributedGraph.from_edges(n, edges, X, directed)


def check_fraction(value, name: str, low: float = 0.0, high: float = 1.0) -> float:
    if not isinstance(value, numbers.Real) or not low <= value <= high:
        raise ValueError(f"{name} must be a number in [{low}, {high}], got {value!r}")
    return float(value)


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
