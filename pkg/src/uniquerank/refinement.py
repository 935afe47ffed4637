"""Dominance-count refinement of a Markov-chain seed set.

Each node is a point (importance, uniqueness). A node's count ``b(i)`` is
the number of seeds it beats strictly in both coordinates; the final top-k
are the nodes with the largest counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Resolutions of the two ambiguities in the published algorithm; echoed into
# report headers so results can be reproduced under either reading.
TRACKER_INIT = "+inf"
TIE_ORDER = "a+u,u,-id"


@dataclass(frozen=True, eq=False)
class ScorePlane:
    importance: np.ndarray
    uniqueness: np.ndarray
    seeds: tuple[int, ...]

    def __init__(self, importance, uniqueness, seeds: Sequence[int]):
        a = np.asarray(importance, dtype=float)
        u = np.asarray(uniqueness, dtype=float)
        if a.shape != u.shape or a.ndim != 1:
            raise ValueError("importance and uniqueness must be 1-D arrays of equal length")
        if a.size == 0:
            raise ValueError("empty score plane")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(u))):
            raise ValueError("scores must be finite")
        seeds = tuple(int(i) for i in seeds)
        if len(set(seeds)) != len(seeds):
            raise ValueError("seed ids must be distinct")
        if any(not 0 <= i < a.size for i in seeds):
            raise ValueError("seed id out of range")
        object.__setattr__(self, "importance", a)
        object.__setattr__(self, "uniqueness", u)
        object.__setattr__(self, "seeds", seeds)

    @property
    def n_nodes(self) -> int:
        return self.importance.size


def dominance_count(plane: ScorePlane, i: int) -> int:
    """Number of seeds that node ``i`` beats strictly in both coordinates."""
    t = np.asarray(plane.seeds, dtype=np.int64)
    a, u = plane.importance, plane.uniqueness
    return int(np.count_nonzero((a[i] > a[t]) & (u[i] > u[t])))


def dominance_counts(plane: ScorePlane) -> np.ndarray:
    """``b(i)`` for every node, vectorized over the seed set."""
    t = np.asarray(plane.seeds, dtype=np.int64)
    a, u = plane.importance, plane.uniqueness
    if t.size == 0:
        return np.zeros(plane.n_nodes, dtype=np.int64)
    beats = (a[:, None] > a[t][None, :]) & (u[:, None] > u[t][None, :])
    return beats.sum(axis=1)


def refine_top_k(plane: ScorePlane, k: int) -> list[int]:
    """Select the final ``k`` nodes from the seed set.

    Nodes weaker than the weakest seed in either coordinate are skipped. The
    rest are ordered by dominance count, then ``a + u``, then ``u``, then
    smaller id. No node outside the result strictly dominates a node inside.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > len(plane.seeds):
        raise ValueError(f"k={k} exceeds the seed set size {len(plane.seeds)}")
    if k == 0:
        return []
    t = np.asarray(plane.seeds, dtype=np.int64)
    a, u = plane.importance, plane.uniqueness
    survivors = np.flatnonzero((a >= a[t].min()) & (u >= u[t].min()))
    b = dominance_counts(plane)[survivors]
    sa, su = a[survivors], u[survivors]
    order = np.lexsort((survivors, -su, -(sa + su), -b))
    return survivors[order[:k]].tolist()
