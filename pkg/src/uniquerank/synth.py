"""Vertex-transitive test graphs with a few attribute-perturbed nodes.

On such graphs every node plays the same structural role, so any ranking
difference comes from the attributes: the perturbed nodes should outrank
the rest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import AttributedGraph, normalize_attributes
from .kernel import gamma_median_heuristic, similarity_matrix
from .ranking import RankingConfig, uniquerank

SYMMETRIC_KINDS = ("cycle", "complete", "hypercube")

# relative gap below which two stationary scores count as tied
_TIE_RTOL = 1e-12


def make_symmetric_graph(kind: str, size: int, n_attributes: int = 1) -> AttributedGraph:
    """Cycle on ``size`` nodes, complete graph on ``size`` nodes, or the
    ``size``-dimensional hypercube. Attributes start at zero."""
    if kind == "cycle":
        if size < 3:
            raise ValueError("cycle needs at least 3 nodes")
        n = size
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "complete":
        if size < 2:
            raise ValueError("complete graph needs at least 2 nodes")
        n = size
        edges = list(itertools.combinations(range(n), 2))
    elif kind == "hypercube":
        if size < 1:
            raise ValueError("hypercube dimension must be >= 1")
        n = 1 << size
        edges = [(i, i ^ (1 << b)) for i in range(n) for b in range(size) if i < i ^ (1 << b)]
    else:
        raise ValueError(f"unknown symmetric graph kind {kind!r}; expected one of {SYMMETRIC_KINDS}")
    return AttributedGraph.from_edges(n, edges, np.zeros((n, n_attributes)))


@dataclass(frozen=True)
class PerturbationSpec:
    base_attributes: tuple[float, ...]
    perturbed_nodes: frozenset[int]
    perturbation_delta: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        if len(self.base_attributes) != len(self.perturbation_delta):
            raise ValueError("base_attributes and perturbation_delta differ in length")
        if not self.perturbed_nodes:
            raise ValueError("perturbation must touch at least one node")
        if not any(self.perturbation_delta):
            raise ValueError("perturbation delta must be non-zero")

    @classmethod
    def random(
        cls,
        n_nodes: int,
        n_perturbed: int = 1,
        n_attributes: int = 2,
        seed: int = 0,
        low: float = 0.5,
        high: float = 1.0,
    ) -> "PerturbationSpec":
        """Seeded spec: ``n_perturbed`` distinct nodes, delta ~ U[low, high] per coordinate."""
        rng = np.random.default_rng(seed)
        nodes = rng.choice(n_nodes, size=n_perturbed, replace=False)
        delta = rng.uniform(low, high, size=n_attributes)
        return cls(
            tuple([0.0] * n_attributes),
            frozenset(int(v) for v in nodes),
            tuple(float(x) for x in delta),
            seed,
        )


def apply_perturbation(g: AttributedGraph, spec: PerturbationSpec) -> AttributedGraph:
    for v in spec.perturbed_nodes:
        g.check_node(v)
    x = np.tile(np.asarray(spec.base_attributes, dtype=float), (g.n_nodes, 1))
    idx = sorted(spec.perturbed_nodes)
    x[idx] += np.asarray(spec.perturbation_delta)
    return g.with_attributes(x)


def perturbed_scores(
    g: AttributedGraph,
    config: RankingConfig = RankingConfig(),
    normalize: str = "min_max",
    gamma: float | None = None,
) -> np.ndarray:
    g = normalize_attributes(g, normalize)
    gamma = gamma if gamma is not None else gamma_median_heuristic(g)
    return uniquerank(g, similarity_matrix(g, gamma), config).scores


def ground_truth_check(
    g: AttributedGraph,
    spec: PerturbationSpec | None,
    config: RankingConfig = RankingConfig(),
    normalize: str = "min_max",
    gamma: float | None = None,
) -> bool:
    """True iff every perturbed node strictly outranks every default node.

    ``g`` must already carry the perturbed attributes. When ``spec`` is
    None (the negative control) the check is inapplicable and returns False.
    """
    if spec is None or not spec.perturbed_nodes:
        return False
    scores = perturbed_scores(g, config, normalize, gamma)
    mask = np.zeros(g.n_nodes, dtype=bool)
    mask[sorted(spec.perturbed_nodes)] = True
    if mask.all():
        return False
    lowest_perturbed = scores[mask].min()
    highest_default = scores[~mask].max()
    return bool(lowest_perturbed - highest_default > _TIE_RTOL * highest_default)
