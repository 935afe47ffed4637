"""Rank graph nodes that are both structurally important and hard to replace."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    AttributedGraph,
    GraphFormatError,
    khop_neighborhood,
    load_graph,
    normalize_attributes,
    remove_and_redirect,
    shortest_path_lengths,
    write_graph,
)
from .kernel import (  # noqa: E402
    DenseSizeError,
    SimilarityMatrix,
    gamma_median_heuristic,
    rbf_similarity,
    similarity_matrix,
    uniqueness_scores,
)
from .ranking import (  # noqa: E402
    RankingConfig,
    RankVector,
    TransitionMatrix,
    attrirank,
    build_attribute_transition,
    build_structural_transition,
    centrality,
    pagerank,
    power_iterate,
    structural_rank,
    uniquerank,
)
from .refinement import ScorePlane, dominance_count, refine_top_k  # noqa: E402
