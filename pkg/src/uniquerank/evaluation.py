"""Removal / replacement simulation and the local-efficiency evaluation grid.

The protocol for one node: remove it, look for an attribute-similar
replacement in its two-hop neighborhood, redirect its edges to that
replacement if one exists, and compare the efficiency of the neighborhood
before and after.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import AttributedGraph, bfs_distances, induced_distances, remove_and_redirect
from .kernel import SimilarityMatrix, uniqueness_scores
from .ranking import RankingConfig, attrirank, centrality, pagerank, rank_order, uniquerank
from .refinement import ScorePlane, refine_top_k
from .report import RunManifest, write_csv

BASE_METHODS = ("uniquerank", "attrirank", "pagerank", "degree", "closeness", "eigenvector")
_NAIVE = re.compile(r"^naive\(\s*([0-9.eE+-]+)\s*\)$")


@dataclass(frozen=True)
class ReplacementPolicy:
    similarity_threshold: float = 0.7
    search_hops: int = 2
    distance_cap: int = 10

    def __post_init__(self):
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must lie in (0, 1]")
        if self.search_hops < 1:
            raise ValueError("search_hops must be >= 1")
        if self.distance_cap < 1:
            raise ValueError("distance_cap must be >= 1")


@dataclass(frozen=True)
class DisruptionReport:
    node: int
    replacement: int | None
    replacement_similarity: float | None
    efficiency_before: float
    efficiency_after: float
    efficiency_reduction: float
    raw_reduction: float
    pair_set_size: int
    distance_to_nearest_similar: float


def find_replacement(
    g: AttributedGraph, s: SimilarityMatrix, removed: int, policy: ReplacementPolicy
) -> tuple[int, float] | None:
    """Most similar node within ``policy.search_hops`` that meets the threshold.

    Ties go to the closer node, then the smaller id.
    """
    removed = g.check_node(removed)
    dist = bfs_distances(g.nbr_csr, removed, max_depth=policy.search_hops)
    cand = np.flatnonzero(dist > 0)
    if cand.size == 0:
        return None
    sims = s.values[removed, cand]
    ok = sims >= policy.similarity_threshold
    if not ok.any():
        return None
    cand, sims = cand[ok], sims[ok]
    best = np.lexsort((cand, dist[cand], -sims))[0]
    return int(cand[best]), float(sims[best])


def local_efficiency(
    g: AttributedGraph, pair_nodes: Iterable[int], path_nodes: Iterable[int]
) -> float:
    """Sum of ``1/d(i, j)`` over ordered pairs of ``pair_nodes``.

    Shortest paths may only pass through ``path_nodes``; unreachable pairs
    contribute nothing.
    """
    pair_set = set(pair_nodes)
    path = sorted(set(path_nodes) | pair_set)
    if len(pair_set) < 2:
        return 0.0
    dist = induced_distances(g, path)
    sel = np.array([v in pair_set for v in path])
    sub = dist[np.ix_(sel, sel)]
    hops = sub[np.isfinite(sub) & (sub > 0)]
    # correctly rounded, so the result does not depend on summation order
    return math.fsum(1.0 / hops)


def simulate_disruption(
    g: AttributedGraph,
    s: SimilarityMatrix,
    node: int,
    policy: ReplacementPolicy = ReplacementPolicy(),
    include_removed_pairs: bool = False,
) -> DisruptionReport:
    """Remove ``node``, attempt a replacement, and measure the local efficiency drop.

    The pair set is the node's two-hop neighborhood in the original graph
    (plus the node itself when ``include_removed_pairs``); it is fixed
    before removal and used for both measurements. Paths are confined to the
    neighborhood.
    """
    node = g.check_node(node)
    ball = set(np.flatnonzero(bfs_distances(g.nbr_csr, node, max_depth=2) > 0).tolist())
    pairs = ball | {node} if include_removed_pairs else ball
    distance = distance_to_nearest_similar(
        g, s, node, policy.similarity_threshold, policy.distance_cap
    )
    found = find_replacement(g, s, node, policy)
    repl, repl_sim = found if found is not None else (None, None)
    if not ball:
        return DisruptionReport(node, repl, repl_sim, 0.0, 0.0, 0.0, 0.0, 0, distance)

    before = local_efficiency(g, pairs, ball | {node})
    g_mod = remove_and_redirect(g, node, repl)
    after = local_efficiency(g_mod, pairs, ball)
    raw = 1.0 - after / before if before > 0 else 0.0
    reduction = min(max(raw, 0.0), 1.0)
    return DisruptionReport(
        node, repl, repl_sim, before, after, reduction, raw, len(pairs), distance
    )


def distance_to_nearest_similar(
    g: AttributedGraph, s: SimilarityMatrix, node: int, threshold: float, cap: int = 10
) -> float:
    """Hop distance (direction ignored) to the closest other node with similarity >= threshold.

    Returns ``cap`` when no such node lies within ``cap`` hops.
    """
    node = g.check_node(node)
    dist = bfs_distances(g.nbr_csr, node, max_depth=cap)
    reached = np.flatnonzero(dist > 0)
    hits = reached[s.values[node, reached] >= threshold]
    return float(dist[hits].min()) if hits.size else float(cap)


@dataclass(frozen=True)
class NaiveSelection:
    nodes: list[int]
    shortfall: bool


def naive_baseline_select(
    g: AttributedGraph, s: SimilarityMatrix, importance: np.ndarray, threshold: float, k: int
) -> NaiveSelection:
    """Most important nodes with no similar node within two hops.

    ``shortfall`` is set when fewer than ``k`` nodes qualify.
    """
    chosen = []
    for v in rank_order(importance):
        if len(chosen) == k:
            break
        if distance_to_nearest_similar(g, s, int(v), threshold, cap=3) > 2:
            chosen.append(int(v))
    return NaiveSelection(chosen, len(chosen) < k)


# --------------------------------------------------------------------------
# method selection


def parse_method(name: str) -> tuple[str, float | None]:
    name = name.strip()
    if name in BASE_METHODS:
        return name, None
    m = _NAIVE.match(name)
    if m:
        t = float(m.group(1))
        if not 0.0 < t <= 1.0:
            raise ValueError(f"naive baseline threshold must lie in (0, 1]: {name}")
        return "naive", t
    raise ValueError(f"unknown method {name!r}; expected one of {BASE_METHODS} or naive(<t>)")


def naive_name(t: float) -> str:
    return f"naive({t:.2f})"


@dataclass
class MethodScores:
    """Scores of every ranking method on one graph, computed once."""

    g: AttributedGraph
    s: SimilarityMatrix
    config: RankingConfig = field(default_factory=RankingConfig)
    refine: bool = True
    seed_k: int | None = None

    def __post_init__(self):
        self._cache: dict[str, np.ndarray] = {}
        self.uniqueness = uniqueness_scores(self.g, self.s)

    def scores(self, method: str) -> np.ndarray:
        if method not in self._cache:
            if method == "uniquerank":
                val = uniquerank(self.g, self.s, self.config).scores
            elif method == "attrirank":
                val = attrirank(self.g, self.s, self.config).scores
            elif method == "pagerank":
                val = pagerank(self.g, self.config).scores
            else:
                val = centrality(self.g, method)
            self._cache[method] = val
        return self._cache[method]

    @property
    def importance(self) -> np.ndarray:
        return self.scores("attrirank")

    def select(self, method: str, k: int) -> list[int]:
        kind, t = parse_method(method)
        if kind == "naive":
            return naive_baseline_select(self.g, self.s, self.importance, t, k).nodes
        order = rank_order(self.scores(kind))
        if kind == "uniquerank" and self.refine:
            seed_k = max(k, self.seed_k or k)
            plane = ScorePlane(self.importance, self.uniqueness, order[:seed_k])
            return refine_top_k(plane, k)
        return order[:k].tolist()


# --------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridRow:
    method: str
    top_k: int
    threshold: float
    n_nodes: int
    reduction_mean: float
    reduction_se: float
    distance_mean: float
    distance_se: float
    nodes: tuple[int, ...]


GRID_COLUMNS = (
    "method", "top_k", "threshold", "n_nodes",
    "reduction_mean", "reduction_se", "distance_mean", "distance_se", "nodes",
)


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    if len(values) == 0:
        return float("nan"), float("nan")
    arr = np.asarray(values, dtype=float)
    se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return float(arr.mean()), se


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("UNIQUERANK_THREADS", "1")))
    except ValueError:
        return 1


def run_grid(
    g: AttributedGraph,
    s: SimilarityMatrix,
    methods: Sequence[str],
    top_k: Sequence[int],
    thresholds: Sequence[float],
    policy_base: ReplacementPolicy = ReplacementPolicy(),
    config: RankingConfig = RankingConfig(),
    refine: bool = True,
    seed_k: int | None = None,
    include_removed_pairs: bool = False,
    threads: int | None = None,
    scores: MethodScores | None = None,
) -> list[GridRow]:
    """Average disruption metrics over each method's top-k for every (k, threshold).

    Rows come out ordered by method (as given), then k, then threshold,
    whatever the thread count.
    """
    for m in methods:
        parse_method(m)
    ms = scores or MethodScores(g, s, config, refine=refine, seed_k=seed_k)
    picks = {(m, k): ms.select(m, k) for m in methods for k in top_k}

    jobs = sorted({(v, t) for (m, k), nodes in picks.items() for v in nodes for t in thresholds})

    def run(job):
        v, t = job
        policy = ReplacementPolicy(t, policy_base.search_hops, policy_base.distance_cap)
        return simulate_disruption(g, s, v, policy, include_removed_pairs)

    threads = threads or default_threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = dict(zip(jobs, pool.map(run, jobs)))
    else:
        results = {job: run(job) for job in jobs}

    rows = []
    for m in methods:
        for k in top_k:
            nodes = picks[(m, k)]
            for t in thresholds:
                reps = [results[(v, t)] for v in nodes]
                rm, rse = _mean_se([r.efficiency_reduction for r in reps])
                dm, dse = _mean_se([r.distance_to_nearest_similar for r in reps])
                rows.append(GridRow(m, k, float(t), len(nodes), rm, rse, dm, dse, tuple(nodes)))
    return rows


def write_grid(rows: Sequence[GridRow], path: str | Path, manifest: RunManifest | None = None) -> None:
    write_csv(
        path,
        GRID_COLUMNS,
        (
            (r.method, r.top_k, r.threshold, r.n_nodes, r.reduction_mean, r.reduction_se,
             r.distance_mean, r.distance_se, " ".join(map(str, r.nodes)))
            for r in rows
        ),
        manifest,
    )


def write_metric_table(
    rows: Sequence[GridRow], metric: str, path: str | Path, manifest: RunManifest | None = None
) -> None:
    """One (threshold, k) setting per row, ``<method>_mean`` / ``<method>_se`` columns."""
    if metric not in ("reduction", "distance"):
        raise ValueError("metric must be 'reduction' or 'distance'")
    methods = list(dict.fromkeys(r.method for r in rows))
    settings = sorted({(r.threshold, r.top_k) for r in rows})
    cell = {(r.method, r.threshold, r.top_k): r for r in rows}
    cols = ["threshold", "top_k"]
    for m in methods:
        cols += [f"{m}_mean", f"{m}_se"]
    out = []
    for t, k in settings:
        line = [t, k]
        for m in methods:
            r = cell[(m, t, k)]
            line += [getattr(r, f"{metric}_mean"), getattr(r, f"{metric}_se")]
        out.append(line)
    write_csv(path, cols, out, manifest)


# --------------------------------------------------------------------------
# exports for plotting


def scatter_export(
    importance: np.ndarray,
    uniqueness: np.ndarray,
    selected: Iterable[int],
    path: str | Path,
    labels: Sequence[str] | None = None,
    manifest: RunManifest | None = None,
) -> None:
    """Write ``node_label, importance, log_uniqueness, selected`` rows."""
    a = np.asarray(importance, dtype=float)
    u = np.asarray(uniqueness, dtype=float)
    if a.shape != u.shape:
        raise ValueError("importance and uniqueness must have the same length")
    if np.any(u <= 0):
        raise ValueError("uniqueness must be positive to take its log")
    sel = set(int(i) for i in selected)
    labels = labels or [str(i) for i in range(a.size)]
    write_csv(
        path,
        ("node_label", "importance", "log_uniqueness", "selected"),
        ((labels[i], float(a[i]), float(np.log(u[i])), int(i in sel)) for i in range(a.size)),
        manifest,
    )


def attribute_histograms(
    g: AttributedGraph, selected: Iterable[int], bins: int = 20
) -> list[tuple[str, int, float, float, int, int]]:
    """Per-attribute histograms of all nodes vs the selected nodes.

    Bin edges span the attribute's range over all nodes.
    """
    sel = sorted(set(int(i) for i in selected))
    for i in sel:
        g.check_node(i)
    names = g.attribute_names or tuple(f"a{k + 1}" for k in range(g.n_attributes))
    rows = []
    for k, name in enumerate(names):
        col = g.attributes[:, k]
        edges = np.histogram_bin_edges(col, bins=bins)
        all_counts, _ = np.histogram(col, bins=edges)
        sel_counts, _ = np.histogram(col[sel], bins=edges)
        for b in range(bins):
            rows.append((name, b, float(edges[b]), float(edges[b + 1]),
                         int(all_counts[b]), int(sel_counts[b])))
    return rows


def attribute_histogram_export(
    g: AttributedGraph,
    selected: Iterable[int],
    path: str | Path,
    bins: int = 20,
    manifest: RunManifest | None = None,
) -> None:
    write_csv(
        path,
        ("attribute", "bin", "bin_low", "bin_high", "count_all", "count_selected"),
        attribute_histograms(g, selected, bins),
        manifest,
    )


__all__ = [
    "ReplacementPolicy", "DisruptionReport", "find_replacement", "local_efficiency",
    "simulate_disruption", "distance_to_nearest_similar", "naive_baseline_select",
    "NaiveSelection", "MethodScores", "run_grid", "GridRow", "write_grid",
    "write_metric_table", "scatter_export", "attribute_histogram_export",
    "attribute_histograms", "parse_method", "naive_name",
]
