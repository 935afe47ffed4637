"""Attributed graphs: storage, file ingestion, normalization and surgery.

Nodes are dense zero-based integers. Adjacency is kept in CSR form (one
structure for out-edges, one for in-edges and one for the direction-blind
union), so neighborhood queries are array slices and bulk traversals can be
handed to :mod:`scipy.sparse.csgraph`.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

NORMALIZATION_MODES = ("min_max", "z_score", "none")


class GraphFormatError(ValueError):
    """Raised when an edge or attribute file cannot be turned into a graph."""


class LoadStats(NamedTuple):
    duplicate_edges: int
    self_loops: int


def _csr_from_pairs(n: int, src: np.ndarray, dst: np.ndarray) -> sp.csr_matrix:
    data = np.ones(len(src), dtype=np.int8)
    mat = sp.csr_matrix((data, (src, dst)), shape=(n, n))
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Immutable graph with a real-valued attribute row per node.

    Use :meth:`from_edges` rather than the raw constructor; it enforces the
    no-self-loop / no-duplicate invariants and builds the adjacency indices.
    """

    n_nodes: int
    directed: bool
    out_csr: sp.csr_matrix = field(repr=False)
    in_csr: sp.csr_matrix = field(repr=False)
    attributes: np.ndarray = field(repr=False)
    node_labels: tuple[str, ...] | None = None
    attribute_names: tuple[str, ...] | None = None
    load_stats: LoadStats | None = None
    nbr_csr: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        if self.attributes.shape[0] != self.n_nodes:
            raise ValueError(
                f"attribute matrix has {self.attributes.shape[0]} rows, expected {self.n_nodes}"
            )
        if not np.all(np.isfinite(self.attributes)):
            raise ValueError("attribute matrix contains non-finite values")
        if self.directed:
            nbr = (self.out_csr + self.in_csr).tocsr()
            nbr.data[:] = 1
            nbr.sort_indices()
        else:
            nbr = self.out_csr
        object.__setattr__(self, "nbr_csr", nbr)

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        edges: Iterable[Sequence[int]] | np.ndarray,
        attributes: np.ndarray | None = None,
        directed: bool = False,
        node_labels: Sequence[str] | None = None,
        attribute_names: Sequence[str] | None = None,
    ) -> "AttributedGraph":
        """Build a graph from ``(source, target)`` pairs.

        Self-loops are dropped and duplicate edges collapsed; for undirected
        graphs ``(a, b)`` and ``(b, a)`` are the same edge. The counts of both
        are kept in ``load_stats``.
        """
        if n_nodes < 1:
            raise ValueError("graph must have at least one node")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n_nodes):
            raise ValueError("edge endpoint out of range")
        src, dst = arr[:, 0], arr[:, 1]
        loops = src == dst
        n_loops = int(loops.sum())
        src, dst = src[~loops], dst[~loops]
        if not directed:
            src, dst = np.minimum(src, dst), np.maximum(src, dst)
        keys = np.unique(src * n_nodes + dst)
        n_dupes = len(src) - len(keys)
        src, dst = keys // n_nodes, keys % n_nodes
        if not directed:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        out_csr = _csr_from_pairs(n_nodes, src, dst)
        in_csr = out_csr if not directed else _csr_from_pairs(n_nodes, dst, src)
        if attributes is None:
            attributes = np.zeros((n_nodes, 1))
        attributes = np.array(attributes, dtype=float, copy=True)
        if attributes.ndim == 1:
            attributes = attributes[:, None]
        attributes.setflags(write=False)
        return cls(
            n_nodes=n_nodes,
            directed=directed,
            out_csr=out_csr,
            in_csr=in_csr,
            attributes=attributes,
            node_labels=tuple(node_labels) if node_labels is not None else None,
            attribute_names=tuple(attribute_names) if attribute_names is not None else None,
            load_stats=LoadStats(n_dupes, n_loops),
        )

    @property
    def n_attributes(self) -> int:
        return self.attributes.shape[1]

    @property
    def n_edges(self) -> int:
        """Edge count; an undirected edge counts once."""
        nnz = self.out_csr.nnz
        return nnz if self.directed else nnz // 2

    @property
    def out_adjacency(self) -> list[list[int]]:
        return [self.out_neighbors(i).tolist() for i in range(self.n_nodes)]

    @property
    def in_adjacency(self) -> list[list[int]]:
        return [self.in_neighbors(i).tolist() for i in range(self.n_nodes)]

    def out_neighbors(self, i: int) -> np.ndarray:
        p = self.out_csr.indptr
        return self.out_csr.indices[p[i]:p[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        p = self.in_csr.indptr
        return self.in_csr.indices[p[i]:p[i + 1]]

    def neighbors(self, i: int) -> np.ndarray:
        """Union of in- and out-neighbors, sorted."""
        p = self.nbr_csr.indptr
        return self.nbr_csr.indices[p[i]:p[i + 1]]

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_csr.indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_csr.indptr)

    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` array of edges; undirected edges appear once as ``(lo, hi)``."""
        coo = self.out_csr.tocoo()
        src, dst = coo.row.astype(np.int64), coo.col.astype(np.int64)
        if not self.directed:
            keep = src < dst
            src, dst = src[keep], dst[keep]
        order = np.lexsort((dst, src))
        return np.column_stack([src[order], dst[order]])

    def label(self, i: int) -> str:
        return self.node_labels[i] if self.node_labels is not None else str(i)

    def check_node(self, v: int) -> int:
        if not 0 <= int(v) < self.n_nodes:
            raise IndexError(f"node {v} out of range [0, {self.n_nodes})")
        return int(v)

    def with_attributes(self, attributes: np.ndarray) -> "AttributedGraph":
        attributes = np.array(attributes, dtype=float, copy=True)
        attributes.setflags(write=False)
        return replace(self, attributes=attributes)

    def permuted(self, perm: Sequence[int]) -> "AttributedGraph":
        """Relabel nodes so old node ``i`` becomes ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        edges = perm[self.edge_array()] if self.n_edges else np.empty((0, 2), dtype=np.int64)
        attrs = np.empty_like(self.attributes)
        attrs[perm] = self.attributes
        labels = None
        if self.node_labels is not None:
            new = [""] * self.n_nodes
            for old, lab in enumerate(self.node_labels):
                new[perm[old]] = lab
            labels = new
        return AttributedGraph.from_edges(
            self.n_nodes, edges, attrs, self.directed, labels, self.attribute_names
        )


# --------------------------------------------------------------------------
# file I/O


def _read_rows(path: str | Path) -> list[list[str]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        return []
    delimiter = "\t" if "\t" in lines[0] else ","
    reader = csv.reader(io.StringIO("\n".join(lines)), delimiter=delimiter)
    return [[cell.strip() for cell in row] for row in reader]


def load_graph(
    edge_file: str | Path, attribute_file: str | Path, directed: bool = False
) -> AttributedGraph:
    """Load an edge list plus a per-node attribute table.

    Node ids follow the row order of the attribute file, so nodes without
    edges are kept as isolated vertices.
    """
    attr_rows = _read_rows(attribute_file)
    if len(attr_rows) < 2:
        raise GraphFormatError(f"{attribute_file}: empty graph (no attribute rows)")
    header, body = attr_rows[0], attr_rows[1:]
    n_cols = len(header)
    if n_cols < 2:
        raise GraphFormatError(f"{attribute_file}: header needs a label column and at least one attribute")
    labels: list[str] = []
    index: dict[str, int] = {}
    values = np.empty((len(body), n_cols - 1))
    for r, row in enumerate(body, start=2):
        if len(row) != n_cols:
            raise GraphFormatError(
                f"{attribute_file}: ragged row {r}: {len(row)} cells, expected {n_cols}"
            )
        label = row[0]
        if label in index:
            raise GraphFormatError(f"{attribute_file}: duplicate node label {label}")
        try:
            values[len(labels)] = [float(c) for c in row[1:]]
        except ValueError:
            raise GraphFormatError(f"{attribute_file}: non-numeric attribute in row {r}") from None
        if not np.all(np.isfinite(values[len(labels)])):
            raise GraphFormatError(f"{attribute_file}: non-finite attribute in row {r}")
        index[label] = len(labels)
        labels.append(label)

    edges = []
    for r, row in enumerate(_read_rows(edge_file), start=1):
        if r == 1 and [c.lower() for c in row[:2]] == ["source", "target"]:
            continue
        if len(row) < 2:
            raise GraphFormatError(f"{edge_file}: line {r} is not a source,target pair")
        pair = []
        for lab in row[:2]:
            if lab not in index:
                raise GraphFormatError(f"unknown node {lab}")
            pair.append(index[lab])
        edges.append(pair)

    g = AttributedGraph.from_edges(
        len(labels), edges, values, directed, labels, header[1:]
    )
    if g.load_stats.self_loops:
        logger.warning("dropped %d self-loop(s) from %s", g.load_stats.self_loops, edge_file)
    if g.load_stats.duplicate_edges:
        logger.info("collapsed %d duplicate edge(s) from %s", g.load_stats.duplicate_edges, edge_file)
    return g


def write_graph(g: AttributedGraph, edge_file: str | Path, attribute_file: str | Path) -> None:
    """Write ``g`` in the formats read by :func:`load_graph`."""
    labels = [g.label(i) for i in range(g.n_nodes)]
    names = g.attribute_names or tuple(f"a{k + 1}" for k in range(g.n_attributes))
    with open(edge_file, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for s, t in g.edge_array():
            w.writerow([labels[s], labels[t]])
    with open(attribute_file, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *names])
        for i in range(g.n_nodes):
            w.writerow([labels[i], *(repr(float(v)) for v in g.attributes[i])])


# --------------------------------------------------------------------------
# attributes


def normalize_attributes(g: AttributedGraph, mode: str = "min_max") -> AttributedGraph:
    """Rescale each attribute column; constant columns become 0."""
    if mode == "none":
        return g
    if mode not in NORMALIZATION_MODES:
        raise ValueError(f"unknown normalization mode {mode!r}")
    x = g.attributes
    if mode == "min_max":
        lo, span = x.min(axis=0), np.ptp(x, axis=0)
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (x - lo) / safe, 0.0)
    else:
        mu, sd = x.mean(axis=0), x.std(axis=0)
        safe = np.where(sd > 0, sd, 1.0)
        out = np.where(sd > 0, (x - mu) / safe, 0.0)
    return g.with_attributes(out)


# --------------------------------------------------------------------------
# traversal


def bfs_distances(
    adj: sp.csr_matrix,
    source: int,
    max_depth: int | None = None,
    allowed: np.ndarray | None = None,
) -> np.ndarray:
    """Hop distances from ``source`` (``-1`` = unreached) by frontier expansion.

    ``allowed`` is a boolean mask of nodes the walk may enter.
    """
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source])
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = np.unique(adj[frontier].indices)
        nxt = nxt[dist[nxt] < 0]
        if allowed is not None:
            nxt = nxt[allowed[nxt]]
        dist[nxt] = depth
        frontier = nxt
    return dist


def khop_neighborhood(g: AttributedGraph, v: int, k: int) -> set[int]:
    """Nodes other than ``v`` within ``k`` hops, ignoring edge direction."""
    v = g.check_node(v)
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = bfs_distances(g.nbr_csr, v, max_depth=k)
    return set(np.flatnonzero(dist > 0).tolist())


def shortest_path_lengths(
    g: AttributedGraph,
    source: int,
    restrict_to: Iterable[int] | None = None,
    follow_direction: bool = True,
) -> dict[int, int]:
    """Unweighted BFS distances from ``source``.

    On directed graphs paths follow edge direction unless
    ``follow_direction`` is false. With ``restrict_to`` the paths may only
    pass through the given nodes. Unreachable nodes are absent.
    """
    source = g.check_node(source)
    allowed = None
    if restrict_to is not None:
        allowed = np.zeros(g.n_nodes, dtype=bool)
        allowed[list(restrict_to)] = True
    adj = g.out_csr if follow_direction else g.nbr_csr
    dist = bfs_distances(adj, source, allowed=allowed)
    reached = np.flatnonzero(dist > 0)
    return {int(u): int(dist[u]) for u in reached}


def induced_distances(g: AttributedGraph, nodes: Sequence[int]) -> np.ndarray:
    """All-pairs hop distances within the subgraph induced by ``nodes``.

    Row/column order follows ``nodes``; unreachable pairs are ``inf``.
    """
    idx = np.asarray(nodes, dtype=np.int64)
    if idx.size == 0:
        return np.zeros((0, 0))
    sub = g.out_csr[idx][:, idx]
    return csgraph.shortest_path(sub, method="D", directed=g.directed, unweighted=True)


# --------------------------------------------------------------------------
# surgery


def remove_and_redirect(
    g: AttributedGraph, removed: int, replacement: int | None = None
) -> AttributedGraph:
    """Detach ``removed`` and optionally hand its edges to ``replacement``.

    The removed node stays in the graph as an isolated vertex so node ids are
    stable. Redirected edges that would become self-loops are dropped and
    duplicates merge.
    """
    removed = g.check_node(removed)
    if replacement is not None:
        replacement = g.check_node(replacement)
        if replacement == removed:
            raise ValueError("replacement must differ from the removed node")
    edges = g.edge_array()
    if replacement is None:
        keep = (edges[:, 0] != removed) & (edges[:, 1] != removed)
        edges = edges[keep]
    else:
        edges = np.where(edges == removed, replacement, edges)
    new = AttributedGraph.from_edges(
        g.n_nodes, edges, g.attributes, g.directed, g.node_labels, g.attribute_names
    )
    return replace(new, load_stats=g.load_stats)
