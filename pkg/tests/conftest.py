import itertools

import numpy as np
import pytest

from uniquerank.graph import AttributedGraph


def random_graph(rng, n, p=None, directed=False, k_attr=3):
    """Erdos-Renyi graph with uniform random attributes."""
    p = rng.uniform(0.05, 0.4) if p is None else p
    pairs = itertools.permutations(range(n), 2) if directed else itertools.combinations(range(n), 2)
    edges = [e for e in pairs if rng.random() < p]
    return AttributedGraph.from_edges(n, edges, rng.random((n, k_attr)), directed)


def floyd_warshall(g, nodes=None, follow_direction=True):
    """All-pairs hop distances restricted to ``nodes`` (dict of dicts, inf = unreachable)."""
    nodes = list(range(g.n_nodes)) if nodes is None else sorted(nodes)
    inside = set(nodes)
    inf = float("inf")
    d = {i: {j: (0 if i == j else inf) for j in nodes} for i in nodes}
    for i in nodes:
        nbrs = g.out_neighbors(i) if follow_direction else g.neighbors(i)
        for j in nbrs:
            if int(j) in inside:
                d[i][int(j)] = 1
    for k in nodes:
        for i in nodes:
            for j in nodes:
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def loop_structural(g, s, alpha):
    """Structural transition built entry by entry, straight from the weight formula."""
    n = g.n_nodes
    w = {}
    for j in range(n):
        nb = [int(x) for x in g.neighbors(j)]
        m = min(s[x, j] for x in nb) if nb else None
        w[j] = 1.0 if m is None else 1.0 / (alpha + (1 - alpha) * m)
    p = np.zeros((n, n))
    for i in range(n):
        out = [int(x) for x in g.out_neighbors(i)]
        if not out:
            p[:, i] = 1.0 / n
            continue
        tot = sum(w[j] for j in out)
        for j in out:
            p[j, i] = w[j] / tot
    return p


def loop_attribute(s):
    n = s.shape[0]
    q = np.zeros((n, n))
    for i in range(n):
        col = sum(s[k, i] for k in range(n))
        for j in range(n):
            q[j, i] = s[j, i] / col
    return q


def stationary_solve(r):
    """Solve (R - I) pi = 0 with sum(pi) = 1 as one dense least-squares system."""
    n = r.shape[0]
    a = np.vstack([r - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(a, b, rcond=None)[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
