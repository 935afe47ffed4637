"""``uniquerank`` command line: rank, evaluate, scatter, synth, histogram."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .estimators import resolve_gamma
from .evaluation import (
    BASE_METHODS,
    MethodScores,
    ReplacementPolicy,
    attribute_histogram_export,
    naive_name,
    parse_method,
    run_grid,
    scatter_export,
    write_grid,
    write_metric_table,
)
from .graph import NORMALIZATION_MODES, load_graph, normalize_attributes, write_graph
from .kernel import similarity_matrix, uniqueness_scores
from .ranking import RankingConfig, attrirank, centrality, pagerank, rank_order, uniquerank
from .refinement import ScorePlane, refine_top_k
from .report import RunManifest, read_rows, write_csv
from .synth import SYMMETRIC_KINDS, PerturbationSpec, apply_perturbation, make_symmetric_graph

log = logging.getLogger("uniquerank")

RANK_METHODS = BASE_METHODS
RANK_COLUMNS = ("node_label", "rank_position", "chain_score", "importance", "uniqueness", "refined")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _frange(text: str) -> list[float]:
    """``lo:hi:step`` inclusive of both ends, or a comma list."""
    if ":" not in text:
        return _float_list(text)
    lo, hi, step = (float(x) for x in text.split(":"))
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    n = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


# --------------------------------------------------------------------------
# shared argument groups


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input graph")
    g.add_argument("--edges", required=True, help="edge list: source,target per line")
    g.add_argument("--attributes", required=True, help="attribute table: label,a_1,...,a_K with header")
    g.add_argument("--directed", action="store_true")
    g.add_argument("--normalize", choices=NORMALIZATION_MODES, default="min_max")
    bw = g.add_mutually_exclusive_group()
    bw.add_argument("--gamma", type=float, help="fixed RBF bandwidth")
    bw.add_argument("--gamma-median", action="store_true", help="median heuristic (default)")
    g.add_argument("--gamma-pairs", type=int, default=10_000)
    g.add_argument("--gamma-seed", type=int, default=0)


def _add_chain_args(p: argparse.ArgumentParser) -> None:
    c = p.add_argument_group("markov chain")
    c.add_argument("--d", type=float, default=0.85, help="structural step probability")
    c.add_argument("--alpha", type=float, default=0.5, help="uniqueness trade-off")
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--max-iter", type=int, default=1000)
    c.add_argument("--top-k", default="10")
    c.add_argument("--seed-k", type=int, default=None, help="chain candidates fed to refinement")
    c.add_argument("--no-refine", action="store_true")


def _load(args, manifest: RunManifest):
    raw = load_graph(args.edges, args.attributes, directed=args.directed)
    g = normalize_attributes(raw, args.normalize)
    gamma = resolve_gamma(g, args.gamma, args.gamma_pairs, args.gamma_seed)
    manifest.add_input("edges", args.edges)
    manifest.add_input("attributes", args.attributes)
    manifest.params.update(
        directed=args.directed,
        normalize=args.normalize,
        gamma_mode="fixed" if args.gamma is not None else "median",
        gamma=gamma,
        gamma_pairs=args.gamma_pairs,
        gamma_seed=args.gamma_seed,
    )
    return raw, g, gamma


def _config(args, manifest: RunManifest) -> RankingConfig:
    config = RankingConfig(d=args.d, alpha=args.alpha, tolerance=args.tol, max_iterations=args.max_iter)
    manifest.params.update(d=config.d, alpha=config.alpha, tolerance=config.tolerance,
                           max_iterations=config.max_iterations)
    return config


def _single_k(args) -> int:
    ks = _int_list(args.top_k)
    if len(ks) != 1 or ks[0] < 1:
        raise ValueError("--top-k takes one positive integer here")
    return ks[0]


def _refined_selection(importance, uniqueness, order, k: int, seed_k: int | None) -> list[int]:
    seed_k = seed_k or k
    if seed_k < k:
        raise ValueError("--seed-k must be >= --top-k")
    plane = ScorePlane(importance, uniqueness, order[:seed_k])
    return refine_top_k(plane, k)


# --------------------------------------------------------------------------
# subcommands


def cmd_rank(args) -> int:
    manifest = RunManifest("rank")
    _, g, gamma = _load(args, manifest)
    config = _config(args, manifest)
    k = min(_single_k(args), g.n_nodes)
    seed_k = min(args.seed_k, g.n_nodes) if args.seed_k else None
    method = args.method
    refine = method == "uniquerank" and not args.no_refine
    manifest.params.update(method=method, top_k=k, seed_k=seed_k or k, refine=refine)

    s = similarity_matrix(g, gamma)
    importance = attrirank(g, s, config)
    uniqueness = uniqueness_scores(g, s)
    if method == "uniquerank":
        chain = uniquerank(g, s, config)
        scores = chain.scores
        manifest.params.update(iterations=chain.iterations_used, converged=chain.converged)
    elif method == "attrirank":
        scores = importance.scores
    elif method == "pagerank":
        scores = pagerank(g, config).scores
    else:
        scores = centrality(g, method)
    order = rank_order(scores)
    if refine:
        selected = set(_refined_selection(importance.scores, uniqueness, order, k, seed_k))
    else:
        selected = set(order[:k].tolist())

    rows = []
    for pos, v in enumerate(order, start=1):
        rows.append((g.label(v), pos, float(scores[v]), float(importance.scores[v]),
                     float(uniqueness[v]), int(v in selected)))
    write_csv(args.out, RANK_COLUMNS, rows, manifest)
    return 0


def cmd_evaluate(args) -> int:
    manifest = RunManifest("evaluate")
    _, g, gamma = _load(args, manifest)
    config = _config(args, manifest)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.baseline_thresholds:
        methods += [naive_name(t) for t in _frange(args.baseline_thresholds)]
    for m in methods:
        parse_method(m)
    top_k = _int_list(args.top_k)
    thresholds = _float_list(args.thresholds)
    policy = ReplacementPolicy(max(thresholds), args.search_hops, args.distance_cap)
    manifest.params.update(
        methods=methods, top_k=top_k, thresholds=thresholds, search_hops=args.search_hops,
        distance_cap=args.distance_cap, seed_k=args.seed_k or "top_k",
        refine=not args.no_refine, include_removed_pairs=args.include_removed_pairs,
    )

    s = similarity_matrix(g, gamma)
    rows = run_grid(
        g, s, methods, top_k, thresholds, policy, config,
        refine=not args.no_refine, seed_k=args.seed_k,
        include_removed_pairs=args.include_removed_pairs,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = args.prefix
    write_metric_table(rows, "reduction", out / f"{prefix}efficiency_reduction.csv", manifest)
    write_metric_table(rows, "distance", out / f"{prefix}replacement_distance.csv", manifest)
    write_grid(rows, out / f"{prefix}grid.csv", manifest)
    return 0


def cmd_scatter(args) -> int:
    manifest = RunManifest("scatter")
    _, g, gamma = _load(args, manifest)
    config = _config(args, manifest)
    k = min(_single_k(args), g.n_nodes)
    manifest.params.update(top_k=k, seed_k=args.seed_k or k, refine=not args.no_refine)
    ms = MethodScores(g, similarity_matrix(g, gamma), config,
                      refine=not args.no_refine, seed_k=args.seed_k)
    selected = ms.select("uniquerank", k)
    labels = [g.label(i) for i in range(g.n_nodes)]
    scatter_export(ms.importance, ms.uniqueness, selected, args.out, labels, manifest)
    return 0


def cmd_synth(args) -> int:
    g = make_symmetric_graph(args.kind, args.n, n_attributes=args.dims)
    manifest = RunManifest("synth", {"kind": args.kind, "size": args.n, "dims": args.dims,
                                     "seed": args.seed})
    if args.perturb > 0:
        spec = PerturbationSpec.random(g.n_nodes, args.perturb, args.dims, seed=args.seed)
        g = apply_perturbation(g, spec)
        manifest.params.update(perturbed=sorted(spec.perturbed_nodes),
                               delta=list(spec.perturbation_delta))
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    edges = prefix.with_name(prefix.name + ".edges.csv")
    attrs = prefix.with_name(prefix.name + ".attrs.csv")
    write_graph(g, edges, attrs)
    header = "".join(line + "\n" for line in manifest.header_lines())
    for path in (edges, attrs):
        path.write_text(header + path.read_text(encoding="utf-8"), encoding="utf-8")
    print(edges)
    print(attrs)
    return 0


def cmd_histogram(args) -> int:
    manifest = RunManifest("histogram")
    raw, g, gamma = _load(args, manifest)
    manifest.params.update(bins=args.bins)
    if args.selected_from:
        wanted = {r["node_label"] for r in read_rows(args.selected_from) if r["refined"] == "1"}
        index = {g.label(i): i for i in range(g.n_nodes)}
        missing = wanted - index.keys()
        if missing:
            raise ValueError(f"selection refers to unknown node(s): {sorted(missing)[:5]}")
        selected = sorted(index[lab] for lab in wanted)
        manifest.add_input("selection", args.selected_from)
    else:
        config = _config(args, manifest)
        k = min(_single_k(args), g.n_nodes)
        manifest.params.update(top_k=k, seed_k=args.seed_k or k, refine=not args.no_refine)
        ms = MethodScores(g, similarity_matrix(g, gamma), config,
                          refine=not args.no_refine, seed_k=args.seed_k)
        selected = ms.select("uniquerank", k)
    attribute_histogram_export(raw, selected, args.out, bins=args.bins, manifest=manifest)
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniquerank",
        description="Rank nodes that are structurally important and hard to replace.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank nodes and write a ranking CSV")
    _add_graph_args(p)
    _add_chain_args(p)
    p.add_argument("--method", choices=RANK_METHODS, default="uniquerank")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="removal/replacement grid over methods, k and thresholds")
    _add_graph_args(p)
    _add_chain_args(p)
    p.set_defaults(top_k="5,10")
    p.add_argument("--methods", default="uniquerank,attrirank,degree,closeness,eigenvector")
    p.add_argument("--thresholds", default="0.5,0.7")
    p.add_argument("--search-hops", type=int, default=2)
    p.add_argument("--distance-cap", type=int, default=10)
    p.add_argument("--baseline-thresholds", default=None,
                   help="add naive baselines, e.g. 0.7:1.0:0.05")
    p.add_argument("--include-removed-pairs", action="store_true",
                   help="count the removed node's own pairs in the efficiency sums")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--prefix", default="")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scatter", help="importance vs log-uniqueness export")
    _add_graph_args(p)
    _add_chain_args(p)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("synth", help="write a symmetric graph with perturbed attributes")
    p.add_argument("kind", choices=SYMMETRIC_KINDS)
    p.add_argument("--n", type=int, required=True, help="node count (hypercube: dimension)")
    p.add_argument("--perturb", type=int, default=1, help="number of perturbed nodes")
    p.add_argument("--dims", type=int, default=2, help="attribute count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("histogram", help="attribute histograms of all vs selected nodes")
    _add_graph_args(p)
    _add_chain_args(p)
    p.add_argument("--selected-from", help="ranking CSV; rows with refined=1 are selected")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_histogram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, MemoryError, RuntimeError, IndexError) as exc:
        print(f"uniquerank {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
