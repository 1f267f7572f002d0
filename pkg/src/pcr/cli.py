"""Command-line entry point: ``pcr <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import config
from .benchmark.dataset import generate_dataset, load_dataset, provider_for, save_dataset
from .benchmark.report import (
    comparisons_table,
    depth_table,
    hybrid_table,
    latency_table,
    overall_table,
    per_domain_table,
    render_table,
    write_benchmark_report,
    write_depth_report,
    write_hybrid_report,
    write_latency_report,
)
from .benchmark.runner import (
    DEFAULT_DEPTHS,
    RunConfig,
    run_benchmark,
    run_depth_ablation,
    run_hybrid_ablation,
    run_latency_bench,
)
from .embedding import DETERMINISTIC_LOCAL, EmbeddingCache, EmbeddingProvider, PROVIDER_KINDS
from .errors import PCRError
from .lexical import build_index
from .retrieval import KINDS, RetrievalMethod, Retriever


def _depth(value: str) -> Optional[int]:
    if value.lower() in ("none", "unlimited", "inf"):
        return None
    d = int(value)
    if d < 1:
        raise argparse.ArgumentTypeError("depth must be >= 1 or 'unlimited'")
    return d


def _depth_list(value: str) -> List[Optional[int]]:
    return [_depth(v.strip()) for v in value.split(",") if v.strip()]


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _unit(value: str) -> float:
    x = float(value)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return x


def _add_dataset(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, type=Path, help="dataset directory written by 'generate'")
    p.add_argument("--provider", choices=PROVIDER_KINDS, default=DETERMINISTIC_LOCAL,
                   help="embedding provider (default: %(default)s)")


def _add_eval_options(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--k", type=_positive, default=config.K)
    p.add_argument("--alpha", type=_unit, default=config.ALPHA)
    p.add_argument("--k1", type=float, default=config.BM25_K1)
    p.add_argument("--b", type=_unit, default=config.BM25_B)
    p.add_argument("--penalty-weight", type=float, default=config.PENALTY_WEIGHT)
    p.add_argument("--unreachable-distance", type=float, default=config.UNREACHABLE_DISTANCE)
    p.add_argument("--denominator", choices=("available", "k"), default="available",
                   help="Relevance@k denominator: min(k, |results|) or k")
    p.add_argument("--include-anchor", action="store_true", help="allow the anchor itself in results")
    p.add_argument("--domain", action="append", help="restrict to a domain (repeatable)")
    p.add_argument("--out", type=Path, default=Path(default_out), help="report directory (default: %(default)s)")
    p.add_argument("--no-figures", action="store_true", help="skip PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcr", description="Path-constrained retrieval over knowledge graphs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("generate", help="generate the six-domain benchmark dataset")
    p.add_argument("--seed", type=int, default=config.REFERENCE_SEED)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--queries-per-domain", type=_positive, default=None,
                   help="uniform query count per domain (default: 20 tech, 2 elsewhere)")
    p.add_argument("--dimension", type=_positive, default=config.EMBED_DIMENSION)
    p.add_argument("--acyclic", action="store_true", help="omit the back edge that makes each cluster cyclic")
    p.add_argument("--force", action="store_true", help="overwrite a non-empty output directory")

    p = sub.add_parser("validate", help="load and validate every file of a dataset")
    p.add_argument("--dataset", required=True, type=Path)

    p = sub.add_parser("retrieve", help="run one query and print the ranked nodes")
    _add_dataset(p)
    p.add_argument("--domain", required=True)
    p.add_argument("--anchor", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--method", choices=KINDS, default="pcr")
    p.add_argument("--k", type=_positive, default=config.K)
    p.add_argument("--alpha", type=_unit, default=config.ALPHA)
    p.add_argument("--max-depth", type=_depth, default=None)
    p.add_argument("--pcr-scoring", choices=("vector", "hybrid"), default="vector")
    p.add_argument("--fallback", choices=("none", "global"), default="global")
    p.add_argument("--include-anchor", action="store_true")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")

    p = sub.add_parser("evaluate", help="run PCR and the baselines over every query")
    _add_dataset(p)
    _add_eval_options(p, "reports")

    p = sub.add_parser("ablate-depth", help="PCR relevance and distance penalty per depth limit")
    _add_dataset(p)
    _add_eval_options(p, "reports")
    p.add_argument("--depths", type=_depth_list, default=list(DEFAULT_DEPTHS),
                   help="comma separated, e.g. unlimited,5,3,2,1")

    p = sub.add_parser("ablate-hybrid", help="vector-scored against hybrid-scored PCR")
    _add_dataset(p)
    _add_eval_options(p, "reports")

    p = sub.add_parser("bench", help="latency of full PCR queries and of reachability alone")
    _add_dataset(p)
    p.add_argument("--domain", action="append", help="restrict to a domain (repeatable; default tech)")
    p.add_argument("--k", type=_positive, default=config.K)
    p.add_argument("--repeats", type=_positive, default=20)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--out", type=Path, default=Path("reports"))
    p.add_argument("--no-figures", action="store_true")
    return parser


def _run_config(args, methods=None) -> RunConfig:
    kw = dict(
        k=args.k,
        penalty_weight=args.penalty_weight,
        unreachable_distance=args.unreachable_distance,
        denominator=args.denominator,
        exclude_anchor=not args.include_anchor,
        domains=args.domain,
        k1=args.k1,
        b=args.b,
    )
    if methods is not None:
        kw["methods"] = methods
    return RunConfig(**kw)


def _context(args, ds, extra=None) -> dict:
    ctx = {
        "dataset": ds.manifest,
        "config": {
            "k": args.k,
            "alpha": args.alpha,
            "k1": args.k1,
            "b": args.b,
            "penalty_weight": args.penalty_weight,
            "unreachable_distance": args.unreachable_distance,
            "denominator": args.denominator,
            "exclude_anchor": not args.include_anchor,
            "domains": args.domain or [d.name for d in ds.domains],
            "provider": args.provider,
        },
    }
    if extra:
        ctx["config"].update(extra)
    return ctx


def cmd_generate(args) -> int:
    provider = EmbeddingProvider(
        DETERMINISTIC_LOCAL, args.dimension, seed=args.seed,
        cache=EmbeddingCache(None, args.dimension, DETERMINISTIC_LOCAL),
    )
    ds = generate_dataset(args.seed, args.queries_per_domain, provider, args.dimension, cycles=not args.acyclic)
    out = save_dataset(ds, args.out, force=args.force)
    rows = [[d.name, str(len(d.graph)), str(len(d.graph.edges)), str(len(d.queries))] for d in ds.domains]
    print(render_table(["Domain", "Nodes", "Edges", "Queries"], rows), end="")
    print(f"wrote dataset (seed {args.seed}) to {out}")
    return 0


def cmd_validate(args) -> int:
    ds = load_dataset(args.dataset)
    rows = [[d.name, str(len(d.graph)), str(len(d.graph.edges)), str(len(d.queries))] for d in ds.domains]
    print(render_table(["Domain", "Nodes", "Edges", "Queries"], rows), end="")
    print(f"ok: {len(ds.domains)} domains, {ds.query_count} queries")
    return 0


def cmd_retrieve(args) -> int:
    ds = load_dataset(args.dataset)
    dom = ds.domain(args.domain)
    provider = provider_for(ds, args.provider, args.dataset)
    method = RetrievalMethod(
        args.method,
        alpha=args.alpha,
        max_depth=args.max_depth if args.method == "pcr" else None,
        pcr_scoring=args.pcr_scoring,
        fallback=args.fallback,
    )
    r = Retriever(dom.graph, provider, build_index(dom.graph), exclude_anchor=not args.include_anchor)
    res = r.search(args.query, args.anchor, method, args.k, query_id="cli")
    if args.json:
        print(json.dumps(res.to_dict(), indent=2))
        return 0
    rows = []
    for i, s in enumerate(res.ranked, 1):
        path = "-" if s.path_len is None else str(s.path_len)
        rows.append([str(i), s.node, f"{s.score:.4f}", "yes" if s.reachable else "no", path, dom.graph.nodes[s.node].text])
    print(render_table(["Rank", "Node", "Score", "Reachable", "Path", "Text"], rows), end="")
    note = " (fallback to global search)" if res.fallback_used else ""
    print(f"{len(res.ranked)} results for {method.label} from anchor {args.anchor}{note} in {res.latency:.2f} ms")
    return 0


def cmd_evaluate(args) -> int:
    ds = load_dataset(args.dataset)
    provider = provider_for(ds, args.provider, args.dataset)
    methods = [
        RetrievalMethod("pcr"),
        RetrievalMethod("vector"),
        RetrievalMethod("bm25"),
        RetrievalMethod("hybrid", alpha=args.alpha),
    ]
    cfg = _run_config(args, methods)
    report = run_benchmark(ds, cfg, provider)
    write_benchmark_report(report, args.out, _context(args, ds), figures=not args.no_figures)
    print(f"Overall performance ({report.overall[0].n} queries, k={args.k})")
    print(overall_table(report.overall))
    print("Per-domain Relevance@10 and structural consistency")
    print(per_domain_table(report.per_domain))
    print("Paired t-tests on Relevance@10")
    print(comparisons_table(report.comparisons), end="")
    print(f"reports written to {args.out}")
    return 0


def cmd_ablate_depth(args) -> int:
    ds = load_dataset(args.dataset)
    provider = provider_for(ds, args.provider, args.dataset)
    rows = run_depth_ablation(ds, args.depths, args.k, provider, _run_config(args))
    ctx = _context(args, ds, {"depths": args.depths})
    write_depth_report(rows, args.out, args.k, ctx, figures=not args.no_figures)
    print(depth_table(rows, args.k), end="")
    print(f"reports written to {args.out}")
    return 0


def cmd_ablate_hybrid(args) -> int:
    ds = load_dataset(args.dataset)
    provider = provider_for(ds, args.provider, args.dataset)
    rows = run_hybrid_ablation(ds, args.k, provider, args.alpha, _run_config(args))
    write_hybrid_report(rows, args.out, args.k, _context(args, ds), figures=not args.no_figures)
    print(hybrid_table(rows, args.k), end="")
    print(f"reports written to {args.out}")
    return 0


def cmd_bench(args) -> int:
    ds = load_dataset(args.dataset)
    provider = provider_for(ds, args.provider, args.dataset)
    domains = args.domain or ["tech"]
    cfg = RunConfig(k=args.k, repeats=args.repeats, warmup=max(0, args.warmup), domains=domains)
    summary = run_latency_bench(ds, cfg, provider)
    ctx = {"dataset": ds.manifest, "config": {"k": args.k, "repeats": args.repeats, "warmup": cfg.warmup,
                                              "domains": domains, "provider": args.provider}}
    write_latency_report(summary, args.out, ctx, figures=not args.no_figures)
    print(latency_table(summary), end="")
    print(f"reports written to {args.out}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "validate": cmd_validate,
    "retrieve": cmd_retrieve,
    "evaluate": cmd_evaluate,
    "ablate-depth": cmd_ablate_depth,
    "ablate-hybrid": cmd_ablate_hybrid,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (PCRError, OSError, ValueError, KeyError) as exc:
        msg = str(exc).strip() or exc.__class__.__name__
        print(f"pcr {args.command}: error: {msg.splitlines()[0]}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
