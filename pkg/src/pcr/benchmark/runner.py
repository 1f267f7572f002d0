"""Runs retrieval methods over a benchmark dataset and aggregates metrics."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..config import ALPHA, BM25_B, BM25_K1, K, PENALTY_WEIGHT, RELEVANCE_KS, UNREACHABLE_DISTANCE
from ..embedding import EmbeddingProvider
from ..errors import ConfigError
from ..graph import reachable_from
from ..lexical import build_index
from ..metrics import GroundTruth, MeanStd, MetricsReport, aggregate, evaluate_result
from ..retrieval import RetrievalMethod, RetrievalResult, Retriever
from ..stats import PairedComparison, compare
from .dataset import BenchmarkDataset, Domain

DEFAULT_METHODS = (
    RetrievalMethod("pcr"),
    RetrievalMethod("vector"),
    RetrievalMethod("bm25"),
    RetrievalMethod("hybrid", alpha=ALPHA),
)
DEFAULT_DEPTHS = (None, 5, 3, 2, 1)


@dataclass
class RunConfig:
    methods: Sequence[RetrievalMethod] = DEFAULT_METHODS
    k: int = K
    depth_sweep: Optional[Sequence[Optional[int]]] = None
    repeats: int = 20
    warmup: int = 2
    seed: int = 0
    penalty_weight: float = PENALTY_WEIGHT
    unreachable_distance: float = UNREACHABLE_DISTANCE
    denominator: str = "available"
    exclude_anchor: bool = True
    domains: Optional[Sequence[str]] = None
    k1: float = BM25_K1
    b: float = BM25_B

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if not self.methods:
            raise ConfigError("at least one method is required")
        for m in self.methods:
            if not isinstance(m, RetrievalMethod):
                raise ConfigError(f"not a retrieval method: {m!r}")
        if self.denominator not in ("available", "k"):
            raise ConfigError("denominator must be 'available' or 'k'")


@dataclass
class AggregateRow:
    method: str
    n: int
    metrics: Dict[str, MeanStd]

    def to_dict(self) -> dict:
        return {"method": self.method, "n": self.n, "metrics": {k: v.to_dict() for k, v in self.metrics.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "AggregateRow":
        return cls(d["method"], d["n"], {k: MeanStd(v["mean"], v["std"]) for k, v in d["metrics"].items()})


@dataclass
class BenchmarkReport:
    overall: List[AggregateRow]
    per_domain: Dict[str, List[AggregateRow]]
    comparisons: List[PairedComparison]
    reports: List[MetricsReport] = field(default_factory=list)
    results: List[RetrievalResult] = field(default_factory=list)

    def row(self, method: str, domain: Optional[str] = None) -> AggregateRow:
        rows = self.overall if domain is None else self.per_domain[domain]
        for r in rows:
            if r.method == method:
                return r
        raise KeyError(method)


def _retrievers(ds: BenchmarkDataset, provider: EmbeddingProvider, cfg: RunConfig) -> Dict[str, Retriever]:
    return {
        d.name: Retriever(d.graph, provider, build_index(d.graph, cfg.k1, cfg.b), cfg.exclude_anchor)
        for d in _selected(ds, cfg.domains)
    }


def _selected(ds: BenchmarkDataset, names: Optional[Sequence[str]]) -> List[Domain]:
    if not names:
        return list(ds.domains)
    return [ds.domain(n) for n in names]


def _run_queries(
    ds: BenchmarkDataset,
    provider: EmbeddingProvider,
    methods: Sequence[RetrievalMethod],
    cfg: RunConfig,
):
    """Every (method, query) pair; returns reports keyed by method label and domain."""
    retrievers = _retrievers(ds, provider, cfg)
    by_method: Dict[str, List[MetricsReport]] = {m.label: [] for m in methods}
    by_domain: Dict[str, Dict[str, List[MetricsReport]]] = {}
    results: List[RetrievalResult] = []
    ks = tuple(sorted(set(RELEVANCE_KS) | {cfg.k}))
    for dom in _selected(ds, cfg.domains):
        r = retrievers[dom.name]
        by_domain[dom.name] = {m.label: [] for m in methods}
        for q in dom.queries:
            q_emb = provider.embed_text(q.text)
            reach = reachable_from(dom.graph, q.anchor)
            truth = GroundTruth(q.id, q.relevant)
            for m in methods:
                res = r.search(q.text, q.anchor, m, cfg.k, q_embedding=q_emb, query_id=q.id)
                rep = evaluate_result(
                    res, truth, reach, ks, cfg.penalty_weight, cfg.unreachable_distance, cfg.denominator
                )
                by_method[m.label].append(rep)
                by_domain[dom.name][m.label].append(rep)
                results.append(res)
    return by_method, by_domain, results


def _rows(grouped: Dict[str, List[MetricsReport]]) -> List[AggregateRow]:
    return [AggregateRow(label, len(reps), aggregate(reps)) for label, reps in grouped.items() if reps]


def run_benchmark(ds: BenchmarkDataset, cfg: RunConfig, provider: EmbeddingProvider) -> BenchmarkReport:
    """Overall and per-domain aggregates plus PCR-vs-baseline paired tests on Relevance@10."""
    labels = [m.label for m in cfg.methods]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate method labels in {labels}")
    by_method, by_domain, results = _run_queries(ds, provider, cfg.methods, cfg)
    overall = _rows(by_method)
    per_domain = {name: _rows(groups) for name, groups in by_domain.items()}
    comparisons = []
    pcr_labels = [m.label for m in cfg.methods if m.kind == "pcr"]
    if pcr_labels:
        a = pcr_labels[0]
        metric = f"relevance@{max(RELEVANCE_KS)}"
        a_vals = [r.values()[metric] for r in by_method[a]]
        for m in cfg.methods:
            if m.kind == "pcr":
                continue
            b_vals = [r.values()[metric] for r in by_method[m.label]]
            if len(a_vals) >= 2:
                comparisons.append(compare(a, m.label, a_vals, b_vals, metric))
    reports = [rep for reps in by_method.values() for rep in reps]
    return BenchmarkReport(overall, per_domain, comparisons, reports, results)


@dataclass
class DepthRow:
    depth: Optional[int]
    relevance_at_k: float
    structural_consistency: float
    distance_penalty: float
    mean_candidates: float

    @property
    def label(self) -> str:
        return "Unlimited" if self.depth is None else f"Depth {self.depth}"

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "label": self.label,
            "relevance_at_k": self.relevance_at_k,
            "structural_consistency": self.structural_consistency,
            "distance_penalty": self.distance_penalty,
            "mean_candidates": self.mean_candidates,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DepthRow":
        return cls(d["depth"], d["relevance_at_k"], d["structural_consistency"], d["distance_penalty"], d["mean_candidates"])


def run_depth_ablation(
    ds: BenchmarkDataset,
    depths: Sequence[Optional[int]],
    k: int,
    provider: EmbeddingProvider,
    cfg: Optional[RunConfig] = None,
) -> List[DepthRow]:
    """One vector-scored PCR run per depth limit (``None`` means unlimited)."""
    if not depths:
        raise ConfigError("at least one depth is required")
    cfg = cfg or RunConfig()
    rows = []
    for depth in depths:
        m = RetrievalMethod("pcr", max_depth=depth)
        sub = RunConfig(methods=[m], k=k, penalty_weight=cfg.penalty_weight,
                        unreachable_distance=cfg.unreachable_distance, denominator=cfg.denominator,
                        exclude_anchor=cfg.exclude_anchor, domains=cfg.domains, k1=cfg.k1, b=cfg.b)
        by_method, _, _ = _run_queries(ds, provider, [m], sub)
        agg = aggregate(by_method[m.label])
        sizes = []
        for dom in _selected(ds, cfg.domains):
            for q in dom.queries:
                n = len(reachable_from(dom.graph, q.anchor, depth))
                sizes.append(n - 1 if cfg.exclude_anchor else n)
        rows.append(DepthRow(
            depth,
            _rel_at(by_method[m.label], k),
            agg["structural_consistency"].mean,
            agg["distance_penalty"].mean,
            statistics.fmean(sizes),
        ))
    return rows


def _rel_at(reports: Sequence[MetricsReport], k: int) -> float:
    vals = [r.relevance_at.get(k) for r in reports]
    if any(v is None for v in vals):
        raise ConfigError(f"relevance@{k} is not computed; use k in {RELEVANCE_KS}")
    return statistics.fmean(vals)


@dataclass
class HybridRow:
    configuration: str
    relevance_at_k: float
    structural_consistency: float
    multihop_consistency: float

    def to_dict(self) -> dict:
        return {
            "configuration": self.configuration,
            "relevance_at_k": self.relevance_at_k,
            "structural_consistency": self.structural_consistency,
            "multihop_consistency": self.multihop_consistency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HybridRow":
        return cls(d["configuration"], d["relevance_at_k"], d["structural_consistency"], d["multihop_consistency"])


def run_hybrid_ablation(
    ds: BenchmarkDataset,
    k: int,
    provider: EmbeddingProvider,
    alpha: float = ALPHA,
    cfg: Optional[RunConfig] = None,
) -> List[HybridRow]:
    """Vector-scored PCR against hybrid-scored PCR over identical queries."""
    cfg = cfg or RunConfig()
    configs = [
        ("Vector-only PCR", RetrievalMethod("pcr", pcr_scoring="vector")),
        ("Hybrid PCR", RetrievalMethod("pcr", pcr_scoring="hybrid", alpha=alpha)),
    ]
    sub = RunConfig(methods=[m for _, m in configs], k=k, penalty_weight=cfg.penalty_weight,
                    unreachable_distance=cfg.unreachable_distance, denominator=cfg.denominator,
                    exclude_anchor=cfg.exclude_anchor, domains=cfg.domains, k1=cfg.k1, b=cfg.b)
    by_method, _, _ = _run_queries(ds, provider, sub.methods, sub)
    rows = []
    for name, m in configs:
        reps = by_method[m.label]
        agg = aggregate(reps)
        rows.append(HybridRow(name, _rel_at(reps, k), agg["structural_consistency"].mean, agg["multihop_consistency"].mean))
    return rows


@dataclass
class LatencySummary:
    mean_ms: float
    std_ms: float
    min_ms: float
    max_ms: float
    reach_mean_ms: float
    reach_std_ms: float
    samples: int
    full_samples: List[float] = field(default_factory=list, repr=False)
    reach_samples: List[float] = field(default_factory=list, repr=False)

    def to_dict(self, include_samples: bool = False) -> dict:
        d = {
            "average_latency_ms": {"mean": self.mean_ms, "std": self.std_ms},
            "min_latency_ms": self.min_ms,
            "max_latency_ms": self.max_ms,
            "reachability_ms": {"mean": self.reach_mean_ms, "std": self.reach_std_ms},
            "samples": self.samples,
        }
        if include_samples:
            d["full_samples_ms"] = self.full_samples
            d["reachability_samples_ms"] = self.reach_samples
        return d


def run_latency_bench(
    ds: BenchmarkDataset,
    cfg: RunConfig,
    provider: EmbeddingProvider,
    method: Optional[RetrievalMethod] = None,
) -> LatencySummary:
    """Wall-clock timings of full PCR queries and of the reachability step alone.

    Full timings include query embedding. Runs single-threaded; the first
    ``cfg.warmup`` passes over the queries are discarded.
    """
    method = method or RetrievalMethod("pcr")
    domains = _selected(ds, cfg.domains)
    retrievers = _retrievers(ds, provider, cfg)
    full: List[float] = []
    reach: List[float] = []
    for rep in range(cfg.warmup + cfg.repeats):
        keep = rep >= cfg.warmup
        for dom in domains:
            r = retrievers[dom.name]
            for q in dom.queries:
                t0 = time.perf_counter()
                r.search(q.text, q.anchor, method, cfg.k, query_id=q.id)
                t1 = time.perf_counter()
                reachable_from(dom.graph, q.anchor, method.max_depth)
                t2 = time.perf_counter()
                if keep:
                    full.append((t1 - t0) * 1000.0)
                    reach.append((t2 - t1) * 1000.0)
    return LatencySummary(
        statistics.fmean(full),
        statistics.pstdev(full),
        min(full),
        max(full),
        statistics.fmean(reach),
        statistics.pstdev(reach),
        len(full),
        full,
        reach,
    )
