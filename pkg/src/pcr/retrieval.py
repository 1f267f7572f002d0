"""Vector, BM25, hybrid and path-constrained retrieval over a shared ranking core.

All rankings sort by descending score and break ties by ascending node id.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Collection, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import ALPHA, K
from .embedding import EmbeddingProvider, cosine_similarity
from .errors import ConfigError, DimensionError, NotFoundError
from .graph import KnowledgeGraph, NodeId, ReachabilitySet, reachable_from
from .lexical import LexicalIndex, bm25_score, build_index

KINDS = ("vector", "bm25", "hybrid", "pcr")
PCR_SCORINGS = ("vector", "hybrid")
FALLBACKS = ("none", "global")


@dataclass(frozen=True)
class RetrievalMethod:
    kind: str
    alpha: float = ALPHA
    max_depth: Optional[int] = None
    pcr_scoring: str = "vector"
    fallback: str = "none"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown method kind {self.kind!r}; expected one of {KINDS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.max_depth is not None and (self.kind != "pcr" or self.max_depth < 1):
            raise ConfigError("max_depth applies to pcr only and must be >= 1")
        if self.pcr_scoring not in PCR_SCORINGS:
            raise ConfigError(f"unknown pcr scoring {self.pcr_scoring!r}")
        if self.fallback not in FALLBACKS:
            raise ConfigError(f"unknown fallback {self.fallback!r}")

    @property
    def label(self) -> str:
        if self.kind != "pcr":
            return self.kind
        label = "pcr" if self.pcr_scoring == "vector" else "pcr-hybrid"
        if self.max_depth is not None:
            label += f"@d{self.max_depth}"
        if self.fallback == "global":
            label += "+fallback"
        return label

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "max_depth": self.max_depth,
            "pcr_scoring": self.pcr_scoring,
            "fallback": self.fallback,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RetrievalMethod":
        return cls(**d)


@dataclass(frozen=True)
class ScoredNode:
    node: NodeId
    score: float
    reachable: bool = False
    path_len: Optional[int] = None


@dataclass(frozen=True)
class RetrievalResult:
    query_id: str
    anchor: NodeId
    method: RetrievalMethod
    ranked: Tuple[ScoredNode, ...]
    latency: float = 0.0
    fallback_used: bool = False

    @property
    def node_ids(self) -> List[NodeId]:
        return [s.node for s in self.ranked]

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "anchor": self.anchor,
            "method": self.method.label,
            "fallback_used": self.fallback_used,
            "latency_ms": self.latency,
            "ranked": [
                {"node": s.node, "score": s.score, "reachable": s.reachable, "path_len": s.path_len}
                for s in self.ranked
            ],
        }


def top_k(scores: Iterable[Tuple[NodeId, float]], k: int) -> List[ScoredNode]:
    if k < 1:
        raise ValueError("k must be >= 1")
    ordered = sorted(scores, key=lambda p: (-p[1], p[0]))
    return [ScoredNode(nid, s) for nid, s in ordered[:k]]


def _candidate_ids(g: KnowledgeGraph, candidates: Optional[Collection[NodeId]]) -> List[NodeId]:
    if candidates is None:
        return list(g.nodes)
    out = []
    for nid in candidates:
        if nid not in g:
            raise NotFoundError(f"candidate {nid!r} is not in the graph")
        out.append(nid)
    return out


def vector_scores(
    g: KnowledgeGraph, q_embedding: Sequence[float], candidates: Optional[Collection[NodeId]] = None
) -> Dict[NodeId, float]:
    q = np.asarray(q_embedding, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != g.dimension:
        raise DimensionError(f"query embedding has length {q.size}, graph dimension is {g.dimension}")
    return {nid: cosine_similarity(q, g.nodes[nid].embedding) for nid in _candidate_ids(g, candidates)}


def bm25_scores(
    idx: LexicalIndex, query_text: str, candidates: Collection[NodeId]
) -> Dict[NodeId, float]:
    return {nid: bm25_score(idx, query_text, nid) for nid in candidates}


def hybrid_scores(
    g: KnowledgeGraph,
    idx: LexicalIndex,
    query_text: str,
    q_embedding: Sequence[float],
    alpha: float,
    candidates: Optional[Collection[NodeId]] = None,
) -> Dict[NodeId, float]:
    """alpha * (cos+1)/2 + (1-alpha) * minmax(bm25), normalized over ``candidates``.

    When every candidate has the same BM25 score the lexical term is 0.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    cos = vector_scores(g, q_embedding, candidates)
    lex = bm25_scores(idx, query_text, cos.keys())
    if not cos:
        return {}
    lo, hi = min(lex.values()), max(lex.values())
    span = hi - lo
    out = {}
    for nid, c in cos.items():
        lex_norm = (lex[nid] - lo) / span if span > 0 else 0.0
        out[nid] = alpha * ((c + 1.0) / 2.0) + (1.0 - alpha) * lex_norm
    return out


def vector_search(
    g: KnowledgeGraph,
    q_embedding: Sequence[float],
    k: int,
    candidates: Optional[Collection[NodeId]] = None,
) -> List[ScoredNode]:
    return top_k(vector_scores(g, q_embedding, candidates).items(), k)


def bm25_search(
    idx: LexicalIndex,
    query_text: str,
    k: int,
    candidates: Optional[Collection[NodeId]] = None,
) -> List[ScoredNode]:
    if candidates is None:
        candidates = list(idx.doc_lengths)
    return top_k(bm25_scores(idx, query_text, candidates).items(), k)


def hybrid_search(
    g: KnowledgeGraph,
    idx: LexicalIndex,
    query_text: str,
    q_embedding: Sequence[float],
    k: int,
    alpha: float = ALPHA,
    candidates: Optional[Collection[NodeId]] = None,
) -> List[ScoredNode]:
    return top_k(hybrid_scores(g, idx, query_text, q_embedding, alpha, candidates).items(), k)


def _score(
    g: KnowledgeGraph,
    idx: LexicalIndex,
    query_text: str,
    q_embedding: Sequence[float],
    k: int,
    scoring: str,
    alpha: float,
    candidates: Collection[NodeId],
) -> List[ScoredNode]:
    if scoring == "vector":
        return vector_search(g, q_embedding, k, candidates)
    if scoring == "bm25":
        return bm25_search(idx, query_text, k, candidates)
    return hybrid_search(g, idx, query_text, q_embedding, k, alpha, candidates)


def _annotate(ranked: Iterable[ScoredNode], reach: Optional[ReachabilitySet]) -> Tuple[ScoredNode, ...]:
    if reach is None:
        return tuple(ranked)
    out = []
    for s in ranked:
        d = reach.distances.get(s.node)
        out.append(replace(s, reachable=d is not None, path_len=d))
    return tuple(out)


def pcr_search(
    g: KnowledgeGraph,
    idx: LexicalIndex,
    anchor: NodeId,
    query_text: str,
    q_embedding: Sequence[float],
    k: int,
    method: RetrievalMethod,
    exclude_anchor: bool = True,
    query_id: str = "",
) -> RetrievalResult:
    """Rank only nodes reachable from ``anchor`` (within ``method.max_depth``).

    With ``fallback='global'`` and no reachable candidates left after
    exclusions, the same scoring runs over the whole graph and the result
    is flagged ``fallback_used``.
    """
    if method.kind != "pcr":
        raise ConfigError(f"pcr_search needs a pcr method, got {method.kind!r}")
    t0 = time.perf_counter()
    reach = reachable_from(g, anchor, method.max_depth)
    candidates = [nid for nid in reach.distances if not (exclude_anchor and nid == anchor)]
    fallback_used = False
    if candidates:
        ranked = _score(g, idx, query_text, q_embedding, k, method.pcr_scoring, method.alpha, candidates)
        ranked = _annotate(ranked, reach)
    elif method.fallback == "global":
        fallback_used = True
        everything = [nid for nid in g.nodes if not (exclude_anchor and nid == anchor)]
        ranked = _score(g, idx, query_text, q_embedding, k, method.pcr_scoring, method.alpha, everything)
        ranked = _annotate(ranked, reach)
    else:
        ranked = ()
    latency = (time.perf_counter() - t0) * 1000.0
    return RetrievalResult(query_id, anchor, method, tuple(ranked), latency, fallback_used)


class Retriever:
    """Bundles a graph, its BM25 index and an embedding provider.

    ``search`` runs any of the four methods for one (anchor, query) pair and
    annotates every returned node with its reachability from the anchor.
    The anchor exclusion flag applies identically to every method.
    """

    def __init__(
        self,
        graph: KnowledgeGraph,
        provider: Optional[EmbeddingProvider] = None,
        index: Optional[LexicalIndex] = None,
        exclude_anchor: bool = True,
    ):
        self.graph = graph
        self.index = index if index is not None else build_index(graph)
        self.provider = provider
        self.exclude_anchor = exclude_anchor

    def embed_query(self, text: str) -> np.ndarray:
        if self.provider is None:
            raise ConfigError("no embedding provider configured")
        return self.provider.embed_text(text)

    def search(
        self,
        query_text: str,
        anchor: NodeId,
        method: RetrievalMethod,
        k: int = K,
        q_embedding: Optional[Sequence[float]] = None,
        query_id: str = "",
    ) -> RetrievalResult:
        t0 = time.perf_counter()
        if q_embedding is None:
            q_embedding = self.embed_query(query_text)
        if method.kind == "pcr":
            res = pcr_search(
                self.graph, self.index, anchor, query_text, q_embedding, k, method,
                exclude_anchor=self.exclude_anchor, query_id=query_id,
            )
            return replace(res, latency=(time.perf_counter() - t0) * 1000.0)
        reach = reachable_from(self.graph, anchor)
        candidates = [nid for nid in self.graph.nodes if not (self.exclude_anchor and nid == anchor)]
        scoring = method.kind
        ranked = _score(self.graph, self.index, query_text, q_embedding, k, scoring, method.alpha, candidates)
        latency = (time.perf_counter() - t0) * 1000.0
        return RetrievalResult(query_id, anchor, method, _annotate(ranked, reach), latency, False)
