"""Per-query evaluation metrics and their aggregation to mean ± std."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

import numpy as np

from .config import PENALTY_WEIGHT, RELEVANCE_KS, UNREACHABLE_DISTANCE
from .errors import EmptyInputError
from .graph import ReachabilitySet
from .retrieval import RetrievalResult

METRIC_NAMES = (
    "structural_consistency",
    "structural_inconsistency",
    "multihop_consistency",
    "distance_penalty",
    "result_count",
)


@dataclass(frozen=True, init=False)
class GroundTruth:
    query_id: str
    relevant: frozenset

    def __init__(self, query_id: str, relevant):
        object.__setattr__(self, "query_id", query_id)
        object.__setattr__(self, "relevant", frozenset(relevant))


def relevance_at_k(result: RetrievalResult, truth: GroundTruth, k: int, denominator: str = "available") -> float:
    """Share of the top-k that is relevant.

    ``denominator='available'`` divides by min(k, |ranked|) so a method that
    honestly returns fewer than k nodes is not penalized; ``'k'`` divides by
    k. An empty result scores 0 either way.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    top = result.node_ids[:k]
    if not top:
        return 0.0
    hits = sum(1 for nid in top if nid in truth.relevant)
    denom = len(top) if denominator == "available" else k
    return hits / denom


def relevant_hits(result: RetrievalResult, truth: GroundTruth, k: int) -> int:
    return sum(1 for nid in result.node_ids[:k] if nid in truth.relevant)


def structural_consistency(result: RetrievalResult, reach: ReachabilitySet) -> float:
    ids = result.node_ids
    if not ids:
        return 1.0
    return sum(1 for nid in ids if nid in reach) / len(ids)


def _reachable_lengths(result: RetrievalResult, reach: ReachabilitySet) -> List[int]:
    return [reach.distances[nid] for nid in result.node_ids if nid in reach]


def multihop_consistency(result: RetrievalResult, reach: ReachabilitySet) -> float:
    """1 / (1 + sigma/mu) over hop distances of the reachable retrieved nodes.

    sigma is the population std. No reachable nodes gives 0; all-zero
    lengths give 1.
    """
    lengths = _reachable_lengths(result, reach)
    if not lengths:
        return 0.0
    arr = np.asarray(lengths, dtype=np.float64)
    mu = float(arr.mean())
    sigma = float(arr.std())
    if sigma == 0.0:
        return 1.0
    return 1.0 / (1.0 + sigma / mu)


def distance_penalty(
    result: RetrievalResult,
    reach: ReachabilitySet,
    weight: float = PENALTY_WEIGHT,
    unreachable_distance: float = UNREACHABLE_DISTANCE,
) -> float:
    if weight < 0:
        raise ValueError("weight must be non-negative")
    ids = result.node_ids
    if not ids:
        return 0.0
    total = 0.0
    for nid in ids:
        d = reach.distances.get(nid)
        total += unreachable_distance if d is None else d
    return weight * (total / len(ids))


@dataclass(frozen=True)
class MetricsReport:
    query_id: str
    method: str
    relevance_at: Mapping[int, float]
    structural_consistency: float
    structural_inconsistency: float
    multihop_consistency: float
    distance_penalty: float
    result_count: int
    penalty_weight: float = PENALTY_WEIGHT

    def values(self) -> Dict[str, float]:
        out = {f"relevance@{k}": v for k, v in sorted(self.relevance_at.items())}
        for name in METRIC_NAMES:
            out[name] = float(getattr(self, name))
        return out

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "method": self.method,
            "relevance_at": {str(k): v for k, v in sorted(self.relevance_at.items())},
            "structural_consistency": self.structural_consistency,
            "structural_inconsistency": self.structural_inconsistency,
            "multihop_consistency": self.multihop_consistency,
            "distance_penalty": self.distance_penalty,
            "result_count": self.result_count,
            "penalty_weight": self.penalty_weight,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        d = dict(d)
        d["relevance_at"] = {int(k): float(v) for k, v in d["relevance_at"].items()}
        return cls(**d)


def evaluate_result(
    result: RetrievalResult,
    truth: GroundTruth,
    reach: ReachabilitySet,
    ks: Sequence[int] = RELEVANCE_KS,
    weight: float = PENALTY_WEIGHT,
    unreachable_distance: float = UNREACHABLE_DISTANCE,
    denominator: str = "available",
) -> MetricsReport:
    sc = structural_consistency(result, reach)
    return MetricsReport(
        query_id=result.query_id,
        method=result.method.label,
        relevance_at={k: relevance_at_k(result, truth, k, denominator) for k in ks},
        structural_consistency=sc,
        structural_inconsistency=(1.0 - sc) if result.ranked else 0.0,
        multihop_consistency=multihop_consistency(result, reach),
        distance_penalty=distance_penalty(result, reach, weight, unreachable_distance),
        result_count=len(result.ranked),
        penalty_weight=weight,
    )


@dataclass(frozen=True)
class MeanStd:
    mean: float
    std: float

    def __str__(self) -> str:
        return f"{self.mean:.2f} ± {self.std:.2f}"

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}


def aggregate(reports: Sequence[MetricsReport]) -> Dict[str, MeanStd]:
    """Element-wise mean and population std of every metric."""
    if not reports:
        raise EmptyInputError("cannot aggregate an empty list of reports")
    columns: Dict[str, List[float]] = {}
    for r in reports:
        for name, v in r.values().items():
            columns.setdefault(name, []).append(v)
    out = {}
    for name, vals in columns.items():
        arr = np.asarray(vals, dtype=np.float64)
        out[name] = MeanStd(float(arr.mean()), float(arr.std()))
    return out
