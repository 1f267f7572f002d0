"""BM25 keyword scoring over node texts."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Mapping

from .config import BM25_B, BM25_K1
from .errors import EmptyCorpusError, NotFoundError

if TYPE_CHECKING:
    from .graph import KnowledgeGraph

_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> List[str]:
    """Lowercase, split on anything non-alphanumeric, drop empties.

    No stemming and no stopword removal.
    """
    return [t for t in _SPLIT_RE.split(text.lower()) if t]


@dataclass(frozen=True)
class LexicalIndex:
    doc_count: int
    avg_doc_len: float
    doc_lengths: Mapping[str, int]
    term_doc_freq: Mapping[str, int]
    postings: Mapping[str, Mapping[str, int]]
    k1: float = BM25_K1
    b: float = BM25_B

    def idf(self, term: str) -> float:
        df = self.term_doc_freq.get(term, 0)
        return math.log((self.doc_count - df + 0.5) / (df + 0.5) + 1.0)

    def score(self, query_text: str, node_id: str) -> float:
        return bm25_score(self, query_text, node_id)


def build_corpus_index(docs: Mapping[str, str], k1: float = BM25_K1, b: float = BM25_B) -> LexicalIndex:
    if not docs:
        raise EmptyCorpusError("cannot build a BM25 index over an empty corpus")
    if k1 < 0:
        raise ValueError("k1 must be non-negative")
    if not 0.0 <= b <= 1.0:
        raise ValueError("b must lie in [0, 1]")
    doc_lengths: Dict[str, int] = {}
    postings: Dict[str, Dict[str, int]] = {}
    for doc_id in sorted(docs):
        counts = Counter(tokenize(docs[doc_id]))
        doc_lengths[doc_id] = sum(counts.values())
        for term, tf in counts.items():
            postings.setdefault(term, {})[doc_id] = tf
    df = {term: len(p) for term, p in postings.items()}
    avg = sum(doc_lengths.values()) / len(doc_lengths)
    return LexicalIndex(len(doc_lengths), avg, doc_lengths, df, postings, k1, b)


def build_index(g: "KnowledgeGraph", k1: float = BM25_K1, b: float = BM25_B) -> LexicalIndex:
    return build_corpus_index({nid: node.text for nid, node in g.nodes.items()}, k1, b)


def bm25_score(idx: LexicalIndex, query_text: str, v: str) -> float:
    if v not in idx.doc_lengths:
        raise NotFoundError(f"node {v!r} is not indexed")
    dl = idx.doc_lengths[v]
    # an all-empty corpus has avg length 0; every tf is then 0 anyway
    norm = idx.k1 * (1.0 - idx.b + idx.b * (dl / idx.avg_doc_len if idx.avg_doc_len else 0.0))
    score = 0.0
    for term in tokenize(query_text):
        tf = idx.postings.get(term, {}).get(v, 0)
        if tf:
            score += idx.idf(term) * tf * (idx.k1 + 1.0) / (tf + norm)
    return score
