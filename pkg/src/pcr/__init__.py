"""Path-constrained retrieval (PCR) over knowledge graphs.

Semantic search restricted to nodes reachable from an anchor node, plus
vector, BM25 and hybrid baselines and the tooling to evaluate them.
"""

from .embedding import EmbeddingCache, EmbeddingProvider, cosine_similarity, embed_text
from .errors import (
    ConfigError,
    DegenerateVarianceError,
    DimensionError,
    EmptyCorpusError,
    EmptyInputError,
    NotFoundError,
    ParseError,
    PCRError,
    ProviderError,
    ValidationError,
)
from .graph import Edge, KnowledgeGraph, Node, ReachabilitySet, load_graph, path_length, reachable_from
from .lexical import LexicalIndex, bm25_score, build_index, tokenize
from .metrics import (
    GroundTruth,
    MetricsReport,
    aggregate,
    distance_penalty,
    evaluate_result,
    multihop_consistency,
    relevance_at_k,
    structural_consistency,
)
from .retrieval import (
    RetrievalMethod,
    RetrievalResult,
    Retriever,
    ScoredNode,
    bm25_search,
    hybrid_search,
    pcr_search,
    vector_search,
)
from .stats import PairedComparison, compare, paired_ttest

__version__ = "0.1.0"
