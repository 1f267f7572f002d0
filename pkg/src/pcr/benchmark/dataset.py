"""Benchmark dataset model, deterministic generator and on-disk layout.

Layout of a dataset directory::

    manifest.json
    embeddings.json          # file-cache for every node and query text
    <domain>/graph.json      # graph JSON document
    <domain>/queries.json
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..config import EMBED_DIMENSION
from ..embedding import DETERMINISTIC_LOCAL, EmbeddingCache, EmbeddingProvider
from ..errors import ConfigError, ValidationError
from ..graph import Edge, KnowledgeGraph, load_graph, reachable_from
from .vocab import DOMAIN_ORDER, DOMAINS, QUERY_TEMPLATES

GENERATOR_VERSION = "1"
NODES_PER_DOMAIN = 30
EDGES_PER_DOMAIN = 60
CLUSTERS = 3
CLUSTER_SIZE = NODES_PER_DOMAIN // CLUSTERS
INTRA_EDGES = 18
CROSS_EDGES = EDGES_PER_DOMAIN - CLUSTERS * INTRA_EDGES
RELEVANT_RADIUS = 3
OUTSIDE_RELEVANT_PROB = 0.3
ROOT_ANCHOR_PROB = 0.5

DEFAULT_QUERY_COUNTS = {"tech": 20, "legal": 2, "bio": 2, "microservices": 2, "citations": 2, "medical": 2}


@dataclass(frozen=True)
class QuerySpec:
    id: str
    text: str
    anchor: str
    relevant: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "anchor": self.anchor, "relevant": list(self.relevant)}

    @classmethod
    def from_dict(cls, d: dict) -> "QuerySpec":
        return cls(d["id"], d["text"], d["anchor"], tuple(d["relevant"]))


@dataclass(frozen=True)
class Domain:
    name: str
    graph: KnowledgeGraph
    queries: Tuple[QuerySpec, ...]


@dataclass
class BenchmarkDataset:
    domains: List[Domain]
    manifest: Dict = field(default_factory=dict)
    provider: Optional[EmbeddingProvider] = field(default=None, repr=False, compare=False)

    def domain(self, name: str) -> Domain:
        for d in self.domains:
            if d.name == name:
                return d
        raise ConfigError(f"dataset has no domain {name!r}; available: {[d.name for d in self.domains]}")

    @property
    def query_count(self) -> int:
        return sum(len(d.queries) for d in self.domains)


def _layout(rng: random.Random, prefix: str, cycles: bool):
    """Node roles and edge list for one domain graph.

    Each cluster is a small hierarchy: root -> 3 mid nodes -> 2 leaves each,
    densified with random forward edges. Cross-cluster edges run from a leaf
    in one cluster to a leaf in another, so most of the graph stays out of
    reach from any given anchor.
    """
    roles = {}
    edges: List[Tuple[str, str]] = []
    for c in range(CLUSTERS):
        base = c * CLUSTER_SIZE
        ids = [f"{prefix}{base + i}" for i in range(CLUSTER_SIZE)]
        root, mids, leaves = ids[0], ids[1:4], ids[4:]
        parent = {leaves[2 * j + s]: mids[j] for j in range(3) for s in range(2)}
        roles[root] = (c, "root", None)
        for m in mids:
            roles[m] = (c, "mid", root)
        for leaf in leaves:
            roles[leaf] = (c, "leaf", parent[leaf])
        tree = [(root, m) for m in mids] + [(parent[leaf], leaf) for leaf in leaves]
        forward = [(root, leaf) for leaf in leaves]
        forward += [(m, leaf) for m in mids for leaf in leaves if parent[leaf] != m]
        forward += [(mids[i], mids[j]) for i in range(3) for j in range(i + 1, 3)]
        forward += [(leaves[i], leaves[j]) for i in range(6) for j in range(i + 1, 6)]
        n_extra = INTRA_EDGES - len(tree)
        chosen = []
        if cycles:
            leaf = rng.choice(leaves)
            chosen.append((leaf, parent[leaf]))
        chosen += rng.sample(forward, n_extra - len(chosen))
        edges += tree + chosen
    all_leaves = [nid for nid, r in roles.items() if r[1] == "leaf"]
    cross = set()
    while len(cross) < CROSS_EDGES:
        src, dst = rng.choice(all_leaves), rng.choice(all_leaves)
        # acyclic graphs only link lower-numbered clusters to higher ones
        if roles[src][0] != roles[dst][0] and (cycles or roles[src][0] < roles[dst][0]):
            cross.add((src, dst))
    edges += sorted(cross)
    return roles, edges


def _node_text(rng: random.Random, title: str, keywords: Sequence[str], facet: str) -> str:
    a, b = rng.sample(list(keywords), 2)
    return f"{title}: {a} and {b}, {facet}"


def _generate_domain(
    name: str,
    seed: int,
    n_queries: int,
    provider: EmbeddingProvider,
    cycles: bool,
) -> Domain:
    vocab = DOMAINS[name]
    rng = random.Random(f"{seed}:{name}")
    roles, edge_pairs = _layout(rng, vocab.prefix, cycles)

    topic_of: Dict[str, Optional[int]] = {}
    for c in range(CLUSTERS):
        members = [nid for nid, r in roles.items() if r[0] == c and r[1] != "root"]
        # 9 non-root nodes over 5 topics: four topics twice, one once
        pool = [0, 0, 1, 1, 2, 2, 3, 3, 4]
        rng.shuffle(pool)
        for nid, t in zip(members, pool):
            topic_of[nid] = t
    texts = {}
    for nid, (c, role, _) in roles.items():
        title, overview = vocab.clusters[c]
        if role == "root":
            topic_of[nid] = None
            texts[nid] = f"{title} overview: {overview}"
        else:
            _, keywords = vocab.topics[topic_of[nid]]
            texts[nid] = _node_text(rng, title, keywords, rng.choice(vocab.facets))

    node_ids = sorted(roles, key=lambda s: int(s[len(vocab.prefix):]))
    nodes = [(nid, texts[nid], provider.embed_text(texts[nid])) for nid in node_ids]
    edges = [Edge(s, d, rng.choice(vocab.relations)) for s, d in edge_pairs]
    graph = KnowledgeGraph.from_parts(provider.dimension, nodes, edges)

    queries = []
    seen = set()
    attempts = 0
    while len(queries) < n_queries:
        attempts += 1
        if attempts > 10_000:
            raise ConfigError(f"could not draw {n_queries} distinct queries for domain {name!r}")
        c = rng.randrange(CLUSTERS)
        cluster_nodes = [nid for nid in node_ids if roles[nid][0] == c]
        root = cluster_nodes[0]
        mids = [nid for nid in cluster_nodes if roles[nid][1] == "mid"]
        anchor = root if rng.random() < ROOT_ANCHOR_PROB else rng.choice(mids)
        near = reachable_from(graph, anchor, RELEVANT_RADIUS)
        topics = sorted({topic_of[nid] for nid in near.distances if nid != anchor and roles[nid][0] == c})
        if not topics:
            continue
        topic = rng.choice(topics)
        if (anchor, topic) in seen and len(seen) < 3 * n_queries:
            continue
        seen.add((anchor, topic))
        relevant = {
            nid for nid in near.distances
            if nid != anchor and roles[nid][0] == c and topic_of[nid] == topic
        }
        if rng.random() < OUTSIDE_RELEVANT_PROB:
            full = reachable_from(graph, anchor)
            outside = [nid for nid in node_ids if nid not in full and topic_of[nid] == topic]
            if outside:
                relevant.add(rng.choice(outside))
        _, keywords = vocab.topics[topic]
        a, b = rng.sample(list(keywords), 2)
        text = rng.choice(QUERY_TEMPLATES).format(a=a, b=b)
        qid = f"{name}-q{len(queries):02d}"
        queries.append(QuerySpec(qid, text, anchor, tuple(sorted(relevant))))
        provider.embed_text(text)
    return Domain(name, graph, tuple(queries))


def query_counts(queries_per_domain: Union[None, int, Mapping[str, int]]) -> Dict[str, int]:
    if queries_per_domain is None:
        return dict(DEFAULT_QUERY_COUNTS)
    if isinstance(queries_per_domain, int):
        if queries_per_domain < 1:
            raise ConfigError("queries_per_domain must be positive")
        return {name: queries_per_domain for name in DOMAIN_ORDER}
    return {name: int(queries_per_domain[name]) for name in DOMAIN_ORDER}


def generate_dataset(
    seed: int,
    queries_per_domain: Union[None, int, Mapping[str, int]] = None,
    provider: Optional[EmbeddingProvider] = None,
    dimension: int = EMBED_DIMENSION,
    cycles: bool = True,
) -> BenchmarkDataset:
    """Build the six-domain benchmark deterministically from ``seed``.

    ``queries_per_domain`` defaults to 20 for tech and 2 elsewhere; pass an
    int for uniform counts. Every text is embedded through ``provider``
    (deterministic-local seeded with ``seed`` when omitted); the provider's
    cache, if any, ends up holding every node and query vector.
    """
    counts = query_counts(queries_per_domain)
    if provider is None:
        provider = EmbeddingProvider(
            DETERMINISTIC_LOCAL, dimension, seed=seed,
            cache=EmbeddingCache(None, dimension, f"{DETERMINISTIC_LOCAL}/seed={seed}"),
        )
    domains = [_generate_domain(name, seed, counts[name], provider, cycles) for name in DOMAIN_ORDER]
    manifest = {
        "benchmark": "PathRAG-6-style",
        "generator_version": GENERATOR_VERSION,
        "seed": seed,
        "cycles": cycles,
        "provider": provider.provider_id,
        "provider_kind": provider.kind,
        "embedding_seed": provider.seed,
        "dimension": provider.dimension,
        "domains": [d.name for d in domains],
        "queries_per_domain": counts,
    }
    return BenchmarkDataset(domains, manifest, provider)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def save_dataset(ds: BenchmarkDataset, out_dir: Union[str, Path], force: bool = False) -> Path:
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise FileExistsError(f"{out} exists and is not empty; pass force=True (--force) to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(_dump(ds.manifest), encoding="utf-8")
    for d in ds.domains:
        ddir = out / d.name
        ddir.mkdir(exist_ok=True)
        (ddir / "graph.json").write_text(d.graph.dumps(), encoding="utf-8")
        (ddir / "queries.json").write_text(_dump([q.to_dict() for q in d.queries]), encoding="utf-8")
    provider = ds.provider
    if provider is not None and provider.cache is not None:
        provider.cache.provider = ds.manifest.get("provider", provider.cache.provider)
        provider.cache.save(out / "embeddings.json")
    return out


def _validate_queries(name: str, graph: KnowledgeGraph, queries: Sequence[QuerySpec]) -> None:
    for q in queries:
        if q.anchor not in graph:
            raise ValidationError(f"query {q.id!r} anchor {q.anchor!r} is not a node of {name!r}", q.anchor)
        if not q.relevant:
            raise ValidationError(f"query {q.id!r} has no relevant nodes", q.id)
        for nid in q.relevant:
            if nid not in graph:
                raise ValidationError(f"query {q.id!r} relevant node {nid!r} is not in {name!r}", nid)


def load_dataset(path: Union[str, Path]) -> BenchmarkDataset:
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"{manifest_path} not found")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    domains = []
    for name in manifest.get("domains", []):
        ddir = root / name
        graph = load_graph((ddir / "graph.json").read_bytes())
        queries = tuple(
            QuerySpec.from_dict(q) for q in json.loads((ddir / "queries.json").read_text(encoding="utf-8"))
        )
        _validate_queries(name, graph, queries)
        domains.append(Domain(name, graph, queries))
    return BenchmarkDataset(domains, manifest)


def provider_for(ds: BenchmarkDataset, kind: Optional[str] = None, dataset_dir: Optional[Union[str, Path]] = None) -> EmbeddingProvider:
    """Embedding provider matching the one that built ``ds``.

    ``kind='file-cache'`` reads ``embeddings.json`` from ``dataset_dir``;
    ``kind='remote-http'`` reads endpoint settings from the environment.
    """
    m = ds.manifest
    dim = int(m.get("dimension", EMBED_DIMENSION))
    kind = kind or DETERMINISTIC_LOCAL
    if kind == DETERMINISTIC_LOCAL:
        return EmbeddingProvider(DETERMINISTIC_LOCAL, dim, seed=int(m.get("embedding_seed", m.get("seed", 0))))
    cache_path = Path(dataset_dir) / "embeddings.json" if dataset_dir is not None else None
    cache = EmbeddingCache(cache_path, dim, m.get("provider", kind))
    if kind == "file-cache":
        return EmbeddingProvider("file-cache", dim, cache=cache)
    return EmbeddingProvider.from_env(dim, cache)
