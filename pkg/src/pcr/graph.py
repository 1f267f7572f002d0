"""Knowledge-graph data model, JSON loading/validation and anchor reachability."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import IO, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NotFoundError, ParseError, ValidationError

NodeId = str


@dataclass(frozen=True)
class Node:
    id: NodeId
    text: str
    embedding: np.ndarray = field(repr=False, compare=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Node):
            return NotImplemented
        return (
            self.id == other.id
            and self.text == other.text
            and np.array_equal(self.embedding, other.embedding)
        )

    def __hash__(self) -> int:
        return hash((self.id, self.text))


@dataclass(frozen=True)
class Edge:
    src: NodeId
    dst: NodeId
    relation: Optional[str] = None


class KnowledgeGraph:
    """Immutable directed graph of text nodes carrying embeddings.

    Build one with :meth:`from_parts` (validates) or :func:`load_graph`.
    Parallel edges and self-loops are kept as given; they never change
    shortest hop distances.
    """

    __slots__ = ("_nodes", "_edges", "_dimension", "_succ")

    def __init__(self, nodes: Mapping[NodeId, Node], edges: Sequence[Edge], dimension: int):
        self._nodes = MappingProxyType(dict(nodes))
        self._edges = tuple(edges)
        self._dimension = dimension
        succ: Dict[NodeId, List[NodeId]] = {nid: [] for nid in self._nodes}
        for e in self._edges:
            succ[e.src].append(e.dst)
        self._succ = MappingProxyType({k: tuple(v) for k, v in succ.items()})

    @classmethod
    def from_parts(
        cls,
        dimension: int,
        nodes: Iterable[Tuple[NodeId, str, Sequence[float]]],
        edges: Iterable[Union[Edge, Tuple[NodeId, NodeId], Tuple[NodeId, NodeId, Optional[str]]]],
    ) -> "KnowledgeGraph":
        if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension <= 0:
            raise ValidationError(f"dimension must be a positive integer, got {dimension!r}", "dimension")
        node_map: Dict[NodeId, Node] = {}
        for nid, text, emb in nodes:
            if not isinstance(nid, str) or not nid:
                raise ValidationError(f"node id must be a non-empty string, got {nid!r}", repr(nid))
            if nid in node_map:
                raise ValidationError(f"duplicate node id {nid!r}", nid)
            if not isinstance(text, str) or not text:
                raise ValidationError(f"node {nid!r} has empty or non-string text", nid)
            try:
                vec = np.asarray(emb, dtype=np.float64)
            except (TypeError, ValueError):
                raise ValidationError(f"node {nid!r} embedding is not numeric", nid) from None
            if vec.ndim != 1 or vec.shape[0] != dimension:
                raise ValidationError(
                    f"node {nid!r} embedding has length {vec.size}, expected {dimension}", nid
                )
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"node {nid!r} embedding has non-finite components", nid)
            vec = vec.copy()
            vec.setflags(write=False)
            node_map[nid] = Node(nid, text, vec)
        edge_list: List[Edge] = []
        for raw in edges:
            e = raw if isinstance(raw, Edge) else Edge(*raw)
            for end in (e.src, e.dst):
                if end not in node_map:
                    raise ValidationError(
                        f"edge {e.src!r} -> {e.dst!r} references unknown node {end!r}", str(end)
                    )
            if e.relation is not None and not isinstance(e.relation, str):
                raise ValidationError(f"edge {e.src!r} -> {e.dst!r} relation must be a string or null", e.src)
            edge_list.append(e)
        return cls(node_map, edge_list, dimension)

    @property
    def nodes(self) -> Mapping[NodeId, Node]:
        return self._nodes

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def dimension(self) -> int:
        return self._dimension

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, nid: object) -> bool:
        return nid in self._nodes

    def node(self, nid: NodeId) -> Node:
        try:
            return self._nodes[nid]
        except KeyError:
            raise NotFoundError(f"unknown node {nid!r}") from None

    def successors(self, nid: NodeId) -> Tuple[NodeId, ...]:
        return self._succ[nid]

    def node_ids(self) -> List[NodeId]:
        return sorted(self._nodes)

    def to_dict(self) -> dict:
        return {
            "dimension": self._dimension,
            "nodes": [
                {"id": n.id, "text": n.text, "embedding": [float(x) for x in n.embedding]}
                for n in self._nodes.values()
            ],
            "edges": [{"src": e.src, "dst": e.dst, "relation": e.relation} for e in self._edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            self._dimension == other._dimension
            and dict(self._nodes) == dict(other._nodes)
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return f"KnowledgeGraph(|V|={len(self._nodes)}, |E|={len(self._edges)}, dim={self._dimension})"


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def graph_from_dict(doc: object) -> KnowledgeGraph:
    if not isinstance(doc, dict):
        raise ValidationError("graph document must be a JSON object", "<root>")
    for key in ("dimension", "nodes", "edges"):
        if key not in doc:
            raise ValidationError(f"graph document is missing {key!r}", key)
    if not isinstance(doc["nodes"], list) or not isinstance(doc["edges"], list):
        raise ValidationError("'nodes' and 'edges' must be arrays", "<root>")
    nodes = []
    for i, n in enumerate(doc["nodes"]):
        if not isinstance(n, dict) or not {"id", "text", "embedding"} <= n.keys():
            raise ValidationError(f"node #{i} must have id, text and embedding", f"nodes[{i}]")
        if not isinstance(n["embedding"], list):
            raise ValidationError(f"node {n['id']!r} embedding must be an array", str(n["id"]))
        nodes.append((n["id"], n["text"], n["embedding"]))
    edges = []
    for i, e in enumerate(doc["edges"]):
        if not isinstance(e, dict) or not {"src", "dst"} <= e.keys():
            raise ValidationError(f"edge #{i} must have src and dst", f"edges[{i}]")
        edges.append(Edge(e["src"], e["dst"], e.get("relation")))
    return KnowledgeGraph.from_parts(doc["dimension"], nodes, edges)


def load_graph(source: Union[bytes, str, IO[bytes]]) -> KnowledgeGraph:
    """Parse and validate a dataset JSON document.

    ``source`` may be raw bytes, a str, or a binary file object.
    Malformed JSON raises :class:`ParseError` carrying the byte offset;
    structural problems raise :class:`ValidationError` naming the element.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("invalid UTF-8", exc.start) from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, _byte_offset(text, exc.pos)) from None
    return graph_from_dict(doc)


@dataclass(frozen=True)
class ReachabilitySet:
    anchor: NodeId
    max_depth: Optional[int]
    distances: Mapping[NodeId, int]

    def __contains__(self, nid: object) -> bool:
        return nid in self.distances

    def __len__(self) -> int:
        return len(self.distances)

    def nodes(self) -> List[NodeId]:
        return sorted(self.distances)


def reachable_from(g: KnowledgeGraph, anchor: NodeId, max_depth: Optional[int] = None) -> ReachabilitySet:
    """Shortest hop distances from ``anchor`` along directed edges (BFS)."""
    if anchor not in g:
        raise NotFoundError(f"unknown anchor {anchor!r}")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    dist = {anchor: 0}
    frontier = deque([anchor])
    limit = math.inf if max_depth is None else max_depth
    while frontier:
        u = frontier.popleft()
        du = dist[u]
        if du >= limit:
            continue
        for v in g.successors(u):
            if v not in dist:
                dist[v] = du + 1
                frontier.append(v)
    return ReachabilitySet(anchor, max_depth, MappingProxyType(dist))


def path_length(r: ReachabilitySet, v: NodeId) -> Optional[int]:
    return r.distances.get(v)
