import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcr.errors import NotFoundError, ParseError, ValidationError
from pcr.graph import KnowledgeGraph, load_graph, path_length, reachable_from

from conftest import make_graph, random_graph
from oracles import floyd_warshall

MINIMAL = {
    "dimension": 3,
    "nodes": [
        {"id": "x1", "text": "cloud computing", "embedding": [1.0, 0.0, 0.0]},
        {"id": "x2", "text": "virtual machines", "embedding": [0.0, 1.0, 0.5]},
    ],
    "edges": [{"src": "x1", "dst": "x2", "relation": "uses"}],
}


def _doc(**changes):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(changes)
    return json.dumps(doc).encode()


def test_load_minimal_document():
    g = load_graph(json.dumps(MINIMAL).encode())
    assert len(g.nodes) == 2
    assert len(g.edges) == 1
    assert g.dimension == 3
    assert g.edges[0].relation == "uses"


def test_load_accepts_file_objects_and_str(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(MINIMAL))
    with open(path, "rb") as fh:
        assert len(load_graph(fh).nodes) == 2
    assert len(load_graph(json.dumps(MINIMAL)).nodes) == 2


def test_dangling_edge_names_missing_node():
    bad = _doc(edges=[{"src": "x1", "dst": "x9", "relation": None}])
    with pytest.raises(ValidationError, match="x9") as exc:
        load_graph(bad)
    assert exc.value.element == "x9"


def test_duplicate_node_id_rejected():
    nodes = MINIMAL["nodes"] + [{"id": "x1", "text": "again", "embedding": [0, 0, 1]}]
    with pytest.raises(ValidationError, match="duplicate.*x1"):
        load_graph(_doc(nodes=nodes))


def test_dimension_mismatch_names_node():
    nodes = [MINIMAL["nodes"][0], {"id": "x2", "text": "t", "embedding": [1.0, 2.0]}]
    with pytest.raises(ValidationError, match="x2"):
        load_graph(_doc(nodes=nodes))


@pytest.mark.parametrize(
    "node",
    [
        {"id": "", "text": "t", "embedding": [1, 0, 0]},
        {"id": "q", "text": "", "embedding": [1, 0, 0]},
        {"id": "q", "text": "t", "embedding": [1, float("nan"), 0]},
        {"id": "q", "text": "t"},
    ],
)
def test_invalid_nodes_rejected(node):
    with pytest.raises(ValidationError):
        load_graph(_doc(nodes=[node]))


def test_parse_error_reports_byte_offset():
    raw = '{"dimension": 3, "nodes": [é, ]}'.encode()
    with pytest.raises(ParseError) as exc:
        load_graph(raw)
    # é is two bytes in UTF-8 and sits right where parsing fails
    assert exc.value.offset == raw.index("é".encode())


def test_parallel_edges_and_self_loops_tolerated():
    g = make_graph(["a", "b"], [("a", "b"), ("a", "b"), ("a", "a"), ("b", "b")])
    assert len(g.edges) == 4
    assert dict(reachable_from(g, "a").distances) == {"a": 0, "b": 1}


def test_round_trip_through_json():
    g = random_graph(random.Random(3), max_nodes=20)
    assert load_graph(g.dumps().encode()) == g


def test_graph_is_immutable(chain):
    with pytest.raises(TypeError):
        chain.nodes["z"] = None
    with pytest.raises(ValueError):
        chain.nodes["a"].embedding[0] = 5.0


class TestReachability:
    def test_chain_unlimited(self, chain):
        assert dict(reachable_from(chain, "a").distances) == {"a": 0, "b": 1, "c": 2}

    def test_chain_depth_one(self, chain):
        assert dict(reachable_from(chain, "a", 1).distances) == {"a": 0, "b": 1}

    def test_isolated_anchor(self, chain):
        assert dict(reachable_from(chain, "c").distances) == {"c": 0}

    def test_direction_matters(self, chain):
        assert "a" not in reachable_from(chain, "b")

    def test_unknown_anchor(self, chain):
        with pytest.raises(NotFoundError):
            reachable_from(chain, "zz")

    def test_cycles_terminate(self):
        g = make_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
        assert dict(reachable_from(g, "b").distances) == {"b": 0, "c": 1, "a": 2}

    def test_path_length(self, chain):
        r = reachable_from(chain, "a")
        assert path_length(r, "c") == 2
        assert path_length(r, "a") == 0
        assert path_length(reachable_from(chain, "a", 1), "c") is None

    def test_matches_floyd_warshall_on_random_30_60(self):
        rng = random.Random(11)
        ids = [f"v{i}" for i in range(30)]
        edges = [(rng.choice(ids), rng.choice(ids)) for _ in range(60)]
        g = make_graph(ids, edges)
        fw = floyd_warshall(ids, edges)
        for a in ids:
            expected = {v: int(fw[a, v]) for v in ids if fw[a, v] != float("inf")}
            assert dict(reachable_from(g, a).distances) == expected


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31), depth=st.integers(0, 6))
def test_depth_limit_is_a_filter_of_unlimited(seed, depth):
    g = random_graph(random.Random(seed), max_nodes=25)
    anchor = random.Random(seed).choice(g.node_ids())
    full = reachable_from(g, anchor).distances
    limited = reachable_from(g, anchor, depth).distances
    assert dict(limited) == {v: d for v, d in full.items() if d <= depth}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_every_distance_has_a_witness_path(seed):
    g = random_graph(random.Random(seed), max_nodes=15)
    anchor = g.node_ids()[0]
    dist = reachable_from(g, anchor).distances
    for v, d in dist.items():
        if v == anchor:
            assert d == 0
            continue
        # a predecessor one hop closer must exist, so a path can be rebuilt
        preds = [e.src for e in g.edges if e.dst == v and e.src in dist and dist[e.src] == d - 1]
        assert preds, f"no witness for {v}"
