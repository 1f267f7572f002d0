import random

import numpy as np
import pytest

from pcr.benchmark.dataset import generate_dataset, provider_for
from pcr.graph import Edge, KnowledgeGraph

REFERENCE_SEED = 42


def make_graph(nodes, edges, dim=3, embeddings=None, texts=None):
    embeddings = embeddings or {}
    texts = texts or {}
    parts = []
    for i, nid in enumerate(nodes):
        emb = embeddings.get(nid, [float(i + 1)] + [0.0] * (dim - 1))
        parts.append((nid, texts.get(nid, f"node {nid}"), emb))
    return KnowledgeGraph.from_parts(dim, parts, [Edge(s, d) for s, d in edges])


def random_graph(rng: random.Random, max_nodes=50, dim=8, edge_factor=None, self_loops=True):
    n = rng.randint(2, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    m = rng.randint(0, int(n * (edge_factor or rng.uniform(0.3, 3.0))))
    edges = []
    for _ in range(m):
        s, d = rng.choice(ids), rng.choice(ids)
        if s == d and not self_loops:
            continue
        edges.append((s, d))
    nrng = np.random.default_rng(rng.randrange(2**32))
    emb = nrng.standard_normal((n, dim))
    parts = [(nid, f"text {nid}", emb[i]) for i, nid in enumerate(ids)]
    return KnowledgeGraph.from_parts(dim, parts, [Edge(s, d) for s, d in edges])


@pytest.fixture
def chain():
    return make_graph(["a", "b", "c"], [("a", "b"), ("b", "c")])


@pytest.fixture(scope="session")
def reference_dataset():
    return generate_dataset(REFERENCE_SEED)


@pytest.fixture(scope="session")
def reference_provider(reference_dataset):
    return provider_for(reference_dataset)
