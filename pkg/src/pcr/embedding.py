"""Embedding providers and cosine similarity.

Three provider kinds share one ``embed_text`` entry point:

* ``deterministic-local``: feature-hashed token n-grams, offline and seeded.
* ``file-cache``: looks vectors up in a JSON cache file and never computes.
* ``remote-http``: POSTs to an embeddings endpoint configured through
  ``PCR_EMBED_URL`` / ``PCR_EMBED_KEY`` and writes results to the cache.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import threading
import urllib.error
import urllib.request
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .config import EMBED_DIMENSION
from .errors import DimensionError, NotFoundError, ProviderError
from .lexical import tokenize

DETERMINISTIC_LOCAL = "deterministic-local"
FILE_CACHE = "file-cache"
REMOTE_HTTP = "remote-http"
PROVIDER_KINDS = (DETERMINISTIC_LOCAL, FILE_CACHE, REMOTE_HTTP)

# unigrams dominate; bigrams add a little word-order signal
_NGRAM_WEIGHTS = {1: 1.0, 2: 0.5}


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine of the angle between ``u`` and ``v``, clamped to [-1, 1].

    A zero-norm input yields 0.0 so degenerate nodes rank last instead of
    aborting a query.
    """
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"vector lengths differ: {a.shape[0]} vs {b.shape[0]}")
    sa = float(np.max(np.abs(a))) if a.size else 0.0
    sb = float(np.max(np.abs(b))) if b.size else 0.0
    if sa == 0.0 or sb == 0.0 or not (math.isfinite(sa) and math.isfinite(sb)):
        return 0.0
    # pre-scaling keeps huge or subnormal components from overflowing the norms
    a = a / sa
    b = b / sb
    s = float(np.dot(a, b)) / math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    return max(-1.0, min(1.0, s))


@lru_cache(maxsize=65536)
def _feature_vector(feature: str, dimension: int, seed: int) -> np.ndarray:
    # uniform [-1, 1) components expanded from a keyed blake2b stream
    need = dimension * 8
    key = f"{seed}:{feature}".encode("utf-8")
    chunks = []
    counter = 0
    while sum(len(c) for c in chunks) < need:
        chunks.append(hashlib.blake2b(key + counter.to_bytes(4, "little"), digest_size=64).digest())
        counter += 1
    raw = np.frombuffer(b"".join(chunks)[:need], dtype="<u8")
    vec = raw.astype(np.float64) / 2.0**63 - 1.0
    vec.setflags(write=False)
    return vec


def hashed_ngram_embedding(text: str, dimension: int, seed: int = 0) -> np.ndarray:
    tokens = tokenize(text)
    acc = np.zeros(dimension, dtype=np.float64)
    for n, weight in _NGRAM_WEIGHTS.items():
        for i in range(len(tokens) - n + 1):
            acc += weight * _feature_vector(" ".join(tokens[i : i + n]), dimension, seed)
    if not acc.any():
        # text with no alphanumeric tokens still gets a stable vector
        acc = _feature_vector("\x00" + text, dimension, seed).copy()
    # fsum instead of BLAS so vectors are bit-identical across platforms
    norm = math.sqrt(math.fsum(float(x) * float(x) for x in acc))
    return acc / norm


class EmbeddingCache:
    """JSON-backed map from content hash to vector, safe for concurrent writers."""

    def __init__(self, path: Optional[Union[str, Path]], dimension: int, provider: str):
        self.path = Path(path) if path is not None else None
        self.dimension = dimension
        self.provider = provider
        self._vectors: Dict[str, List[float]] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        doc = json.loads(self.path.read_text(encoding="utf-8"))
        dim = doc.get("dimension")
        if dim != self.dimension:
            raise DimensionError(f"cache {self.path} has dimension {dim}, expected {self.dimension}")
        self.provider = doc.get("provider", self.provider)
        self._vectors = {k: list(map(float, v)) for k, v in doc.get("vectors", {}).items()}

    def get(self, text: str) -> Optional[np.ndarray]:
        vec = self._vectors.get(content_hash(text))
        return None if vec is None else np.asarray(vec, dtype=np.float64)

    def put(self, text: str, vector: Sequence[float]) -> None:
        with self._lock:
            self._vectors[content_hash(text)] = [float(x) for x in vector]

    def __len__(self) -> int:
        return len(self._vectors)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "provider": self.provider,
            "vectors": {k: self._vectors[k] for k in sorted(self._vectors)},
        }

    def save(self, path: Optional[Union[str, Path]] = None) -> Path:
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ValueError("no cache path configured")
        with self._lock:
            payload = json.dumps(self.to_dict(), indent=1) + "\n"
            tmp = target.with_suffix(target.suffix + ".tmp")
            tmp.write_text(payload, encoding="utf-8")
            tmp.replace(target)
        return target


class EmbeddingProvider:
    def __init__(
        self,
        kind: str = DETERMINISTIC_LOCAL,
        dimension: int = EMBED_DIMENSION,
        seed: int = 0,
        cache: Optional[EmbeddingCache] = None,
        url: Optional[str] = None,
        api_key: Optional[str] = None,
        model: str = "text-embedding-3-small",
        timeout: float = 30.0,
    ):
        if kind not in PROVIDER_KINDS:
            raise ValueError(f"unknown provider kind {kind!r}; expected one of {PROVIDER_KINDS}")
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        if kind == FILE_CACHE and cache is None:
            raise ValueError("file-cache provider needs a cache")
        self.kind = kind
        self.dimension = dimension
        self.seed = seed
        self.cache = cache
        self.url = url
        self.api_key = api_key
        self.model = model
        self.timeout = timeout

    @classmethod
    def from_env(cls, dimension: int, cache: EmbeddingCache, **kwargs) -> "EmbeddingProvider":
        url = os.environ.get("PCR_EMBED_URL")
        if not url:
            raise ProviderError("PCR_EMBED_URL is not set", retryable=False)
        return cls(REMOTE_HTTP, dimension, cache=cache, url=url, api_key=os.environ.get("PCR_EMBED_KEY"), **kwargs)

    @property
    def provider_id(self) -> str:
        if self.kind == DETERMINISTIC_LOCAL:
            return f"{self.kind}/dim={self.dimension}/seed={self.seed}"
        if self.kind == REMOTE_HTTP:
            return f"{self.kind}/{self.model}"
        return f"{self.kind}/{self.cache.provider if self.cache else '?'}"

    def embed_text(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        if self.kind == DETERMINISTIC_LOCAL:
            vec = hashed_ngram_embedding(text, self.dimension, self.seed)
            if self.cache is not None:
                self.cache.put(text, vec)
            return vec
        if self.cache is not None:
            hit = self.cache.get(text)
            if hit is not None:
                if hit.shape[0] != self.dimension:
                    raise DimensionError(f"cached vector has length {hit.shape[0]}, expected {self.dimension}")
                return hit
        if self.kind == FILE_CACHE:
            raise NotFoundError(f"no cached embedding for text {text[:40]!r}")
        vec = self._remote(text)
        if self.cache is not None:
            self.cache.put(text, vec)
        return vec

    def embed_many(self, texts: Iterable[str]) -> List[np.ndarray]:
        return [self.embed_text(t) for t in texts]

    def _remote(self, text: str) -> np.ndarray:
        if not self.url:
            raise ProviderError("remote provider has no endpoint URL", retryable=False)
        body = json.dumps({"input": text, "model": self.model}).encode("utf-8")
        req = urllib.request.Request(self.url, data=body, method="POST")
        req.add_header("Content-Type", "application/json")
        if self.api_key:
            req.add_header("Authorization", f"Bearer {self.api_key}")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                doc = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            retryable = exc.code == 429 or exc.code >= 500
            raise ProviderError(f"embedding endpoint returned HTTP {exc.code}", retryable=retryable) from None
        except (urllib.error.URLError, TimeoutError, ConnectionError) as exc:
            raise ProviderError(f"embedding endpoint unreachable: {exc}", retryable=True) from None
        except json.JSONDecodeError:
            raise ProviderError("embedding endpoint returned invalid JSON", retryable=False) from None
        try:
            vec = np.asarray(doc["data"][0]["embedding"], dtype=np.float64)
        except (KeyError, IndexError, TypeError, ValueError):
            raise ProviderError("unexpected embeddings response shape", retryable=False) from None
        if vec.ndim != 1 or vec.shape[0] != self.dimension:
            raise DimensionError(f"remote vector has length {vec.size}, expected {self.dimension}")
        if not np.all(np.isfinite(vec)):
            raise ProviderError("remote vector has non-finite components", retryable=False)
        return vec


def embed_text(p: EmbeddingProvider, text: str) -> np.ndarray:
    return p.embed_text(text)
