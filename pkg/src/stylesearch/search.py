"""Embedding store with exact cosine top-k retrieval.

Vectors are kept unnormalized with cached Euclidean norms; scoring is one
matrix multiply over the full store (the catalog tops out around 44k
512-dim vectors, ~91 MB, which scans in milliseconds). Ties are broken by
ascending product id so results are deterministic.

FEMB interchange file (all integers little-endian):

    magic  b"FEMB"
    u32    version (= 1)
    u32    dimension d
    u64    entry count n
    n x (u64 id, d little-endian float32 values)

The same file moves embeddings between the autoencoder export, external
feature extractors, the classifier's embedding-head mode, and the service.
"""

import struct
from dataclasses import dataclass

import numpy as np

from stylesearch.errors import FormatError, ShapeError

ZERO_NORM_EPS = 1e-12

MAGIC = b"FEMB"
VERSION = 1


def cosine(a, b) -> float:
    """cos(angle) between two vectors; 0.0 if either is (near) zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError(f"cosine needs equal-length vectors, got {a.shape} and {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < ZERO_NORM_EPS or nb < ZERO_NORM_EPS:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass(frozen=True)
class SimilarityHit:
    id: int
    score: float


class EmbeddingStore:
    """id -> vector map with insertion order, cached norms, and full-scan
    top-k. The first insert fixes the dimension."""

    def __init__(self, dimension=None):
        self.dimension = dimension
        self._vectors = {}   # id -> float32 array
        self._norms = {}     # id -> float64 norm
        self._matrix = None  # rebuilt lazily after mutation

    def __len__(self):
        return len(self._vectors)

    def __contains__(self, key):
        return key in self._vectors

    def ids(self):
        return list(self._vectors)

    def vector(self, key) -> np.ndarray:
        return self._vectors[key]

    def add(self, key, vector):
        vector = np.ascontiguousarray(vector, dtype=np.float32)
        if vector.ndim != 1:
            raise ShapeError(f"embedding must be a vector, got shape {vector.shape}")
        if not np.all(np.isfinite(vector)):
            raise ShapeError(f"embedding for id {key} contains non-finite values")
        if self.dimension is None:
            self.dimension = vector.shape[0]
        elif vector.shape[0] != self.dimension:
            raise ShapeError(
                f"embedding for id {key} has dimension {vector.shape[0]}, store uses {self.dimension}"
            )
        self._vectors[int(key)] = vector
        self._norms[int(key)] = float(np.linalg.norm(vector.astype(np.float64)))
        self._matrix = None
        return self

    def _ensure_matrix(self):
        if self._matrix is None:
            ids = np.fromiter(self._vectors, dtype=np.int64, count=len(self._vectors))
            if len(ids) == 0:
                self._matrix = (ids, np.zeros((0, self.dimension or 0)), np.zeros(0))
            else:
                mat = np.stack([v.astype(np.float64) for v in self._vectors.values()])
                norms = np.array([self._norms[int(i)] for i in ids])
                self._matrix = (ids, mat, norms)
        return self._matrix

    def top_k(self, query, k=5):
        """The k highest-cosine entries, best first; ties broken by
        ascending id. Exact full scan."""
        if k < 1:
            raise ShapeError(f"k must be >= 1, got {k}")
        if len(self._vectors) == 0:
            return []
        query = np.asarray(query, dtype=np.float64).reshape(-1)
        if query.shape[0] != self.dimension:
            raise ShapeError(
                f"query dimension {query.shape[0]} does not match store dimension {self.dimension}"
            )
        ids, mat, norms = self._ensure_matrix()
        qnorm = np.linalg.norm(query)
        scores = np.zeros(len(ids)) if qnorm < ZERO_NORM_EPS else mat @ query / np.where(
            norms < ZERO_NORM_EPS, np.inf, norms * qnorm)
        order = np.lexsort((ids, -scores))[: min(k, len(ids))]
        return [SimilarityHit(int(ids[i]), float(scores[i])) for i in order]


def save_store(store: EmbeddingStore, path):
    """Write the store as a FEMB file (ids in insertion order)."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIQ", VERSION, store.dimension or 0, len(store)))
        for key in store.ids():
            fh.write(struct.pack("<Q", key))
            fh.write(np.ascontiguousarray(store.vector(key), dtype="<f4").tobytes())


def write_embeddings(path, dimension, count, items):
    """Stream (id, vector) pairs straight into a FEMB file without holding
    them all in memory. `count` must match the number of items yielded."""
    written = 0
    seen = set()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIQ", VERSION, dimension, count))
        for key, vector in items:
            vector = np.ascontiguousarray(vector, dtype="<f4").reshape(-1)
            if vector.shape[0] != dimension:
                raise ShapeError(
                    f"embedding for id {key} has dimension {vector.shape[0]}, expected {dimension}"
                )
            if key in seen:
                raise FormatError(f"duplicate id {key} while writing {path}")
            seen.add(key)
            fh.write(struct.pack("<Q", int(key)))
            fh.write(vector.tobytes())
            written += 1
    if written != count:
        raise FormatError(f"{path}: wrote {written} entries but header claims {count}")


def load_store(path) -> EmbeddingStore:
    return import_embeddings(path, expected_dim=None)


def import_embeddings(path, expected_dim=None) -> EmbeddingStore:
    """Read a FEMB file into a store; duplicate ids and dimension
    mismatches are format errors."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r} at offset 0, expected {MAGIC!r}")
    if len(data) < 20:
        raise FormatError(f"{path}: truncated header at offset {len(data)}")
    version, dim, count = struct.unpack_from("<IIQ", data, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version} at offset 4")
    if expected_dim is not None and dim != expected_dim:
        raise FormatError(f"{path}: dimension {dim} does not match expected {expected_dim}")
    store = EmbeddingStore(dimension=dim if dim > 0 else None)
    offset = 20
    entry_bytes = 8 + 4 * dim
    for i in range(count):
        if offset + entry_bytes > len(data):
            raise FormatError(f"{path}: truncated entry {i} at offset {offset}")
        (key,) = struct.unpack_from("<Q", data, offset)
        if key in store:
            raise FormatError(f"{path}: duplicate id {key} at offset {offset}")
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset + 8).copy()
        store.add(int(key), vec)
        offset += entry_bytes
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes at offset {offset}")
    return store
