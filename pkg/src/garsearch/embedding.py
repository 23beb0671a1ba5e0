"""Embedding store with a bit-exact binary format and exact top-k search.

Vectors are L2-normalized once at ingest so similarity reduces to a dot
product. Search is exact brute force over the whole store; dot products
accumulate in float32 coordinate-by-coordinate, which keeps hit lists
reproducible across platforms and BLAS builds. Ties are broken by shot id
ascending.
"""

from __future__ import annotations

import struct
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._hash import fnv1a64
from .errors import (
    DimMismatch,
    DuplicateId,
    MalformedLine,
    NonFinite,
    StoreFormatError,
    ZeroVector,
)

MAGIC = b"GAREMB1\n"

# L2 norm below this is treated as the zero vector.
ZERO_NORM_EPS = 1e-12
# |norm - 1| tolerance for "already unit" checks.
UNIT_NORM_TOL = 1e-6


class SearchHit(NamedTuple):
    shot_id: str
    score: float


def _as_f32(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 1:
        raise NonFinite(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


def l2_norm(arr: np.ndarray) -> float:
    """Deterministic float64 L2 norm of a float32 vector."""
    return float(np.sqrt(np.sum(np.square(arr, dtype=np.float64))))


def normalize(values) -> np.ndarray:
    """Return values / ||values||2 as a float32 vector.

    Raises NonFinite for NaN/Inf entries and ZeroVector when the norm is
    below ZERO_NORM_EPS (including the empty vector).
    """
    arr = _as_f32(values)
    if arr.size == 0:
        raise ZeroVector("empty vector")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("vector contains NaN or Inf")
    norm = l2_norm(arr)
    if norm < ZERO_NORM_EPS:
        raise ZeroVector(f"norm {norm} below {ZERO_NORM_EPS}")
    return (arr.astype(np.float64) / norm).astype(np.float32)


class EmbeddingStore:
    """Immutable id-addressed matrix of unit-norm float32 shot vectors.

    Construct through build_store or parse_store; entry order is ingest
    order and is preserved by serialization round-trips.
    """

    def __init__(self, dim: int, ids: Sequence[str], matrix: np.ndarray):
        if matrix.shape != (len(ids), dim):
            raise DimMismatch(dim, matrix.shape[1] if matrix.ndim == 2 else -1)
        self.dim = int(dim)
        self.ids = tuple(ids)
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        matrix.setflags(write=False)
        self.matrix = matrix
        self._id_array = np.asarray(self.ids, dtype=np.str_) if self.ids else np.empty(0, dtype=np.str_)
        self._checksum: int | None = None

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, shot_id: str) -> bool:
        return shot_id in set(self.ids)

    @property
    def checksum(self) -> int:
        """FNV-1a 64 over the serialized payload (computed lazily, cached)."""
        if self._checksum is None:
            self._checksum = fnv1a64(_payload_bytes(self))
        return self._checksum


def build_store(records: Iterable[tuple[str, Sequence[float]]], dim: int) -> EmbeddingStore:
    """Normalize and assemble (shot_id, raw vector) records into a store."""
    if dim <= 0:
        raise DimMismatch(dim, dim, detail=f"dim must be positive, got {dim}")
    ids: list[str] = []
    seen: set[str] = set()
    rows: list[np.ndarray] = []
    for shot_id, values in records:
        if not shot_id or any(ch.isspace() for ch in shot_id):
            raise StoreFormatError(
                f"invalid shot id {shot_id!r}: must be a non-empty token without whitespace"
            )
        if shot_id in seen:
            raise DuplicateId(shot_id)
        arr = _as_f32(values)
        if arr.size != dim:
            raise DimMismatch(dim, arr.size, detail=f"shot {shot_id!r}: expected dim {dim}, got {arr.size}")
        try:
            rows.append(normalize(arr))
        except ZeroVector:
            raise ZeroVector(f"shot {shot_id!r} has zero norm") from None
        except NonFinite:
            raise NonFinite(f"shot {shot_id!r} has non-finite entries") from None
        seen.add(shot_id)
        ids.append(shot_id)
    matrix = np.vstack(rows).astype(np.float32) if rows else np.empty((0, dim), dtype=np.float32)
    return EmbeddingStore(dim, ids, matrix)


def knn_search(store: EmbeddingStore, query, k: int) -> list[SearchHit]:
    """Exact top-k by cosine similarity (dot product over unit vectors).

    Returns min(k, len(store)) hits sorted by score descending, ties by
    shot id ascending. k=0 and the empty store yield an empty result.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    q = _as_f32(query)
    if q.size != store.dim:
        raise DimMismatch(store.dim, q.size)
    if not np.all(np.isfinite(q)):
        raise NonFinite("query contains NaN or Inf")
    norm = l2_norm(q)
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        if norm < ZERO_NORM_EPS:
            raise ZeroVector("query has zero norm")
        q = (q.astype(np.float64) / norm).astype(np.float32)
    n = len(store)
    if n == 0 or k == 0:
        return []
    # Sequential float32 accumulation over coordinates: reproducible
    # everywhere, independent of BLAS.
    scores = np.zeros(n, dtype=np.float32)
    for j in range(store.dim):
        scores += store.matrix[:, j] * q[j]
    order = np.lexsort((store._id_array, -scores))
    top = order[: min(k, n)]
    return [SearchHit(store.ids[i], float(scores[i])) for i in top]


# --- binary format ---
# magic "GAREMB1\n" | u32 entry_count | u32 dim | per entry: u16 id byte
# length + UTF-8 bytes | entry_count*dim float32 values in entry order |
# u64 FNV-1a of every payload byte after the magic. Little-endian.


def _payload_bytes(store: EmbeddingStore) -> bytes:
    parts = [struct.pack("<II", len(store), store.dim)]
    for shot_id in store.ids:
        raw = shot_id.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise StoreFormatError(f"shot id too long ({len(raw)} bytes)")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
    parts.append(store.matrix.astype("<f4", copy=False).tobytes(order="C"))
    return b"".join(parts)


def serialize_store(store: EmbeddingStore) -> bytes:
    payload = _payload_bytes(store)
    return MAGIC + payload + struct.pack("<Q", fnv1a64(payload))


def parse_store(data: bytes) -> EmbeddingStore:
    """Inverse of serialize_store; validates checksum and invariants."""
    if len(data) < len(MAGIC) + 8 + 8:
        raise StoreFormatError("store file truncated")
    if data[: len(MAGIC)] != MAGIC:
        raise StoreFormatError(f"bad magic {data[:8]!r}")
    payload = data[len(MAGIC):-8]
    (expected_sum,) = struct.unpack("<Q", data[-8:])
    actual_sum = fnv1a64(payload)
    if actual_sum != expected_sum:
        raise StoreFormatError(
            f"checksum mismatch: file says {expected_sum:#018x}, payload hashes to {actual_sum:#018x}"
        )
    off = 0
    count, dim = struct.unpack_from("<II", payload, off)
    off += 8
    ids = []
    for _ in range(count):
        if off + 2 > len(payload):
            raise StoreFormatError("store file truncated in id table")
        (id_len,) = struct.unpack_from("<H", payload, off)
        off += 2
        raw = payload[off: off + id_len]
        if len(raw) != id_len:
            raise StoreFormatError("store file truncated in id table")
        off += id_len
        ids.append(raw.decode("utf-8"))
    vec_bytes = payload[off:]
    if len(vec_bytes) != count * dim * 4:
        raise StoreFormatError(
            f"expected {count * dim * 4} vector bytes, found {len(vec_bytes)}"
        )
    matrix = np.frombuffer(vec_bytes, dtype="<f4").reshape(count, dim).astype(np.float32)
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicateId(dupes[0])
    if count:
        norms = np.sqrt(np.sum(np.square(matrix, dtype=np.float64), axis=1))
        bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]
        if bad.size:
            raise StoreFormatError(
                f"entry {ids[int(bad[0])]!r} is not unit-norm (|v|={norms[int(bad[0])]:.8f})"
            )
    store = EmbeddingStore(dim, ids, matrix)
    store._checksum = actual_sum
    return store


def save_store(store: EmbeddingStore, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_store(store))


def load_store(path) -> EmbeddingStore:
    with open(path, "rb") as fh:
        return parse_store(fh.read())


def read_text_vectors(data: bytes | str) -> tuple[list[tuple[str, list[float]]], int]:
    """Parse the plain-text ingest format: one `shot_id v1 v2 ...` per line.

    Returns (records, dim); dim is taken from the first data line. Blank
    lines and `#` comments are skipped.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    records: list[tuple[str, list[float]]] = []
    dim = 0
    for lineno, raw in enumerate(data.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise MalformedLine(lineno, "expected `shot_id v1 v2 ...`")
        shot_id, values = fields[0], fields[1:]
        try:
            vector = [float(v) for v in values]
        except ValueError:
            raise MalformedLine(lineno, f"non-numeric vector component in {line!r}") from None
        if dim == 0:
            dim = len(vector)
        elif len(vector) != dim:
            raise MalformedLine(lineno, f"expected {dim} components, got {len(vector)}")
        records.append((shot_id, vector))
    return records, dim
