"""Deterministic token-hash embedder used as the mock text/image encoder.

Each token is FNV-1a-hashed into one of dim signed buckets; the bucket
histogram is L2-normalized. The same text always embeds to the same unit
vector on every platform, and texts with disjoint tokens are close to
orthogonal once dim is a few hundred.
"""

from __future__ import annotations

import numpy as np

from .._hash import fnv1a64
from ..errors import EmptyText, ZeroVector
from ..text import tokenize

MIN_DIM = 8


def token_hash_embed(text: str, dim: int) -> np.ndarray:
    """Embed text into a unit-norm float32 vector of length dim (>= 8)."""
    if dim < MIN_DIM:
        raise ValueError(f"dim must be >= {MIN_DIM}, got {dim}")
    tokens = tokenize(text)
    if not tokens:
        raise EmptyText(f"no tokens survive tokenization of {text!r}")
    acc = np.zeros(dim, dtype=np.float64)
    for tok in tokens:
        h = fnv1a64(tok.encode("utf-8"))
        bucket = h % dim
        sign = 1.0 if (h >> 63) == 0 else -1.0
        acc[bucket] += sign
    norm = float(np.sqrt(np.sum(np.square(acc))))
    if norm == 0.0:
        raise ZeroVector(f"token signs cancel for {text!r}")
    return (acc / norm).astype(np.float32)
