"""Build an embedding store, round-trip the binary format, run exact search.

Shots are embedded with the deterministic token-hash embedder so the whole
demo is reproducible without any model weights.
"""

from garsearch import build_store, knn_search, parse_store
from garsearch.embedding import serialize_store
from garsearch.generation import token_hash_embed

DIM = 128

SHOTS = {
    "v3c2-001": "a red sports car driving on a highway",
    "v3c2-002": "a dog running on a beach at sunset",
    "v3c2-003": "two people walking in the rain with umbrellas",
    "v3c2-004": "a chef cooking pasta in a restaurant kitchen",
    "v3c2-005": "a red car parked in front of a cafe",
}

store = build_store(
    [(sid, token_hash_embed(text, DIM)) for sid, text in SHOTS.items()], DIM)
print(f"store: {len(store)} shots, dim {store.dim}, checksum {store.checksum:#018x}")

blob = serialize_store(store)
again = parse_store(blob)
print(f"binary round-trip: {len(blob)} bytes, byte-identical: {serialize_store(again) == blob}")

for query in ("a red car", "people walking in the rain"):
    hits = knn_search(store, token_hash_embed(query, DIM), k=3)
    print(f"\nquery: {query!r}")
    for rank, hit in enumerate(hits, 1):
        print(f"  {rank}. {hit.shot_id}  cos={hit.score:+.4f}  ({SHOTS[hit.shot_id]})")
