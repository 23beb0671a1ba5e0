"""Embedding store: normalization, exact search, and the binary format."""

import numpy as np
import pytest

from garsearch.embedding import (
    EmbeddingStore,
    SearchHit,
    build_store,
    knn_search,
    normalize,
    parse_store,
    read_text_vectors,
    serialize_store,
)
from garsearch.errors import (
    DimMismatch,
    DuplicateId,
    MalformedLine,
    NonFinite,
    StoreFormatError,
    ZeroVector,
)


def brute_force_hits(store, query, k):
    """Independent scalar-float32 oracle for knn_search."""
    q = np.asarray(query, np.float32)
    norm = float(np.sqrt(np.sum(np.square(q, dtype=np.float64))))
    if abs(norm - 1.0) > 1e-6:
        q = (q.astype(np.float64) / norm).astype(np.float32)
    hits = []
    for shot_id, row in zip(store.ids, store.matrix):
        acc = np.float32(0.0)
        for a, b in zip(row, q):
            acc = np.float32(acc + np.float32(a * b))
        hits.append((shot_id, float(acc)))
    hits.sort(key=lambda t: (-t[1], t[0]))
    return hits[:k]


class TestNormalize:
    def test_three_four_five(self):
        assert normalize([3.0, 4.0]).tolist() == pytest.approx([0.6, 0.8], abs=1e-7)

    def test_already_unit(self):
        assert normalize([1.0, 0.0, 0.0]).tolist() == [1.0, 0.0, 0.0]

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            normalize([0.0, 0.0])

    def test_nan_rejected(self):
        with pytest.raises(NonFinite):
            normalize([1.0, float("nan")])

    def test_inf_rejected(self):
        with pytest.raises(NonFinite):
            normalize([1.0, float("inf")])

    def test_result_is_unit_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = rng.standard_normal(rng.integers(1, 40)) * rng.uniform(0.01, 100)
            unit = normalize(v)
            assert abs(float(np.linalg.norm(unit.astype(np.float64))) - 1.0) < 1e-6


class TestBuildStore:
    def test_two_records(self):
        store = build_store([("s1", [3.0, 4.0]), ("s2", [0.0, 1.0])], dim=2)
        assert len(store) == 2
        assert store.ids == ("s1", "s2")
        assert store.matrix[0].tolist() == pytest.approx([0.6, 0.8], abs=1e-7)

    def test_duplicate_id(self):
        with pytest.raises(DuplicateId) as exc:
            build_store([("s1", [1.0, 0.0]), ("s1", [0.0, 1.0])], dim=2)
        assert exc.value.shot_id == "s1"

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            build_store([("s1", [1.0, 0.0, 0.0])], dim=2)

    def test_zero_vector_names_shot(self):
        with pytest.raises(ZeroVector) as exc:
            build_store([("s9", [0.0, 0.0])], dim=2)
        assert "s9" in str(exc.value)

    def test_whitespace_id_rejected(self):
        with pytest.raises(StoreFormatError):
            build_store([("bad id", [1.0, 0.0])], dim=2)

    def test_empty_store_allowed(self):
        store = build_store([], dim=4)
        assert len(store) == 0


class TestKnnSearch:
    def test_query_equals_stored_vector(self):
        store = build_store([("s1", [1.0, 0.0]), ("s2", [0.0, 1.0])], dim=2)
        hits = knn_search(store, [1.0, 0.0], 2)
        assert hits == [SearchHit("s1", 1.0), SearchHit("s2", 0.0)]

    def test_hand_computed_dot_products(self):
        store = build_store(
            [("a", [1.0, 0.0]), ("b", [0.6, 0.8]), ("c", [0.0, 1.0])], dim=2)
        hits = knn_search(store, [0.8, 0.6], 2)
        assert [h.shot_id for h in hits] == ["b", "a"]
        assert hits[0].score == pytest.approx(0.96, abs=1e-6)
        assert hits[1].score == pytest.approx(0.8, abs=1e-6)
        # agrees with the brute-force oracle over all three entries
        assert [(h.shot_id, h.score) for h in knn_search(store, [0.8, 0.6], 3)] == \
            brute_force_hits(store, [0.8, 0.6], 3)

    def test_k_capped_at_store_size(self):
        store = build_store([("s1", [1.0, 0.0]), ("s2", [0.0, 1.0])], dim=2)
        assert len(knn_search(store, [1.0, 0.0], 10)) == 2

    def test_k_zero_gives_empty(self):
        store = build_store([("s1", [1.0, 0.0])], dim=2)
        assert knn_search(store, [1.0, 0.0], 0) == []

    def test_empty_store_gives_empty(self):
        store = build_store([], dim=2)
        assert knn_search(store, [1.0, 0.0], 5) == []

    def test_dim_mismatch(self):
        store = build_store([("s1", [1.0, 0.0])], dim=2)
        with pytest.raises(DimMismatch):
            knn_search(store, [1.0, 0.0, 0.0], 1)

    def test_zero_query_rejected(self):
        store = build_store([("s1", [1.0, 0.0])], dim=2)
        with pytest.raises(ZeroVector):
            knn_search(store, [0.0, 0.0], 1)

    def test_ties_broken_by_id_ascending(self):
        same = [0.6, 0.8]
        store = build_store(
            [("zz", same), ("aa", same), ("mm", same)], dim=2)
        hits = knn_search(store, same, 3)
        assert [h.shot_id for h in hits] == ["aa", "mm", "zz"]

    def test_scores_within_cosine_range(self):
        rng = np.random.default_rng(11)
        mat = rng.standard_normal((100, 16))
        store = build_store([(f"s{i:03d}", mat[i]) for i in range(100)], 16)
        hits = knn_search(store, rng.standard_normal(16), 100)
        for h in hits:
            assert -1.0 - 1e-6 <= h.score <= 1.0 + 1e-6

    def test_matches_brute_force_on_random_stores(self):
        rng = np.random.default_rng(42)
        for i in range(25):
            n = int(rng.integers(1, 120))
            d = int(rng.integers(2, 33))
            mat = rng.standard_normal((n, d))
            if n >= 2 and i % 2 == 0:
                mat[n - 1] = mat[0]  # exact tie
            store = build_store([(f"s{j:03d}", mat[j]) for j in range(n)], d)
            q = rng.standard_normal(d)
            got = [(h.shot_id, h.score) for h in knn_search(store, q, n)]
            assert got == brute_force_hits(store, q, n)

    def test_deterministic_across_calls(self):
        rng = np.random.default_rng(5)
        mat = rng.standard_normal((50, 8))
        store = build_store([(f"s{i:02d}", mat[i]) for i in range(50)], 8)
        q = rng.standard_normal(8)
        assert knn_search(store, q, 50) == knn_search(store, q, 50)


class TestBinaryFormat:
    def _store(self):
        rng = np.random.default_rng(17)
        mat = rng.standard_normal((7, 5))
        return build_store([(f"shot-{i}", mat[i]) for i in range(7)], 5)

    def test_round_trip_byte_identical(self):
        store = self._store()
        blob = serialize_store(store)
        again = serialize_store(parse_store(blob))
        assert blob == again

    def test_round_trip_preserves_everything(self):
        store = self._store()
        parsed = parse_store(serialize_store(store))
        assert parsed.ids == store.ids
        assert parsed.dim == store.dim
        assert np.array_equal(parsed.matrix, store.matrix)
        assert parsed.checksum == store.checksum

    def test_magic_header(self):
        assert serialize_store(self._store())[:8] == b"GAREMB1\n"

    def test_bad_magic_rejected(self):
        blob = bytearray(serialize_store(self._store()))
        blob[0] ^= 0xFF
        with pytest.raises(StoreFormatError):
            parse_store(bytes(blob))

    def test_corrupted_payload_rejected(self):
        blob = bytearray(serialize_store(self._store()))
        blob[len(blob) // 2] ^= 0x01
        with pytest.raises(StoreFormatError):
            parse_store(bytes(blob))

    def test_truncated_rejected(self):
        blob = serialize_store(self._store())
        with pytest.raises(StoreFormatError):
            parse_store(blob[: len(blob) - 3])

    def test_utf8_ids_survive(self):
        store = build_store([("Ω-shot", [1.0, 0.0])], dim=2)
        assert parse_store(serialize_store(store)).ids == ("Ω-shot",)


class TestTextIngest:
    def test_parses_records_and_dim(self):
        records, dim = read_text_vectors("# comment\ns1 1 0\ns2 0 1\n\n")
        assert dim == 2
        assert records == [("s1", [1.0, 0.0]), ("s2", [0.0, 1.0])]

    def test_bad_component(self):
        with pytest.raises(MalformedLine) as exc:
            read_text_vectors("s1 1 x\n")
        assert exc.value.lineno == 1

    def test_inconsistent_dim(self):
        with pytest.raises(MalformedLine) as exc:
            read_text_vectors("s1 1 0\ns2 1 2 3\n")
        assert exc.value.lineno == 2

    def test_missing_vector(self):
        with pytest.raises(MalformedLine):
            read_text_vectors("justanid\n")
