"""OOV detection, prompt building, hash embedding, and the mock generators."""

import random

import numpy as np
import pytest
from PIL import Image
import io

from garsearch.errors import AllChannelsFailed, EmptyText
from garsearch.generation.concept_bank import bank_from_terms, detect_oov
from garsearch.generation.images import (
    PROVENANCE_KEY,
    provenance_of,
    read_png_texts,
    render_mock_images,
)
from garsearch.generation.mocks import (
    MockI2TClient,
    MockT2IClient,
    MockT2TClient,
    mock_backend,
)
from garsearch.generation.prompts import build_t2t_prompt
from garsearch.generation.text_embed import token_hash_embed
from garsearch.generation.variants import GeneratorConfig, generate_variants
from garsearch.text import stopwords, tokenize
from garsearch.trec_io import Topic


class TestTokenizer:
    def test_lowercase_alphanumeric(self):
        assert tokenize("Two women, outdoors! 42") == ["two", "women", "outdoors", "42"]

    def test_stopword_list_has_fifty_words(self):
        assert len(stopwords()) == 50


class TestDetectOov:
    def test_standing_in_line(self):
        bank = bank_from_terms(["people", "outdoors", "lineup"])
        oov = detect_oov("Find shots of people standing in line outdoors", bank)
        assert oov == {"standing", "line"}

    def test_full_coverage(self):
        bank = bank_from_terms(["people", "outdoors"])
        assert detect_oov("people outdoors", bank) == set()

    def test_empty_query(self):
        bank = bank_from_terms(["people"])
        assert detect_oov("", bank) == set()

    def test_phrase_covers_tokens(self):
        bank = bank_from_terms(["people", "outdoors", "standing in line"])
        oov = detect_oov("Find shots of people standing in line outdoors", bank)
        assert oov == set()

    def test_phrase_must_be_contiguous(self):
        bank = bank_from_terms(["standing in line"])
        assert "standing" in detect_oov("standing near a line", bank)

    def test_adding_concepts_is_monotone(self):
        rng = random.Random(31)
        vocab = [f"w{i}" for i in range(40)]
        for _ in range(50):
            query = " ".join(rng.sample(vocab, rng.randint(1, 10)))
            terms = set(rng.sample(vocab, rng.randint(1, 20)))
            bank = bank_from_terms(terms)
            bigger = bank_from_terms(terms | {rng.choice(vocab)})
            assert detect_oov(query, bigger) <= detect_oov(query, bank)

    def test_subset_of_query_tokens(self):
        bank = bank_from_terms(["anything"])
        query = "people walking dogs outdoors"
        assert detect_oov(query, bank) <= set(tokenize(query))


class TestT2TPrompt:
    def test_contains_query_text(self):
        bank = bank_from_terms(["bald", "man", "glasses"])
        topic = Topic(751, "A bald man with glasses")
        prompt = build_t2t_prompt(topic, bank, set())
        assert "A bald man with glasses" in prompt

    def test_lists_oov_terms(self):
        bank = bank_from_terms(["people"])
        prompt = build_t2t_prompt(Topic(1, "x"), bank, {"standing", "line"})
        assert "line, standing" in prompt

    def test_concept_cap_at_2000(self):
        bank = bank_from_terms([f"concept{i:04d}" for i in range(5000)])
        prompt = build_t2t_prompt(Topic(1, "query"), bank, set())
        concept_part = prompt.split("Known concepts: ")[1].strip()
        assert len(concept_part.split(", ")) == 2000

    def test_versioned(self):
        bank = bank_from_terms(["people"])
        assert "[t2t-prompt/v1]" in build_t2t_prompt(Topic(1, "x"), bank, set())


class TestTokenHashEmbed:
    def test_deterministic(self):
        a = token_hash_embed("dog", 256)
        b = token_hash_embed("dog", 256)
        assert np.array_equal(a, b)

    def test_repetition_preserves_direction(self):
        a = token_hash_embed("dog", 256)
        b = token_hash_embed("dog dog", 256)
        assert float(np.dot(a.astype(np.float64), b.astype(np.float64))) == pytest.approx(1.0, abs=1e-6)

    def test_no_tokens(self):
        with pytest.raises(EmptyText):
            token_hash_embed("!!!", 64)

    def test_min_dim(self):
        with pytest.raises(ValueError):
            token_hash_embed("dog", 4)

    def test_unit_norm(self):
        rng = random.Random(17)
        for _ in range(30):
            text = " ".join(f"tok{rng.randint(0, 500)}" for _ in range(rng.randint(1, 12)))
            v = token_hash_embed(text, 128)
            assert abs(float(np.linalg.norm(v.astype(np.float64))) - 1.0) < 1e-6

    def test_disjoint_texts_near_orthogonal(self):
        # at dim 256, |cos| < 0.25 must hold for at least 95% of pairs
        rng = random.Random(99)
        hits = 0
        trials = 300
        for i in range(trials):
            a = " ".join(f"a{i}x{j}" for j in range(rng.randint(3, 10)))
            b = " ".join(f"b{i}y{j}" for j in range(rng.randint(3, 10)))
            va = token_hash_embed(a, 256).astype(np.float64)
            vb = token_hash_embed(b, 256).astype(np.float64)
            if abs(float(np.dot(va, vb))) < 0.25:
                hits += 1
        assert hits / trials >= 0.95


class TestMockImages:
    def test_png_is_valid(self):
        (data,) = render_mock_images("a rainy day", 1, 0)
        img = Image.open(io.BytesIO(data))
        assert img.size == (64, 64)
        assert img.mode == "RGB"

    def test_provenance_embedded_in_itxt(self):
        (data,) = render_mock_images("a rainy day", 1, 0)
        assert read_png_texts(data)[PROVENANCE_KEY] == "a rainy day"
        assert provenance_of(data) == "a rainy day"

    def test_deterministic_bytes(self):
        assert render_mock_images("x", 3, 42) == render_mock_images("x", 3, 42)

    def test_seed_changes_pixels(self):
        (a,) = render_mock_images("x", 1, 1)
        (b,) = render_mock_images("x", 1, 2)
        assert a != b

    def test_images_in_one_batch_differ(self):
        a, b = render_mock_images("x", 2, 7)
        assert a != b

    def test_utf8_prompt_round_trips(self):
        (data,) = render_mock_images("café ☂", 1, 0)
        assert provenance_of(data) == "café ☂"


class TestMockClients:
    def test_t2t_substitution_example(self):
        client = MockT2TClient({"standing in line": "lineup"})
        texts = client.t2t("Find shots of people standing in line outdoors", [], [], 1)
        assert texts == ["Find shots of people lineup outdoors"]

    def test_t2t_identity_without_match(self):
        client = MockT2TClient({"standing in line": "lineup"})
        assert client.t2t("a red car", [], [], 1) == ["a red car"]

    def test_t2t_fixture_overrides(self):
        client = MockT2TClient({}, {"a red car": ["a crimson automobile"]})
        assert client.t2t("a red car", [], [], 1) == ["a crimson automobile"]

    def test_t2t_pads_to_n(self):
        client = MockT2TClient()
        assert client.t2t("a red car", [], [], 3) == ["a red car"] * 3

    def test_t2i_provenance_is_request_prompt(self):
        client = MockT2IClient()
        images = client.t2i("a red car", 2, 5)
        assert all(img.provenance_prompt == "a red car" for img in images)
        assert all(provenance_of(img.data) == "a red car" for img in images)

    def test_t2i_scene_fixture_changes_provenance(self):
        client = MockT2IClient({"a rainy day": "a woman with an umbrella"})
        (image,) = client.t2i("a rainy day", 1, 0)
        assert image.provenance_prompt == "a woman with an umbrella"

    def test_i2t_default_prefix(self):
        i2t = MockI2TClient()
        (image,) = MockT2IClient().t2i("a red car", 1, 0)
        assert i2t.i2t(image) == "a photo of a red car"

    def test_i2t_fixture_and_raw_bytes(self):
        i2t = MockI2TClient({"a red car": "a crimson convertible"})
        (image,) = MockT2IClient().t2i("a red car", 1, 0)
        assert i2t.i2t(image) == "a crimson convertible"
        assert i2t.i2t(image.data) == "a crimson convertible"

    def test_embed_image_equals_embed_of_provenance(self):
        backend = mock_backend(dim=64)
        (image,) = backend.t2i("a red car", 1, 0)
        via_image = backend.embed_image([image])[0]
        via_text = token_hash_embed("a red car", 64)
        assert np.array_equal(via_image, via_text)


class TestGenerateVariants:
    def _topic(self):
        return Topic(801, "Find shots of people standing in line outdoors")

    def test_all_channels_produce(self):
        backend = mock_backend(substitutions={"standing in line": "lineup"})
        cfg = GeneratorConfig(n_images=2, seed=3)
        vs = generate_variants(self._topic(), cfg, backend)
        assert vs.t2t_texts == ("Find shots of people lineup outdoors",)
        assert len(vs.t2i_images) == 2
        assert len(vs.i2t_captions) == 2
        assert vs.warnings == ()

    def test_topic_752_fixture_caption(self):
        from garsearch.generation.fixtures import tv24_mock_backend, tv24_topics

        backend = tv24_mock_backend()
        topic = next(t for t in tv24_topics() if t.topic_id == 752)
        vs = generate_variants(topic, GeneratorConfig(n_images=1), backend)
        assert vs.i2t_captions == (
            "a woman with an umbrella walking on the street in the rain",)

    def test_channels_disabled(self):
        backend = mock_backend()
        cfg = GeneratorConfig(channels=frozenset())
        vs = generate_variants(self._topic(), cfg, backend)
        assert vs.t2t_texts == () and vs.t2i_images == () and vs.i2t_captions == ()

    def test_failed_channel_degrades(self):
        backend = mock_backend()

        def boom(*args, **kwargs):
            raise RuntimeError("model down")

        backend.t2t = boom
        vs = generate_variants(self._topic(), GeneratorConfig(n_images=1), backend)
        assert vs.t2t_texts == ()
        assert len(vs.t2i_images) == 1
        assert any("t2t failed" in w for w in vs.warnings)

    def test_all_channels_failed(self):
        backend = mock_backend()

        def boom(*args, **kwargs):
            raise RuntimeError("down")

        backend.t2t = boom
        backend.t2i = boom
        with pytest.raises(AllChannelsFailed):
            generate_variants(self._topic(), GeneratorConfig(), backend)

    def test_i2t_skipped_when_t2i_fails(self):
        backend = mock_backend(substitutions={"standing in line": "lineup"})

        def boom(*args, **kwargs):
            raise RuntimeError("down")

        backend.t2i = boom
        vs = generate_variants(self._topic(), GeneratorConfig(), backend)
        assert vs.t2t_texts  # t2t still answered
        assert vs.t2i_images == () and vs.i2t_captions == ()

    def test_deterministic_given_seed(self):
        backend = mock_backend(substitutions={"standing in line": "lineup"})
        cfg = GeneratorConfig(n_images=3, seed=11)
        a = generate_variants(self._topic(), cfg, backend)
        b = generate_variants(self._topic(), cfg, backend)
        assert a == b
        assert [i.data for i in a.t2i_images] == [i.data for i in b.t2i_images]

    def test_oov_passed_to_backend(self):
        seen = {}
        backend = mock_backend()
        original = backend.t2t

        def spy(query, concepts, oov, n):
            seen["oov"] = oov
            seen["concepts"] = concepts
            return original(query, concepts, oov, n)

        backend.t2t = spy
        bank = bank_from_terms(["people", "outdoors", "lineup"])
        generate_variants(self._topic(), GeneratorConfig(), backend, bank)
        assert seen["oov"] == ["line", "standing"]
        assert "lineup" in seen["concepts"]
