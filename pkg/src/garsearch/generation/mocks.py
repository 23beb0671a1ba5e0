"""Deterministic stand-ins for the generative and embedding models.

The mocks reproduce the shape and wire behaviour of the real services with
zero model weights: text rewriting via a phrase-substitution table (plus
optional per-query fixtures), image generation via seeded noise PNGs that
carry their prompt as provenance, captioning via provenance lookup, and
embedding via the token-hash embedder. Everything is a pure function of
its inputs and the configured seed.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Mapping

import numpy as np

from .images import mock_image_stream_seed, provenance_of, render_mock_images
from .text_embed import token_hash_embed
from .variants import GeneratedImage

CAPTION_PREFIX = "a photo of "


def _compile_substitutions(table: Mapping[str, str]):
    # Longest phrase first so overlapping phrases resolve deterministically.
    ordered = sorted(table.items(), key=lambda kv: (-len(kv[0]), kv[0]))
    return [
        (re.compile(r"\b" + re.escape(phrase) + r"\b", re.IGNORECASE), repl)
        for phrase, repl in ordered
    ]


class MockT2TClient:
    """Rephrases queries by applying a phrase -> replacement table.

    An optional fixtures map (exact query text -> rephrasings) overrides
    the table, which is how recorded manual-run rewrites are replayed.
    """

    def __init__(self, substitutions: Mapping[str, str] | None = None,
                 fixtures: Mapping[str, Iterable[str]] | None = None):
        self._subs = _compile_substitutions(substitutions or {})
        self._fixtures = {q: tuple(texts) for q, texts in (fixtures or {}).items()}

    def t2t(self, query: str, concepts: list[str], oov: list[str], n: int) -> list[str]:
        fixed = self._fixtures.get(query)
        if fixed:
            texts = list(fixed)
        else:
            text = query
            for pattern, repl in self._subs:
                text = pattern.sub(repl, text)
            texts = [text]
        while len(texts) < n:
            texts.append(texts[-1])
        return texts[:n]


class MockT2IClient:
    """Generates seeded-noise PNGs whose provenance is the prompt used.

    By default the generation prompt is the request prompt verbatim. A
    scene_fixtures map (request prompt -> visual scene description) makes
    the mock "imagine" a concrete scene the way a real diffusion model
    would add visual context; the scene text becomes the provenance, so
    downstream mock embedding/captioning sees the scene, not the query.
    """

    def __init__(self, scene_fixtures: Mapping[str, str] | None = None):
        self._scenes = dict(scene_fixtures or {})

    def t2i(self, prompt: str, n: int, seed: int) -> list[GeneratedImage]:
        used = self._scenes.get(prompt, prompt)
        stream_seed = mock_image_stream_seed(used, seed)
        return [
            GeneratedImage(data, used, stream_seed)
            for data in render_mock_images(used, n, seed)
        ]


class MockI2TClient:
    """Captions an image from its provenance prompt.

    caption_fixtures maps a provenance prompt to a caption; otherwise the
    caption is the provenance prefixed with "a photo of ". Accepts either
    GeneratedImage values or raw PNG bytes (provenance read from iTXt).
    """

    def __init__(self, caption_fixtures: Mapping[str, str] | None = None):
        self._captions = dict(caption_fixtures or {})

    def i2t(self, image: GeneratedImage | bytes) -> str:
        prompt = image.provenance_prompt if isinstance(image, GeneratedImage) else provenance_of(image)
        return self._captions.get(prompt, CAPTION_PREFIX + prompt)


class MockEmbedClient:
    """Token-hash embedder for both texts and mock images."""

    def __init__(self, dim: int = 256):
        self.dim = dim

    def embed_text(self, texts: list[str]) -> np.ndarray:
        return np.vstack([token_hash_embed(t, self.dim) for t in texts])

    def embed_image(self, images: list[GeneratedImage | bytes]) -> np.ndarray:
        prompts = [
            img.provenance_prompt if isinstance(img, GeneratedImage) else provenance_of(img)
            for img in images
        ]
        return np.vstack([token_hash_embed(p, self.dim) for p in prompts])


class MockGeneratorBackend:
    """All five generator/embedding operations behind one object."""

    def __init__(self, t2t: MockT2TClient, t2i: MockT2IClient,
                 i2t: MockI2TClient, embed: MockEmbedClient):
        self._t2t = t2t
        self._t2i = t2i
        self._i2t = i2t
        self._embed = embed

    @property
    def dim(self) -> int:
        return self._embed.dim

    def t2t(self, query, concepts, oov, n):
        return self._t2t.t2t(query, concepts, oov, n)

    def t2i(self, prompt, n, seed):
        return self._t2i.t2i(prompt, n, seed)

    def i2t(self, image):
        return self._i2t.i2t(image)

    def embed_text(self, texts):
        return self._embed.embed_text(texts)

    def embed_image(self, images):
        return self._embed.embed_image(images)


def mock_backend(dim: int = 256,
                 substitutions: Mapping[str, str] | None = None,
                 t2t_fixtures: Mapping[str, Iterable[str]] | None = None,
                 scene_fixtures: Mapping[str, str] | None = None,
                 caption_fixtures: Mapping[str, str] | None = None) -> MockGeneratorBackend:
    return MockGeneratorBackend(
        MockT2TClient(substitutions, t2t_fixtures),
        MockT2IClient(scene_fixtures),
        MockI2TClient(caption_fixtures),
        MockEmbedClient(dim),
    )


def load_substitutions(path) -> dict[str, str]:
    """Substitution-table mock config: a JSON object phrase -> replacement."""
    with open(path, "r", encoding="utf-8") as fh:
        table = json.load(fh)
    if not isinstance(table, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in table.items()
    ):
        raise ValueError(f"{path}: substitution table must be a JSON object of strings")
    return table
