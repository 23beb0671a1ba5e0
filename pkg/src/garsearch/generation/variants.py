"""Query-variant generation: one topic in, a set of rewrites/images/captions out.

The three channels degrade independently: a failing generator empties its
channel and leaves a warning on the variant set, because a live search
system must still answer the topic. Only when every enabled channel fails
does generation abort.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..errors import AllChannelsFailed
from ..trec_io import Topic
from .concept_bank import ConceptBank, detect_oov
from .prompts import CONCEPT_SAMPLE_CAP, sample_concepts

log = logging.getLogger(__name__)

GENERATION_CHANNELS = ("t2t", "t2i", "i2t")


@dataclass(frozen=True)
class GeneratedImage:
    """An image payload (PNG bytes) plus the prompt and seed that made it."""

    data: bytes
    provenance_prompt: str
    seed: int

    def __post_init__(self):
        if not self.data:
            raise ValueError("image payload must be non-empty")


@dataclass(frozen=True)
class GeneratorConfig:
    n_t2t: int = 1
    n_images: int = 4
    seed: int = 0
    channels: frozenset[str] = frozenset(GENERATION_CHANNELS)
    concept_cap: int = CONCEPT_SAMPLE_CAP

    def __post_init__(self):
        unknown = set(self.channels) - set(GENERATION_CHANNELS)
        if unknown:
            raise ValueError(f"unknown generation channels {sorted(unknown)}")
        object.__setattr__(self, "channels", frozenset(self.channels))
        if "t2t" in self.channels and self.n_t2t < 1:
            raise ValueError("n_t2t must be >= 1 when t2t is enabled")
        if "t2i" in self.channels and self.n_images < 1:
            raise ValueError("n_images must be >= 1 when t2i is enabled")


@dataclass(frozen=True)
class QueryVariantSet:
    """A topic plus its generated rewrites, images, and image captions."""

    topic: Topic
    t2t_texts: tuple[str, ...] = ()
    t2i_images: tuple[GeneratedImage, ...] = ()
    i2t_captions: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.i2t_captions and len(self.i2t_captions) != len(self.t2i_images):
            raise ValueError(
                f"{len(self.i2t_captions)} captions for {len(self.t2i_images)} images"
            )


def generate_variants(topic: Topic, cfg: GeneratorConfig, backend,
                      bank: ConceptBank | None = None) -> QueryVariantSet:
    """Run the enabled channels for one topic through a generator backend.

    backend provides t2t(query, concepts, oov, n) -> [str],
    t2i(prompt, n, seed) -> [GeneratedImage], i2t(image) -> str.
    """
    oov = sorted(detect_oov(topic.text, bank)) if bank is not None else []
    concepts = sample_concepts(bank, cfg.concept_cap) if bank is not None else []

    failed: set[str] = set()
    warnings: list[str] = []

    t2t_texts: tuple[str, ...] = ()
    if "t2t" in cfg.channels:
        try:
            t2t_texts = tuple(backend.t2t(topic.text, concepts, oov, cfg.n_t2t))
        except Exception as exc:
            failed.add("t2t")
            warnings.append(f"t2t failed for topic {topic.topic_id}: {exc}")
            log.warning(warnings[-1])

    images: tuple[GeneratedImage, ...] = ()
    if "t2i" in cfg.channels:
        try:
            images = tuple(backend.t2i(topic.text, cfg.n_images, cfg.seed))
        except Exception as exc:
            failed.add("t2i")
            warnings.append(f"t2i failed for topic {topic.topic_id}: {exc}")
            log.warning(warnings[-1])

    captions: tuple[str, ...] = ()
    if "i2t" in cfg.channels:
        if "t2i" in failed:
            failed.add("i2t")
            warnings.append(f"i2t skipped for topic {topic.topic_id}: no images")
        else:
            try:
                captions = tuple(backend.i2t(img) for img in images)
            except Exception as exc:
                failed.add("i2t")
                captions = ()
                warnings.append(f"i2t failed for topic {topic.topic_id}: {exc}")
                log.warning(warnings[-1])

    if cfg.channels and failed >= cfg.channels:
        raise AllChannelsFailed(
            f"topic {topic.topic_id}: every enabled channel failed ({', '.join(sorted(failed))})"
        )
    return QueryVariantSet(topic, t2t_texts, images, captions, tuple(warnings))
