"""Generation-augmented retrieval: variants -> per-variant search -> fusion.

For each topic the pipeline runs up to four channels (the original query
plus the t2t/t2i/i2t generations), searches each against the embedding
store, and fuses the channel lists with equal weights. One invocation
yields the fused run and every per-channel run, so all the standard
channel-combination configurations fall out of a single pass. Channels
that fail for a topic are dropped from that topic's fusion with the
weights renormalized over what remains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from .embedding import EmbeddingStore, knn_search
from .errors import (
    AllImagesFailed,
    NoTopics,
    StoreUnavailable,
    VariantSearchFailed,
)
from .fusion import FusionSpec, Run, ScoredList, fuse
from .generation.concept_bank import ConceptBank
from .generation.variants import GeneratedImage, GeneratorConfig, generate_variants
from .trec_io import Topic

log = logging.getLogger(__name__)

ALL_CHANNELS = ("original", "t2t", "t2i", "i2t")


@dataclass(frozen=True)
class PipelineConfig:
    run_tag: str
    channels: tuple[str, ...] = ALL_CHANNELS
    k: int = 1000
    generator: GeneratorConfig = GeneratorConfig()
    fusion: FusionSpec = field(default_factory=FusionSpec)

    def __post_init__(self):
        if not self.run_tag or any(ch.isspace() for ch in self.run_tag):
            raise ValueError(f"run tag {self.run_tag!r} must be non-empty without whitespace")
        unknown = set(self.channels) - set(ALL_CHANNELS)
        if unknown:
            raise ValueError(f"unknown channels {sorted(unknown)}")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        # Generation only needs the channels that will actually be searched.
        gen_channels = frozenset(self.channels) & {"t2t", "t2i", "i2t"}
        if "i2t" in gen_channels:
            gen_channels = gen_channels | {"t2i"}  # captions need images
        object.__setattr__(self, "generator", replace(self.generator, channels=gen_channels))


def search_text_variant(text: str, store: EmbeddingStore, k: int, backend,
                        topic_id: int, channel: str) -> ScoredList:
    """Embed one text and search the store; tag the list with its channel."""
    if not text or not text.strip():
        raise VariantSearchFailed(channel, "empty query text")
    try:
        vector = backend.embed_text([text])[0]
        hits = knn_search(store, vector, k)
    except Exception as exc:
        raise VariantSearchFailed(channel, str(exc)) from exc
    return ScoredList(topic_id, tuple(hits), channel)


def search_image_variant(images: Sequence[GeneratedImage], store: EmbeddingStore,
                         k: int, backend, topic_id: int,
                         fusion_spec: FusionSpec | None = None) -> ScoredList:
    """Search each image separately and fuse the per-image lists equally."""
    if not images:
        raise AllImagesFailed(f"topic {topic_id}: no images to search")
    lists: list[ScoredList] = []
    for idx, image in enumerate(images):
        try:
            vector = backend.embed_image([image])[0]
            hits = knn_search(store, vector, k)
        except Exception as exc:
            log.warning("topic %s: image %d failed: %s", topic_id, idx, exc)
            continue
        if hits:
            lists.append(ScoredList(topic_id, tuple(hits), f"t2i[{idx}]"))
    if not lists:
        raise AllImagesFailed(f"topic {topic_id}: every image failed to search")
    spec = fusion_spec or FusionSpec()
    return fuse(lists, replace(spec, weights=None), tag="t2i")


def _fuse_texts(texts: Sequence[str], store, k, backend, topic_id, channel,
                spec: FusionSpec) -> ScoredList:
    lists = [
        search_text_variant(text, store, k, backend, topic_id, channel)
        for text in texts
        if text and text.strip()
    ]
    lists = [sl for sl in lists if sl.entries]
    if not lists:
        raise VariantSearchFailed(channel, "no searchable texts")
    if len(lists) == 1:
        return ScoredList(topic_id, lists[0].entries, channel)
    return fuse(lists, replace(spec, weights=None), tag=channel)


class GarResult(NamedTuple):
    """Fused run plus one run per enabled channel."""

    fused: Run
    channels: dict[str, Run]
    warnings: tuple[str, ...]


def run_gar(topics: Sequence[Topic], cfg: PipelineConfig, store: EmbeddingStore,
            backend, bank: ConceptBank | None = None) -> GarResult:
    """Run the full pipeline over a topic set.

    Returns the equal-weight fusion of all enabled channels as the main
    run, and each channel's own run under the tag `<run_tag>.<channel>`.
    Deterministic for a fixed (topics, cfg, store, backend) combination.
    """
    if not topics:
        raise NoTopics("run_gar needs at least one topic")
    if store is None:
        raise StoreUnavailable("no embedding store loaded")
    channel_lists: dict[str, dict[int, ScoredList]] = {ch: {} for ch in cfg.channels}
    fused_lists: dict[int, ScoredList] = {}
    warnings: list[str] = []

    def warn(message: str) -> None:
        warnings.append(message)
        log.warning(message)

    for topic in topics:
        per_channel: dict[str, ScoredList] = {}

        if "original" in cfg.channels:
            try:
                per_channel["original"] = search_text_variant(
                    topic.text, store, cfg.k, backend, topic.topic_id, "original")
            except VariantSearchFailed as exc:
                warn(f"topic {topic.topic_id}: original search failed: {exc.detail}")

        needs_generation = any(ch in cfg.channels for ch in ("t2t", "t2i", "i2t"))
        variants = None
        if needs_generation:
            try:
                variants = generate_variants(topic, cfg.generator, backend, bank)
                warnings.extend(variants.warnings)
            except Exception as exc:
                warn(f"topic {topic.topic_id}: generation failed: {exc}")

        if variants is not None:
            if "t2t" in cfg.channels and variants.t2t_texts:
                try:
                    per_channel["t2t"] = _fuse_texts(
                        variants.t2t_texts, store, cfg.k, backend,
                        topic.topic_id, "t2t", cfg.fusion)
                except VariantSearchFailed as exc:
                    warn(f"topic {topic.topic_id}: t2t search failed: {exc.detail}")
            if "t2i" in cfg.channels and variants.t2i_images:
                try:
                    per_channel["t2i"] = search_image_variant(
                        variants.t2i_images, store, cfg.k, backend,
                        topic.topic_id, cfg.fusion)
                except AllImagesFailed as exc:
                    warn(f"topic {topic.topic_id}: t2i search failed: {exc.detail}")
            if "i2t" in cfg.channels and variants.i2t_captions:
                try:
                    per_channel["i2t"] = _fuse_texts(
                        variants.i2t_captions, store, cfg.k, backend,
                        topic.topic_id, "i2t", cfg.fusion)
                except VariantSearchFailed as exc:
                    warn(f"topic {topic.topic_id}: i2t search failed: {exc.detail}")

        for channel, sl in per_channel.items():
            channel_lists[channel][topic.topic_id] = sl

        present = [per_channel[ch] for ch in cfg.channels if ch in per_channel and per_channel[ch].entries]
        if present:
            fused_lists[topic.topic_id] = fuse(
                present, replace(cfg.fusion, weights=None), tag=cfg.run_tag)
        else:
            warn(f"topic {topic.topic_id}: no channel produced results")
            fused_lists[topic.topic_id] = ScoredList(topic.topic_id, (), cfg.run_tag)

    fused = Run(cfg.run_tag, fused_lists)
    channel_runs = {
        channel: Run(f"{cfg.run_tag}.{channel}", {
            tid: ScoredList(tid, sl.entries, f"{cfg.run_tag}.{channel}")
            for tid, sl in lists.items()
        })
        for channel, lists in channel_lists.items()
        if lists
    }
    return GarResult(fused, channel_runs, tuple(warnings))
