"""Bundled tv24 fixtures: the 20 main-task topics and the recorded
manually-selected rewrites and captions, wired into the mock backend.

The caption/rewrite tables are stored per topic id; the mock clients key
on query text (the wire protocol carries no topic ids), so the loaders
join the tables against the topics file.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from ..trec_io import Topic, parse_topics
from .mocks import MockGeneratorBackend, mock_backend


def _data_text(name: str) -> str:
    return resources.files("garsearch").joinpath(f"data/{name}").read_text("utf-8")


@lru_cache(maxsize=1)
def tv24_topics() -> tuple[Topic, ...]:
    """The 20 bundled main-task topics (ids 751-770)."""
    return tuple(parse_topics(_data_text("topics_tv24.tsv")))


def _int_keyed(name: str) -> dict[int, str]:
    return {int(k): v for k, v in json.loads(_data_text(name)).items()}


@lru_cache(maxsize=1)
def tv24_i2t_captions() -> dict[int, str]:
    """Recorded image captions, topic id -> caption."""
    return _int_keyed("i2t_captions_tv24.json")


@lru_cache(maxsize=1)
def tv24_t2t_selected() -> dict[int, str]:
    """Recorded selected text rewrites, topic id -> rewrite.

    Topic 759 is absent: its rewrite is garbled in the source table.
    """
    return _int_keyed("t2t_selected_tv24.json")


@lru_cache(maxsize=1)
def tv24_manual_queries() -> dict[int, str]:
    """Recorded manually formulated queries, topic id -> query."""
    return _int_keyed("manual_queries_tv24.json")


def tv24_mock_backend(dim: int = 256) -> MockGeneratorBackend:
    """Mock backend that replays the bundled tv24 rewrites and captions.

    Caption and rewrite fixtures are keyed by the topic's original query
    text, which is also the default image provenance, so captioning a
    topic's generated images yields the recorded caption.
    """
    by_id = {t.topic_id: t.text for t in tv24_topics()}
    captions = {by_id[tid]: cap for tid, cap in tv24_i2t_captions().items() if tid in by_id}
    rewrites = {by_id[tid]: [text] for tid, text in tv24_t2t_selected().items() if tid in by_id}
    return mock_backend(dim=dim, t2t_fixtures=rewrites, caption_fixtures=captions)
