"""In-memory session store with optional append-only journaling.

A session captures one topic's generated variants and the human's
selections over them. Mutations are serialized per session; the journal
(one JSON object per line) replays on startup so a restarted service
keeps its sessions. Desk-scale by design: no database.
"""

from __future__ import annotations

import base64
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..generation.variants import GeneratedImage, QueryVariantSet
from ..trec_io import Topic

SELECTABLE_CHANNELS = ("original", "t2t", "t2i", "i2t")


@dataclass(frozen=True)
class Selection:
    """The human's choice for one channel: a candidate index or an edit."""

    channel: str
    candidate_index: int | None = None
    edited_text: str | None = None

    def __post_init__(self):
        if self.channel not in SELECTABLE_CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.candidate_index is None and self.edited_text is None:
            raise ValueError("selection needs candidate_index or edited_text")

    @property
    def edited(self) -> bool:
        return self.edited_text is not None


@dataclass
class Session:
    session_id: str
    topic: Topic
    variants: QueryVariantSet
    selections: dict[str, Selection] = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)

    def candidates(self, channel: str) -> tuple:
        if channel == "original":
            return (self.topic.text,)
        if channel == "t2t":
            return self.variants.t2t_texts
        if channel == "i2t":
            return self.variants.i2t_captions
        if channel == "t2i":
            return self.variants.t2i_images
        raise ValueError(f"unknown channel {channel!r}")

    def selected_text(self, channel: str) -> str | None:
        """Resolve the selected text for a textual channel, or None."""
        sel = self.selections.get(channel)
        if sel is None or channel == "t2i":
            return None
        if sel.edited_text is not None:
            return sel.edited_text
        return self.candidates(channel)[sel.candidate_index]

    def selected_images(self) -> tuple[GeneratedImage, ...]:
        sel = self.selections.get("t2i")
        if sel is None:
            return ()
        return (self.variants.t2i_images[sel.candidate_index],)


def _variants_to_json(variants: QueryVariantSet) -> dict:
    return {
        "topic_id": variants.topic.topic_id,
        "topic_text": variants.topic.text,
        "t2t_texts": list(variants.t2t_texts),
        "t2i_images": [
            {
                "png_base64": base64.b64encode(img.data).decode("ascii"),
                "provenance_prompt": img.provenance_prompt,
                "seed": img.seed,
            }
            for img in variants.t2i_images
        ],
        "i2t_captions": list(variants.i2t_captions),
        "warnings": list(variants.warnings),
    }


def _variants_from_json(obj: dict) -> QueryVariantSet:
    topic = Topic(obj["topic_id"], obj["topic_text"])
    images = tuple(
        GeneratedImage(
            base64.b64decode(img["png_base64"]), img["provenance_prompt"], img["seed"])
        for img in obj["t2i_images"]
    )
    return QueryVariantSet(
        topic, tuple(obj["t2t_texts"]), images, tuple(obj["i2t_captions"]),
        tuple(obj.get("warnings", ())),
    )


class SessionStore:
    """Thread-safe session registry with optional journal recovery."""

    def __init__(self, journal_path: str | Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None
        self._journal_lock = threading.Lock()
        if self._journal_path and self._journal_path.exists():
            self._replay()

    def __len__(self) -> int:
        return len(self._sessions)

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def create(self, topic: Topic, variants: QueryVariantSet) -> Session:
        session = Session(uuid.uuid4().hex, topic, variants)
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        self._append_journal({
            "event": "create",
            "session_id": session.session_id,
            "created_at": session.created_at,
            "variants": _variants_to_json(variants),
        })
        return session

    def select(self, session_id: str, selection: Selection) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        with self._locks[session_id]:
            if selection.candidate_index is not None:
                candidates = session.candidates(selection.channel)
                if not 0 <= selection.candidate_index < len(candidates):
                    raise IndexError(
                        f"candidate_index {selection.candidate_index} out of range "
                        f"(channel {selection.channel!r} has {len(candidates)} candidates)"
                    )
            session.selections[selection.channel] = selection
        self._append_journal({
            "event": "select",
            "session_id": session_id,
            "channel": selection.channel,
            "candidate_index": selection.candidate_index,
            "edited_text": selection.edited_text,
        })
        return session

    def _append_journal(self, record: dict) -> None:
        if self._journal_path is None:
            return
        line = json.dumps(record, ensure_ascii=False)
        with self._journal_lock:
            with open(self._journal_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def _replay(self) -> None:
        with open(self._journal_path, "r", encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.strip()
                if not raw:
                    continue
                record = json.loads(raw)
                if record["event"] == "create":
                    variants = _variants_from_json(record["variants"])
                    session = Session(
                        record["session_id"], variants.topic, variants,
                        created_at=record.get("created_at", 0.0),
                    )
                    self._sessions[session.session_id] = session
                    self._locks[session.session_id] = threading.Lock()
                elif record["event"] == "select":
                    session = self._sessions.get(record["session_id"])
                    if session is not None:
                        session.selections[record["channel"]] = Selection(
                            record["channel"], record["candidate_index"], record["edited_text"])
