"""HTTP facade over the retrieval library.

Every endpoint is a thin adapter: the response body is the result of the
corresponding library call on the same inputs, so service behaviour and
library behaviour cannot drift apart. Session endpoints add the one piece
of state the manual-query workflow needs; the export gate refuses any
manual run whose selected or edited query still contains terms outside
the concept bank.
"""

from __future__ import annotations

import base64
import logging
from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..embedding import EmbeddingStore, load_store
from ..errors import (
    AllChannelsFailed,
    GarError,
    IncompleteSelections,
    OovViolation,
    StoreUnavailable,
)
from ..evaluation import EvalConfig, evaluate_run, report_as_dict
from ..fusion import FusionSpec, Run, ScoredList, fuse, fuse_runs
from ..generation.concept_bank import ConceptBank, detect_oov, load_concept_bank
from ..generation.fixtures import tv24_mock_backend
from ..generation.http import HttpGeneratorBackend
from ..generation.mocks import load_substitutions, mock_backend
from ..generation.variants import GeneratorConfig, QueryVariantSet, generate_variants
from ..pipeline import search_image_variant, search_text_variant
from ..trec_io import Topic, parse_qrels, parse_topics, read_run, write_run
from .config import ServiceConfig
from .sessions import Selection, Session, SessionStore, _variants_to_json

log = logging.getLogger(__name__)

TEXTUAL_CHANNELS = ("original", "t2t", "i2t")

_STATUS = {
    "OovViolation": 409,
    "IncompleteSelections": 409,
    "AllChannelsFailed": 502,
    "StoreUnavailable": 503,
    "GeneratorRequestFailed": 502,
}


class AppState:
    def __init__(self, config: ServiceConfig,
                 store: EmbeddingStore | None = None,
                 bank: ConceptBank | None = None,
                 topics: list[Topic] | None = None,
                 backend=None):
        self.config = config
        self.store = store
        self.bank = bank
        self.topics = {t.topic_id: t for t in (topics or [])}
        self.backend = backend
        self.sessions = SessionStore(config.journal_path or None)

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "AppState":
        store = load_store(config.store_path) if config.store_path else None
        bank = load_concept_bank(config.concepts_path) if config.concepts_path else None
        topics = []
        if config.topics_path:
            with open(config.topics_path, "rb") as fh:
                topics = parse_topics(fh.read())
        if config.mode == "http":
            backend = HttpGeneratorBackend(config.generator_url)
        elif config.substitutions_path:
            backend = mock_backend(
                dim=config.dim, substitutions=load_substitutions(config.substitutions_path))
        else:
            backend = tv24_mock_backend(dim=config.dim)
        return cls(config, store, bank, topics, backend)

    def generator_config(self, seed: int | None = None,
                         n_t2t: int | None = None,
                         n_images: int | None = None,
                         channels: list[str] | None = None) -> GeneratorConfig:
        return GeneratorConfig(
            n_t2t=n_t2t if n_t2t is not None else self.config.n_t2t,
            n_images=n_images if n_images is not None else self.config.n_images,
            seed=seed if seed is not None else self.config.seed,
            channels=frozenset(channels) if channels is not None
            else frozenset(("t2t", "t2i", "i2t")),
        )


# --- request bodies ---

class VariantsRequest(BaseModel):
    seed: Optional[int] = None
    n_t2t: Optional[int] = None
    n_images: Optional[int] = None
    channels: Optional[list[str]] = None  # subset of t2t,t2i,i2t; None = all


class FusionBody(BaseModel):
    normalization: str = "minmax"
    cutoff: int = 1000
    weights: Optional[list[float]] = None


class VariantSetBody(BaseModel):
    topic_id: int = 0
    t2t_texts: list[str] = []
    i2t_captions: list[str] = []
    t2i_images: list[str] = []  # base64 PNG


class SearchRequest(BaseModel):
    text: Optional[str] = None
    session_id: Optional[str] = None
    variant_set: Optional[VariantSetBody] = None
    k: Optional[int] = None
    fusion: FusionBody = FusionBody()


class SelectRequest(BaseModel):
    channel: str
    candidate_index: Optional[int] = None
    edited_text: Optional[str] = None


class ManualExportRequest(BaseModel):
    session_ids: list[str]
    run_tag: str
    k: Optional[int] = None
    include_original: bool = False
    fusion: FusionBody = FusionBody()


class FuseRequest(BaseModel):
    runs: list[str]
    run_tag: str
    weights: Optional[list[float]] = None
    normalization: str = "minmax"
    cutoff: int = 1000


class EvalRequest(BaseModel):
    run: str
    qrels: str
    metric: str = "xinfap"
    epsilon: float = 1e-5


def _error(status: int, code: str, detail: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail, **extra})


def _hits_json(sl: ScoredList) -> list[dict]:
    return [{"shot_id": doc, "score": score} for doc, score in sl.entries]


def _oov_report(state: AppState, variants: QueryVariantSet) -> dict:
    if state.bank is None:
        return {}
    return {
        "original": sorted(detect_oov(variants.topic.text, state.bank)),
        "t2t": [sorted(detect_oov(t, state.bank)) for t in variants.t2t_texts],
        "i2t": [sorted(detect_oov(c, state.bank)) for c in variants.i2t_captions],
    }


def _session_json(state: AppState, session: Session) -> dict:
    payload = _variants_to_json(session.variants)
    payload["session_id"] = session.session_id
    payload["created_at"] = session.created_at
    payload["oov_reports"] = _oov_report(state, session.variants)
    selections = {}
    for channel, sel in session.selections.items():
        text = session.selected_text(channel)
        entry = {
            "candidate_index": sel.candidate_index,
            "edited_text": sel.edited_text,
            "edited": sel.edited,
        }
        if text is not None:
            entry["text"] = text
            if state.bank is not None:
                entry["oov"] = sorted(detect_oov(text, state.bank))
        selections[channel] = entry
    payload["selections"] = selections
    return payload


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="garsearch service")
    cfg = state.config

    @app.exception_handler(GarError)
    async def _gar_error(_, exc: GarError):
        return _error(_STATUS.get(exc.code, 400), exc.code, exc.detail)

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "store_loaded": state.store is not None,
            "bank_loaded": state.bank is not None,
            "topics": len(state.topics),
            "mode": cfg.mode,
        }

    @app.get("/topics")
    def topics():
        return [
            {"topic_id": t.topic_id, "text": t.text}
            for t in sorted(state.topics.values(), key=lambda t: t.topic_id)
        ]

    @app.get("/concepts/oov")
    def concepts_oov(q: str = ""):
        if state.bank is None:
            return _error(503, "StoreUnavailable", "concept bank not loaded")
        return {"query": q, "oov": sorted(detect_oov(q, state.bank))}

    @app.post("/topics/{topic_id}/variants")
    def topic_variants(topic_id: int, req: VariantsRequest = VariantsRequest()):
        topic = state.topics.get(topic_id)
        if topic is None:
            return _error(404, "UnknownTopic", f"no topic {topic_id}")
        try:
            gen_cfg = state.generator_config(req.seed, req.n_t2t, req.n_images, req.channels)
        except ValueError as exc:
            return _error(400, "BadRequest", str(exc))
        variants = generate_variants(topic, gen_cfg, state.backend, state.bank)
        session = state.sessions.create(topic, variants)
        return _session_json(state, session)

    def _require_store() -> EmbeddingStore:
        if state.store is None:
            raise StoreUnavailable("no embedding store loaded")
        return state.store

    def _fusion_spec(body: FusionBody) -> FusionSpec:
        return FusionSpec(
            weights=tuple(body.weights) if body.weights else None,
            normalization=body.normalization,
            cutoff=body.cutoff,
        )

    @app.post("/search")
    def search(req: SearchRequest):
        store = _require_store()
        k = req.k if req.k is not None else cfg.k
        spec = _fusion_spec(req.fusion)
        channel_lists: dict[str, ScoredList] = {}
        if req.text is not None:
            if req.text.strip():
                channel_lists["original"] = search_text_variant(
                    req.text, store, k, state.backend, 0, "original")
            elif k:
                return _error(400, "EmptyText", "text must be non-empty")
        elif req.session_id is not None:
            session = state.sessions.get(req.session_id)
            if session is None:
                return _error(404, "UnknownSession", f"no session {req.session_id}")
            for channel in TEXTUAL_CHANNELS:
                text = session.selected_text(channel)
                if text:
                    channel_lists[channel] = search_text_variant(
                        text, store, k, state.backend, session.topic.topic_id, channel)
            images = session.selected_images()
            if images:
                channel_lists["t2i"] = search_image_variant(
                    images, store, k, state.backend, session.topic.topic_id, spec)
        elif req.variant_set is not None:
            vs = req.variant_set
            if vs.t2t_texts:
                lists = [
                    search_text_variant(t, store, k, state.backend, vs.topic_id, "t2t")
                    for t in vs.t2t_texts
                ]
                lists = [sl for sl in lists if sl.entries]
                if lists:
                    channel_lists["t2t"] = fuse(lists, replace(spec, weights=None), tag="t2t")
            if vs.i2t_captions:
                lists = [
                    search_text_variant(c, store, k, state.backend, vs.topic_id, "i2t")
                    for c in vs.i2t_captions
                ]
                lists = [sl for sl in lists if sl.entries]
                if lists:
                    channel_lists["i2t"] = fuse(lists, replace(spec, weights=None), tag="i2t")
            if vs.t2i_images:
                payloads = [base64.b64decode(b) for b in vs.t2i_images]
                channel_lists["t2i"] = search_image_variant(
                    payloads, store, k, state.backend, vs.topic_id, spec)
        else:
            return _error(400, "BadRequest", "provide text, session_id, or variant_set")

        present = [sl for sl in channel_lists.values() if sl.entries]
        if present:
            fused = fuse(present, replace(spec, weights=None), tag="fused")
            fused_json = _hits_json(fused)
        else:
            fused_json = []
        return {
            "k": k,
            "channels": {ch: _hits_json(sl) for ch, sl in channel_lists.items()},
            "fused": fused_json,
        }

    @app.post("/sessions/{session_id}/select")
    def select(session_id: str, req: SelectRequest):
        try:
            selection = Selection(req.channel, req.candidate_index, req.edited_text)
        except ValueError as exc:
            return _error(400, "BadSelection", str(exc))
        try:
            session = state.sessions.select(session_id, selection)
        except KeyError:
            return _error(404, "UnknownSession", f"no session {session_id}")
        except IndexError as exc:
            return _error(400, "BadSelection", str(exc))
        return _session_json(state, session)

    @app.post("/runs/manual-export")
    def manual_export(req: ManualExportRequest):
        if not req.run_tag or any(ch.isspace() for ch in req.run_tag):
            return _error(400, "BadRunTag", f"run tag {req.run_tag!r} must have no whitespace")
        store = _require_store()
        if state.bank is None:
            return _error(503, "StoreUnavailable", "concept bank not loaded")
        sessions: list[Session] = []
        for sid in req.session_ids:
            session = state.sessions.get(sid)
            if session is None:
                return _error(404, "UnknownSession", f"no session {sid}")
            sessions.append(session)
        incomplete = [s.topic.topic_id for s in sessions if not s.selections]
        if incomplete:
            raise IncompleteSelections(incomplete)
        violations = []
        for session in sessions:
            terms: set[str] = set()
            for channel in TEXTUAL_CHANNELS:
                text = session.selected_text(channel)
                if text:
                    terms |= detect_oov(text, state.bank)
            if terms:
                violations.append((session.topic.topic_id, sorted(terms)))
        if violations:
            first = OovViolation(violations[0][0], violations[0][1])
            return _error(409, "OovViolation", first.detail, violations=[
                {"topic_id": tid, "terms": terms} for tid, terms in violations
            ])
        k = req.k if req.k is not None else cfg.k
        spec = _fusion_spec(req.fusion)
        lists: dict[int, ScoredList] = {}
        for session in sessions:
            topic_id = session.topic.topic_id
            parts: list[ScoredList] = []
            if req.include_original:
                parts.append(search_text_variant(
                    session.topic.text, store, k, state.backend, topic_id, "original"))
            for channel in TEXTUAL_CHANNELS:
                text = session.selected_text(channel)
                if text:
                    parts.append(search_text_variant(
                        text, store, k, state.backend, topic_id, channel))
            images = session.selected_images()
            if images:
                parts.append(search_image_variant(
                    images, store, k, state.backend, topic_id, spec))
            parts = [p for p in parts if p.entries]
            if parts:
                lists[topic_id] = fuse(parts, replace(spec, weights=None), tag=req.run_tag)
            else:
                lists[topic_id] = ScoredList(topic_id, (), req.run_tag)
        run = Run(req.run_tag, lists)
        return Response(content=write_run(run), media_type="text/plain; charset=utf-8")

    @app.post("/fuse")
    def fuse_endpoint(req: FuseRequest):
        if not req.runs:
            return _error(400, "NoRuns", "no run files supplied")
        runs = [read_run(text) for text in req.runs]
        spec = FusionSpec(
            weights=tuple(req.weights) if req.weights else None,
            normalization=req.normalization,
            cutoff=req.cutoff,
        )
        fused = fuse_runs(runs, spec, req.run_tag)
        return Response(content=write_run(fused), media_type="text/plain; charset=utf-8")

    @app.post("/eval")
    def eval_endpoint(req: EvalRequest):
        run = read_run(req.run)
        qrels = parse_qrels(req.qrels)
        report = evaluate_run(run, qrels, EvalConfig(epsilon=req.epsilon), metric=req.metric)
        return report_as_dict(report)

    return app


def create_app_from_config(config: ServiceConfig) -> FastAPI:
    return create_app(AppState.from_config(config))
