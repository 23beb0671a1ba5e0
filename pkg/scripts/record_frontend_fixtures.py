"""Record real service responses as frontend test fixtures.

Runs the HTTP service in-process over the bundled tv24 fixtures plus a
small deterministic store, walks the manual-query workflow for topic 752,
and freezes every response the UI consumes into frontend/fixtures/. The
frontend snapshot tests replay these files through a mocked fetch, so any
drift between service and UI expectations shows up as a test failure.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from garsearch.embedding import build_store
from garsearch.generation.concept_bank import bank_from_terms
from garsearch.generation.fixtures import tv24_i2t_captions, tv24_mock_backend, tv24_topics
from garsearch.generation.text_embed import token_hash_embed
from garsearch.service.app import AppState, create_app
from garsearch.service.config import ServiceConfig
from garsearch.text import tokenize

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"

DIM = 128

SHOTS = {
    "v3c2-shot-0001": "a woman with an umbrella walking on a rainy street",
    "v3c2-shot-0002": "a rainy day outdoors people running",
    "v3c2-shot-0003": "a bald man with glasses reading",
    "v3c2-shot-0004": "a sunny park with children playing",
    "v3c2-shot-0005": "rain falling on a city street at night",
}


def build_state() -> AppState:
    store = build_store(
        [(sid, token_hash_embed(text, DIM)) for sid, text in SHOTS.items()], DIM)
    terms = set()
    for text in SHOTS.values():
        terms.update(tokenize(text))
    for topic in tv24_topics():
        terms.update(tokenize(topic.text))
    for caption in tv24_i2t_captions().values():
        terms.update(tokenize(caption))
    bank = bank_from_terms(terms, source_path="<fixture>")
    return AppState(
        ServiceConfig(k=20, seed=5, n_images=1),
        store=store,
        bank=bank,
        topics=list(tv24_topics()),
        backend=tv24_mock_backend(dim=DIM),
    )


def dump(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / name
    if isinstance(payload, bytes):
        path.write_bytes(payload)
    else:
        path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
    print(f"wrote {path}")


def main() -> None:
    client = TestClient(create_app(build_state()))

    dump("topics.json", client.get("/topics").json())

    board = client.post("/topics/752/variants", json={"n_images": 1}).json()
    dump("variants_752.json", board)
    sid = board["session_id"]

    edited = client.post(f"/sessions/{sid}/select", json={
        "channel": "t2t", "edited_text": "a zorgon day outdoors"}).json()
    dump("select_752_oov_edit.json", edited)

    blocked = client.post("/runs/manual-export", json={
        "session_ids": [sid], "run_tag": "M.UI.1"})
    assert blocked.status_code == 409, blocked.text
    dump("export_409.json", blocked.json())

    fixed = client.post(f"/sessions/{sid}/select", json={
        "channel": "t2t", "edited_text": "a rainy day outdoors in street"}).json()
    dump("select_752_fixed.json", fixed)

    preview = client.post("/search", json={"session_id": sid, "k": 20}).json()
    dump("search_preview_752.json", preview)

    export = client.post("/runs/manual-export", json={
        "session_ids": [sid], "run_tag": "M.UI.1"})
    assert export.status_code == 200, export.text
    dump("manual_export.txt", export.content)


if __name__ == "__main__":
    main()
