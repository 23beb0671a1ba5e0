"""The human-in-the-loop manual-run workflow against the HTTP service.

Generates variants for a topic, edits the rewrite, watches the export gate
reject the out-of-vocabulary edit, fixes it, and downloads the manual run.
Runs fully in-process via the test client; `garsearch serve --config ...`
exposes the same endpoints over a socket.
"""

from fastapi.testclient import TestClient

from garsearch import build_store
from garsearch.generation import mock_backend, token_hash_embed
from garsearch.generation.concept_bank import bank_from_terms
from garsearch.service.app import AppState, create_app
from garsearch.service.config import ServiceConfig
from garsearch.trec_io import Topic, read_run

DIM = 128

SHOTS = {
    "rel-1": "people lineup outdoors queue",
    "bad-1": "people standing near a line of trees",
    "oth-1": "a dog on a beach",
}

store = build_store([(sid, token_hash_embed(t, DIM)) for sid, t in SHOTS.items()], DIM)
bank = bank_from_terms(
    {tok for text in SHOTS.values() for tok in text.split()} - {"standing", "line"})
backend = mock_backend(dim=DIM, substitutions={"standing in line": "lineup"})
topic = Topic(801, "people standing in line outdoors")

state = AppState(ServiceConfig(k=3), store=store, bank=bank,
                 topics=[topic], backend=backend)
client = TestClient(create_app(state))

print("health:", client.get("/healthz").json())

board = client.post("/topics/801/variants", json={"n_images": 1}).json()
sid = board["session_id"]
print(f"\nsession {sid[:8]}… for topic 801")
print("  rewrite candidates:", board["t2t_texts"])
print("  captions:", board["i2t_captions"])
print("  OOV in original query:", board["oov_reports"]["original"])

client.post(f"/sessions/{sid}/select",
            json={"channel": "t2t", "edited_text": "people standing in line outside"})
blocked = client.post("/runs/manual-export",
                      json={"session_ids": [sid], "run_tag": "MANUAL.demo"})
print(f"\nexport with OOV edit -> HTTP {blocked.status_code}: "
      f"{blocked.json()['violations']}")

client.post(f"/sessions/{sid}/select",
            json={"channel": "t2t", "edited_text": "people lineup outdoors"})
ok = client.post("/runs/manual-export",
                 json={"session_ids": [sid], "run_tag": "MANUAL.demo"})
print(f"export after fix -> HTTP {ok.status_code}")
run = read_run(ok.content)
print(f"exported run {run.run_tag!r}: {run.lists[801].doc_ids()}")
