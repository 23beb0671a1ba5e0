"""Service endpoints: thin-adapter equivalence, sessions, and the export gate."""

import base64

import pytest
from fastapi.testclient import TestClient

from garsearch.evaluation import EvalConfig, evaluate_run, report_as_dict
from garsearch.fusion import FusionSpec, fuse_runs
from garsearch.pipeline import search_text_variant
from garsearch.service.app import AppState, create_app
from garsearch.service.config import ServiceConfig
from garsearch.service.sessions import SessionStore, Selection
from garsearch.trec_io import parse_qrels, read_run, write_run


@pytest.fixture()
def state(corpus):
    config = ServiceConfig(k=50)
    return AppState(
        config,
        store=corpus.store,
        bank=corpus.bank,
        topics=list(corpus.topics),
        backend=corpus.backend,
    )


@pytest.fixture()
def client(state):
    return TestClient(create_app(state))


class TestBasics:
    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["store_loaded"] is True

    def test_topics_listing(self, client, corpus):
        body = client.get("/topics").json()
        assert [t["topic_id"] for t in body] == sorted(t.topic_id for t in corpus.topics)

    def test_oov_endpoint_matches_library(self, client, corpus):
        from garsearch.generation.concept_bank import detect_oov

        q = "people standing in line outdoors"
        body = client.get("/concepts/oov", params={"q": q}).json()
        assert body["oov"] == sorted(detect_oov(q, corpus.bank))


class TestVariants:
    def test_unknown_topic_404(self, client):
        response = client.post("/topics/999/variants", json={})
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownTopic"

    def test_variants_include_oov_and_images(self, client, corpus):
        topic_id = corpus.oov_topic_ids[0]
        body = client.post(f"/topics/{topic_id}/variants", json={"n_images": 2}).json()
        assert body["session_id"]
        assert body["t2t_texts"]
        assert len(body["t2i_images"]) == 2
        assert len(body["i2t_captions"]) == 2
        assert body["oov_reports"]["original"]  # planted OOV terms present
        png = base64.b64decode(body["t2i_images"][0]["png_base64"])
        assert png[:8] == b"\x89PNG\r\n\x1a\n"

    def test_tv24_topic_752_caption(self, corpus):
        from garsearch.generation.fixtures import tv24_mock_backend, tv24_topics

        state = AppState(
            ServiceConfig(), store=corpus.store, bank=corpus.bank,
            topics=list(tv24_topics()), backend=tv24_mock_backend(dim=corpus.store.dim))
        client = TestClient(create_app(state))
        body = client.post("/topics/752/variants", json={"n_images": 1}).json()
        assert body["i2t_captions"] == [
            "a woman with an umbrella walking on the street in the rain"]

    def test_all_channels_disabled_is_200_with_empty_lists(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        response = client.post(f"/topics/{topic_id}/variants", json={"channels": []})
        assert response.status_code == 200
        body = response.json()
        assert body["t2t_texts"] == []
        assert body["t2i_images"] == []
        assert body["i2t_captions"] == []

    def test_unknown_channel_400(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        response = client.post(f"/topics/{topic_id}/variants",
                               json={"channels": ["t2t", "bogus"]})
        assert response.status_code == 400


class TestSearch:
    def test_text_search_equals_library(self, client, corpus):
        body = client.post("/search", json={"text": "red sports car highway", "k": 10}).json()
        direct = search_text_variant(
            "red sports car highway", corpus.store, 10, corpus.backend, 0, "original")
        got = [(h["shot_id"], h["score"]) for h in body["channels"]["original"]]
        assert got == list(direct.entries)
        # single-channel fusion preserves the ranking (scores are normalized)
        assert [h["shot_id"] for h in body["fused"]] == \
            [h["shot_id"] for h in body["channels"]["original"]]

    def test_k_zero(self, client):
        body = client.post("/search", json={"text": "red car", "k": 0}).json()
        assert body["fused"] == []

    def test_missing_inputs_400(self, client):
        assert client.post("/search", json={}).status_code == 400

    def test_store_unavailable_503(self, corpus):
        state = AppState(ServiceConfig(), store=None, bank=corpus.bank,
                         topics=list(corpus.topics), backend=corpus.backend)
        client = TestClient(create_app(state))
        assert client.post("/search", json={"text": "x"}).status_code == 503

    def test_session_search_uses_selected_text(self, client, corpus):
        topic_id = corpus.oov_topic_ids[0]
        session = client.post(f"/topics/{topic_id}/variants", json={}).json()
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/select",
                    json={"channel": "t2t", "candidate_index": 0})
        body = client.post("/search", json={"session_id": sid, "k": 10}).json()
        selected = session["t2t_texts"][0]
        direct = search_text_variant(
            selected, corpus.store, 10, corpus.backend, topic_id, "t2t")
        got = [(h["shot_id"], h["score"]) for h in body["channels"]["t2t"]]
        assert got == list(direct.entries)
        # and differs from the original query's ranking on an OOV topic
        original = search_text_variant(
            session["topic_text"], corpus.store, 10, corpus.backend, topic_id, "o")
        assert got != list(original.entries)


class TestSelect:
    def test_select_candidate(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        sid = client.post(f"/topics/{topic_id}/variants", json={}).json()["session_id"]
        body = client.post(f"/sessions/{sid}/select",
                           json={"channel": "t2t", "candidate_index": 0}).json()
        assert body["selections"]["t2t"]["edited"] is False
        assert body["selections"]["t2t"]["text"]

    def test_edited_text_recomputes_oov(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        sid = client.post(f"/topics/{topic_id}/variants", json={}).json()["session_id"]
        body = client.post(f"/sessions/{sid}/select",
                           json={"channel": "t2t", "edited_text": "a zorgon outdoors"}).json()
        assert body["selections"]["t2t"]["edited"] is True
        assert body["selections"]["t2t"]["oov"] == ["zorgon"]

    def test_bad_candidate_index(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        sid = client.post(f"/topics/{topic_id}/variants", json={}).json()["session_id"]
        response = client.post(f"/sessions/{sid}/select",
                               json={"channel": "t2t", "candidate_index": 99})
        assert response.status_code == 400

    def test_unknown_session_404(self, client):
        response = client.post("/sessions/nope/select",
                               json={"channel": "t2t", "candidate_index": 0})
        assert response.status_code == 404

    def test_tv24_topic_770_selections(self, corpus):
        from garsearch.generation.fixtures import tv24_mock_backend, tv24_topics

        state = AppState(
            ServiceConfig(), store=corpus.store, bank=corpus.bank,
            topics=list(tv24_topics()), backend=tv24_mock_backend(dim=corpus.store.dim))
        client = TestClient(create_app(state))
        sid = client.post("/topics/770/variants", json={"n_images": 1}).json()["session_id"]
        body = client.post(f"/sessions/{sid}/select",
                           json={"channel": "t2t", "candidate_index": 0}).json()
        assert body["selections"]["t2t"]["text"] == "Two women wearing stylish hats outside"
        body = client.post(f"/sessions/{sid}/select",
                           json={"channel": "original",
                                 "edited_text": "Two women wearing hats outdoors"}).json()
        assert body["selections"]["original"]["edited"] is True
        assert body["selections"]["original"]["text"] == "Two women wearing hats outdoors"

    def test_sessions_isolated(self, client, corpus):
        t1, t2 = corpus.topics[0].topic_id, corpus.topics[1].topic_id
        sid1 = client.post(f"/topics/{t1}/variants", json={}).json()["session_id"]
        sid2 = client.post(f"/topics/{t2}/variants", json={}).json()["session_id"]
        client.post(f"/sessions/{sid1}/select",
                    json={"channel": "t2t", "candidate_index": 0})
        body = client.post(f"/sessions/{sid2}/select",
                           json={"channel": "i2t", "candidate_index": 0}).json()
        assert "t2t" not in body["selections"]


class TestManualExport:
    def _session_with_selection(self, client, topic_id, text=None):
        session = client.post(f"/topics/{topic_id}/variants", json={}).json()
        sid = session["session_id"]
        payload = {"channel": "t2t"}
        if text is None:
            payload["candidate_index"] = 0
        else:
            payload["edited_text"] = text
        response = client.post(f"/sessions/{sid}/select", json=payload)
        assert response.status_code == 200
        return sid

    def test_export_round_trips(self, client, corpus):
        sids = [
            self._session_with_selection(client, corpus.topics[0].topic_id),
            self._session_with_selection(client, corpus.topics[1].topic_id),
        ]
        response = client.post("/runs/manual-export",
                               json={"session_ids": sids, "run_tag": "manual.v1"})
        assert response.status_code == 200
        run = read_run(response.content)
        assert run.run_tag == "manual.v1"
        assert len(run.lists) == 2
        for line in response.content.decode().splitlines():
            assert line.endswith("manual.v1")

    def test_oov_selection_blocks_export(self, client, corpus):
        sid = self._session_with_selection(
            client, corpus.topics[0].topic_id, text="people near a zorgon outdoors")
        response = client.post("/runs/manual-export",
                               json={"session_ids": [sid], "run_tag": "manual"})
        assert response.status_code == 409
        body = response.json()
        assert body["error"] == "OovViolation"
        assert body["violations"][0]["terms"] == ["zorgon"]

    def test_fixing_the_term_unblocks(self, client, corpus):
        topic_id = corpus.oov_topic_ids[0]
        session = client.post(f"/topics/{topic_id}/variants", json={}).json()
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/select",
                    json={"channel": "t2t", "edited_text": "people zorgon outdoors"})
        blocked = client.post("/runs/manual-export",
                              json={"session_ids": [sid], "run_tag": "manual"})
        assert blocked.status_code == 409
        client.post(f"/sessions/{sid}/select",
                    json={"channel": "t2t", "edited_text": "people lineup outdoors"})
        ok = client.post("/runs/manual-export",
                         json={"session_ids": [sid], "run_tag": "manual"})
        assert ok.status_code == 200
        assert read_run(ok.content).run_tag == "manual"

    def test_image_selection_exports_via_image_search(self, client, corpus):
        topic_id = corpus.topics[0].topic_id
        session = client.post(f"/topics/{topic_id}/variants", json={"n_images": 2}).json()
        sid = session["session_id"]
        assert client.post(f"/sessions/{sid}/select",
                           json={"channel": "t2i", "candidate_index": 1}).status_code == 200
        response = client.post("/runs/manual-export",
                               json={"session_ids": [sid], "run_tag": "visual.1"})
        assert response.status_code == 200
        run = read_run(response.content)
        assert run.lists[topic_id].entries

    def test_incomplete_selection_409(self, client, corpus):
        sid = client.post(
            f"/topics/{corpus.topics[0].topic_id}/variants", json={}).json()["session_id"]
        response = client.post("/runs/manual-export",
                               json={"session_ids": [sid], "run_tag": "manual"})
        assert response.status_code == 409
        assert response.json()["error"] == "IncompleteSelections"

    def test_bad_run_tag_400(self, client, corpus):
        sid = self._session_with_selection(client, corpus.topics[0].topic_id)
        response = client.post("/runs/manual-export",
                               json={"session_ids": [sid], "run_tag": "has space"})
        assert response.status_code == 400


class TestFuseAndEval:
    def test_fuse_endpoint_equals_library(self, client, corpus):
        a = search_text_variant("red sports car", corpus.store, 10, corpus.backend, 805, "a")
        b = search_text_variant("sailboat sea", corpus.store, 10, corpus.backend, 805, "b")
        from garsearch.fusion import Run

        run_a = write_run(Run("a", {805: a})).decode()
        run_b = write_run(Run("b", {805: type(b)(805, b.entries, "b")})).decode()
        response = client.post("/fuse", json={
            "runs": [run_a, run_b], "run_tag": "fused"})
        assert response.status_code == 200
        want = fuse_runs([read_run(run_a), read_run(run_b)], FusionSpec(), "fused")
        assert response.content == write_run(want)

    def test_eval_endpoint_equals_library(self, client, corpus):
        from garsearch.pipeline import PipelineConfig, run_gar

        result = run_gar(corpus.topics, PipelineConfig(run_tag="r", k=50),
                         corpus.store, corpus.backend, corpus.bank)
        run_text = write_run(result.fused).decode()
        qrels_text = "\n".join(
            f"{t} 1 {d} {j}"
            for t in corpus.qrels.topics()
            for s in corpus.qrels.strata[t]
            for d, j in sorted(corpus.qrels.strata[t][s].items())
        )
        response = client.post("/eval", json={"run": run_text, "qrels": qrels_text})
        assert response.status_code == 200
        want = report_as_dict(evaluate_run(
            read_run(run_text), parse_qrels(qrels_text), EvalConfig()))
        assert response.json() == want

    def test_eval_bad_run_400(self, client):
        response = client.post("/eval", json={"run": "not a run", "qrels": ""})
        assert response.status_code == 400


class TestJournal:
    def test_sessions_survive_restart(self, corpus, tmp_path):
        journal = tmp_path / "sessions.jsonl"
        store = SessionStore(journal)
        topic = corpus.topics[0]
        from garsearch.generation.variants import GeneratorConfig, generate_variants

        variants = generate_variants(
            topic, GeneratorConfig(n_images=1), corpus.backend, corpus.bank)
        session = store.create(topic, variants)
        store.select(session.session_id, Selection("t2t", candidate_index=0))

        recovered = SessionStore(journal)
        again = recovered.get(session.session_id)
        assert again is not None
        assert again.variants == variants
        assert again.selections["t2t"].candidate_index == 0
