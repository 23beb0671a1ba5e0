"""Topics, stratified qrels, and TREC run file round-trips."""

import pytest

from garsearch.errors import (
    DuplicateDoc,
    DuplicateTopic,
    MalformedLine,
    RankGap,
    TagMismatch,
    UnknownJudgment,
)
from garsearch.fusion import Run, make_scored_list
from garsearch.trec_io import parse_qrels, parse_topics, read_run, write_run


class TestParseTopics:
    def test_single_topic(self):
        topics = parse_topics("751\tA bald man with glasses\n")
        assert len(topics) == 1
        assert topics[0].topic_id == 751
        assert topics[0].text == "A bald man with glasses"

    def test_topic_770(self):
        topics = parse_topics(
            "770\tTwo women together wearing hats, excluding caps, outdoors\n")
        assert topics[0].text == "Two women together wearing hats, excluding caps, outdoors"

    def test_non_integer_id(self):
        with pytest.raises(MalformedLine) as exc:
            parse_topics("x\tfoo\n")
        assert exc.value.lineno == 1

    def test_duplicate_topic(self):
        with pytest.raises(DuplicateTopic) as exc:
            parse_topics("751\ta dog\n751\ta cat\n")
        assert exc.value.topic_id == 751

    def test_comments_and_blanks_skipped(self):
        topics = parse_topics("# header\n\n751\ta dog\n")
        assert [t.topic_id for t in topics] == [751]

    def test_crlf_accepted(self):
        topics = parse_topics(b"751\ta dog\r\n752\ta cat\r\n")
        assert [t.topic_id for t in topics] == [751, 752]

    def test_missing_tab(self):
        with pytest.raises(MalformedLine):
            parse_topics("751 a dog\n")

    def test_stopword_only_query_rejected(self):
        with pytest.raises(MalformedLine):
            parse_topics("751\tthe of and\n")

    def test_bundled_tv24_fixture(self):
        from garsearch.generation.fixtures import tv24_topics

        topics = tv24_topics()
        assert len(topics) == 20
        assert [t.topic_id for t in topics] == list(range(751, 771))
        by_id = {t.topic_id: t.text for t in topics}
        assert by_id[751] == "A bald man with glasses"
        assert by_id[752] == "A rainy day outdoors"


class TestParseQrels:
    def test_hand_counted_strata(self):
        qrels = parse_qrels("751 1 sA 1\n751 1 sB 0\n751 1 sC -1\n")
        view = qrels.view(751)
        assert view.n == {1: 3}
        assert view.m == {1: 2}
        assert view.r == {1: 1}
        assert view.doc_to["sC"] == (1, -1)

    def test_empty_file_valid(self):
        qrels = parse_qrels("")
        assert len(qrels) == 0

    def test_duplicate_doc(self):
        with pytest.raises(DuplicateDoc):
            parse_qrels("751 1 sA 1\n751 1 sA 1\n")

    def test_duplicate_doc_across_strata(self):
        with pytest.raises(DuplicateDoc):
            parse_qrels("751 1 sA 1\n751 2 sA 0\n")

    def test_unknown_judgment(self):
        with pytest.raises(UnknownJudgment):
            parse_qrels("751 1 sA -2\n")

    def test_wrong_column_count(self):
        with pytest.raises(MalformedLine) as exc:
            parse_qrels("751 sA 1\n")
        assert exc.value.lineno == 1

    def test_same_doc_ok_in_different_topics(self):
        qrels = parse_qrels("751 1 sA 1\n752 1 sA 0\n")
        assert qrels.topics() == [751, 752]

    def test_digest_tracks_content(self):
        a = parse_qrels("751 1 sA 1\n")
        b = parse_qrels("751 1 sA 1\n")
        c = parse_qrels("751 1 sA 0\n")
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()


class TestRunFiles:
    def _run(self):
        return Run("F_M_C_D_PolySmartAndVIREO.24_1", {
            751: make_scored_list(
                751, {"sA": 0.873, "sB": 0.5, "sC": 0.25}, "F_M_C_D_PolySmartAndVIREO.24_1"),
        })

    def test_first_line_format(self):
        data = write_run(self._run())
        assert data.splitlines()[0] == b"751 Q0 sA 1 0.873000 F_M_C_D_PolySmartAndVIREO.24_1"

    def test_write_read_write_byte_identical(self):
        first = write_run(self._run())
        second = write_run(read_run(first))
        assert first == second

    def test_structural_round_trip_on_six_decimal_scores(self):
        run = Run("tag", {
            1: make_scored_list(1, {"a": 0.5, "b": 0.25, "c": 0.125}, "tag"),
            2: make_scored_list(2, {"d": 1.0, "e": 0.0}, "tag"),
        })
        parsed = read_run(write_run(run))
        assert parsed.run_tag == run.run_tag
        assert {t: sl.entries for t, sl in parsed.lists.items()} == \
            {t: sl.entries for t, sl in run.lists.items()}

    def test_rank_gap(self):
        text = "751 Q0 sA 1 0.9 tag\n751 Q0 sB 3 0.5 tag\n"
        with pytest.raises(RankGap) as exc:
            read_run(text)
        assert (exc.value.expected, exc.value.got) == (2, 3)

    def test_tag_mismatch(self):
        text = "751 Q0 sA 1 0.9 tagA\n751 Q0 sB 2 0.5 tagB\n"
        with pytest.raises(TagMismatch):
            read_run(text)

    def test_increasing_score_rejected(self):
        text = "751 Q0 sA 1 0.5 tag\n751 Q0 sB 2 0.9 tag\n"
        with pytest.raises(MalformedLine):
            read_run(text)

    def test_q0_column_enforced(self):
        with pytest.raises(MalformedLine):
            read_run("751 QQ sA 1 0.9 tag\n")

    def test_duplicate_doc_rejected(self):
        text = "751 Q0 sA 1 0.9 tag\n751 Q0 sA 2 0.5 tag\n"
        with pytest.raises(MalformedLine):
            read_run(text)

    def test_empty_file_rejected(self):
        with pytest.raises(MalformedLine):
            read_run("")

    def test_tie_order_canonicalized(self):
        # equal scores listed z-then-a are reordered to id-ascending
        text = "751 Q0 z 1 0.5 tag\n751 Q0 a 2 0.5 tag\n"
        run = read_run(text)
        assert run.lists[751].doc_ids() == ("a", "z")

    def test_scores_non_increasing_ok(self):
        text = "751 Q0 a 1 0.5 tag\n751 Q0 b 2 0.5 tag\n751 Q0 c 3 0.1 tag\n"
        assert read_run(text).lists[751].doc_ids() == ("a", "b", "c")

    def test_lf_only_output(self):
        assert b"\r" not in write_run(self._run())
