"""Parsers and writers for topics, stratified qrels, and TREC run files.

All three formats are line-oriented UTF-8. Parsers accept LF or CRLF and
fail fast on the first bad line; writers emit LF only, with run scores
rendered at a fixed 6 decimal places so outputs are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ._hash import fnv1a64
from .errors import (
    DuplicateDoc,
    DuplicateTopic,
    MalformedLine,
    RankGap,
    TagMismatch,
    UnknownJudgment,
)
from .fusion import Run, ScoredList
from .text import content_tokens


@dataclass(frozen=True)
class Topic:
    """One ad-hoc search topic: a positive integer id and its query text."""

    topic_id: int
    text: str

    def __post_init__(self):
        if self.topic_id <= 0:
            raise ValueError(f"topic id must be positive, got {self.topic_id}")
        if not self.text.strip():
            raise ValueError(f"topic {self.topic_id} has empty text")


def parse_topics(data: bytes | str) -> list[Topic]:
    """Parse `topic_id<TAB>query text` lines; `#` comments and blanks skipped."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    topics: list[Topic] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(data.splitlines(), 1):
        line = raw.strip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise MalformedLine(lineno, "expected `topic_id<TAB>query text`")
        id_field, text = line.split("\t", 1)
        try:
            topic_id = int(id_field.strip())
        except ValueError:
            raise MalformedLine(lineno, f"non-integer topic id {id_field.strip()!r}") from None
        if topic_id <= 0:
            raise MalformedLine(lineno, f"topic id must be positive, got {topic_id}")
        text = text.strip()
        if not text:
            raise MalformedLine(lineno, "empty query text")
        if not content_tokens(text):
            raise MalformedLine(lineno, "query has no non-stopword token")
        if topic_id in seen:
            raise DuplicateTopic(topic_id)
        seen.add(topic_id)
        topics.append(Topic(topic_id, text))
    return topics


@dataclass(frozen=True)
class TopicJudgmentView:
    """Per-stratum pool/sample/relevant counts plus a doc lookup table.

    n[s] is the pool size of stratum s, m[s] how many of those were
    sampled for judging (judgment >= 0), r[s] how many were judged
    relevant (judgment >= 1). doc_to maps doc id -> (stratum, judgment).
    """

    topic_id: int
    n: dict[int, int]
    m: dict[int, int]
    r: dict[int, int]
    doc_to: dict[str, tuple[int, int]]

    def strata(self) -> list[int]:
        return sorted(self.n)


@dataclass
class StratifiedQrels:
    """Per-topic pools partitioned into strata with sampled judgments.

    Judgment -1 marks a pooled-but-unsampled doc; 0 judged nonrelevant;
    >= 1 judged relevant.
    """

    strata: dict[int, dict[int, dict[str, int]]] = field(default_factory=dict)

    def topics(self) -> list[int]:
        return sorted(self.strata)

    def __len__(self) -> int:
        return len(self.strata)

    def view(self, topic_id: int) -> TopicJudgmentView:
        per_stratum = self.strata.get(topic_id, {})
        n: dict[int, int] = {}
        m: dict[int, int] = {}
        r: dict[int, int] = {}
        doc_to: dict[str, tuple[int, int]] = {}
        for stratum_id in sorted(per_stratum):
            docs = per_stratum[stratum_id]
            n[stratum_id] = len(docs)
            m[stratum_id] = sum(1 for j in docs.values() if j >= 0)
            r[stratum_id] = sum(1 for j in docs.values() if j >= 1)
            for doc, judgment in docs.items():
                doc_to[doc] = (stratum_id, judgment)
        return TopicJudgmentView(topic_id, n, m, r, doc_to)

    def digest(self) -> int:
        """Content fingerprint used to detect mixed-qrels comparisons."""
        lines = []
        for topic_id in self.topics():
            for stratum_id in sorted(self.strata[topic_id]):
                for doc, judgment in sorted(self.strata[topic_id][stratum_id].items()):
                    lines.append(f"{topic_id} {stratum_id} {doc} {judgment}")
        return fnv1a64("\n".join(lines).encode("utf-8"))


def parse_qrels(data: bytes | str) -> StratifiedQrels:
    """Parse whitespace-separated `topic stratum doc judgment` lines."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    qrels = StratifiedQrels()
    seen_docs: dict[int, set[str]] = {}
    for lineno, raw in enumerate(data.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 4:
            raise MalformedLine(lineno, f"expected 4 columns, got {len(fields)}")
        try:
            topic_id = int(fields[0])
            stratum_id = int(fields[1])
            judgment = int(fields[3])
        except ValueError:
            raise MalformedLine(lineno, f"non-integer field in {line!r}") from None
        doc = fields[2]
        if judgment < -1:
            raise UnknownJudgment(judgment, lineno)
        if doc in seen_docs.setdefault(topic_id, set()):
            raise DuplicateDoc(topic_id, doc)
        seen_docs[topic_id].add(doc)
        qrels.strata.setdefault(topic_id, {}).setdefault(stratum_id, {})[doc] = judgment
    return qrels


def write_run(run: Run) -> bytes:
    """Render a Run as TREC run-file bytes.

    Lines are `topic Q0 doc rank score tag`, sorted by (topic asc, rank
    asc), scores at 6 decimal places, LF line endings.
    """
    lines = []
    for topic_id in sorted(run.lists):
        for rank, (doc, score) in enumerate(run.lists[topic_id].entries, 1):
            lines.append(f"{topic_id} Q0 {doc} {rank} {score:.6f} {run.run_tag}")
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_run(data: bytes | str) -> Run:
    """Parse a TREC run file; the exact inverse of write_run on its output.

    Ranks must be contiguous from 1 per topic and scores non-increasing;
    equal-score entries are re-ordered to the canonical id-ascending tie
    break if the file lists them otherwise.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    tag: str | None = None
    per_topic: dict[int, list[tuple[str, float]]] = {}
    expected_rank: dict[int, int] = {}
    last_score: dict[int, float] = {}
    seen: dict[int, set[str]] = {}
    saw_line = False
    for lineno, raw in enumerate(data.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        saw_line = True
        fields = line.split()
        if len(fields) != 6:
            raise MalformedLine(lineno, f"expected 6 columns, got {len(fields)}")
        topic_field, q0, doc, rank_field, score_field, line_tag = fields
        if q0 != "Q0":
            raise MalformedLine(lineno, f"second column must be Q0, got {q0!r}")
        try:
            topic_id = int(topic_field)
            rank = int(rank_field)
            score = float(score_field)
        except ValueError:
            raise MalformedLine(lineno, f"non-numeric field in {line!r}") from None
        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            raise TagMismatch(tag, line_tag)
        want = expected_rank.get(topic_id, 1)
        if rank != want:
            raise RankGap(topic_id, want, rank)
        expected_rank[topic_id] = want + 1
        if topic_id in last_score and score > last_score[topic_id]:
            raise MalformedLine(lineno, f"score increases at rank {rank} of topic {topic_id}")
        last_score[topic_id] = score
        if doc in seen.setdefault(topic_id, set()):
            raise MalformedLine(lineno, f"duplicate doc {doc!r} in topic {topic_id}")
        seen[topic_id].add(doc)
        per_topic.setdefault(topic_id, []).append((doc, score))
    if not saw_line or tag is None:
        raise MalformedLine(0, "empty run file")
    lists = {
        topic_id: ScoredList(
            topic_id,
            tuple(sorted(entries, key=lambda kv: (-kv[1], kv[0]))),
            tag,
        )
        for topic_id, entries in per_topic.items()
    }
    return Run(tag, lists)


def topics_by_id(topics) -> Mapping[int, Topic]:
    return {t.topic_id: t for t in topics}
