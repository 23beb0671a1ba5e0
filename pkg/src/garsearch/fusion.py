"""Score normalization and late fusion of ranked shot lists.

Fusion is a weighted linear combination of per-list normalized scores,
divided by the weight sum so that scaling all weights leaves the ranking
unchanged. Per-doc sums use math.fsum (correctly rounded), which makes the
result independent of input list order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Sequence

from .errors import EmptyList, NoLists, NoRuns, TopicMismatch

NORMALIZATIONS = ("minmax", "none", "rank")

# Constant in the reciprocal-rank transform 1/(RANK_OFFSET + position).
RANK_OFFSET = 60

DEFAULT_CUTOFF = 1000


@dataclass(frozen=True)
class ScoredList:
    """Ranked (shot_id, score) entries for one topic.

    Entries are sorted by score descending, ties by shot id ascending, and
    shot ids are unique; the constructor enforces both.
    """

    topic_id: int
    entries: tuple[tuple[str, float], ...]
    source_tag: str = ""

    def __post_init__(self):
        entries = tuple((str(d), float(s)) for d, s in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        prev: tuple[str, float] | None = None
        for doc, score in entries:
            if doc in seen:
                raise ValueError(f"duplicate doc {doc!r} in scored list for topic {self.topic_id}")
            seen.add(doc)
            if prev is not None:
                if score > prev[1] or (score == prev[1] and doc < prev[0]):
                    raise ValueError(
                        f"scored list for topic {self.topic_id} not sorted at {doc!r}"
                    )
            prev = (doc, score)

    def __len__(self) -> int:
        return len(self.entries)

    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.entries)

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)


def make_scored_list(topic_id: int, scores: Mapping[str, float] | Sequence[tuple[str, float]],
                     source_tag: str = "", cutoff: int | None = None) -> ScoredList:
    """Sort arbitrary (doc, score) pairs into a valid ScoredList."""
    items = scores.items() if isinstance(scores, Mapping) else scores
    ordered = sorted(((str(d), float(s)) for d, s in items), key=lambda kv: (-kv[1], kv[0]))
    if cutoff is not None:
        ordered = ordered[:cutoff]
    return ScoredList(topic_id, tuple(ordered), source_tag)


@dataclass(frozen=True)
class Run:
    """A tagged set of per-topic scored lists (one retrieval run)."""

    run_tag: str
    lists: dict[int, ScoredList] = field(default_factory=dict)

    def __post_init__(self):
        if not self.run_tag or any(ch.isspace() for ch in self.run_tag):
            raise ValueError(f"run tag {self.run_tag!r} must be non-empty without whitespace")
        for topic_id, sl in self.lists.items():
            if sl.topic_id != topic_id:
                raise ValueError(f"list under topic {topic_id} has topic_id {sl.topic_id}")

    def topics(self) -> list[int]:
        return sorted(self.lists)


@dataclass(frozen=True)
class FusionSpec:
    """How to combine input lists.

    weights=None means equal weights over however many lists are present;
    an explicit tuple must match the number of input lists.
    """

    weights: tuple[float, ...] | None = None
    normalization: str = "minmax"
    cutoff: int = DEFAULT_CUTOFF
    missing_score: float = 0.0

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if any(w < 0 for w in weights):
                raise ValueError("weights must be non-negative")
            if not any(w > 0 for w in weights):
                raise ValueError("at least one weight must be > 0")
            object.__setattr__(self, "weights", weights)


def normalize_scores(sl: ScoredList, method: str) -> ScoredList:
    """Rescale scores without changing the ordering.

    minmax maps max->1 and min->0 (a constant list maps to all 1); rank
    maps 1-based position p to 1/(60+p); none is the identity.
    """
    if method not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {method!r}")
    if method == "none":
        return sl
    if not sl.entries:
        raise EmptyList(f"cannot {method}-normalize an empty list (topic {sl.topic_id})")
    if method == "rank":
        entries = tuple(
            (doc, 1.0 / (RANK_OFFSET + pos))
            for pos, (doc, _) in enumerate(sl.entries, 1)
        )
        return ScoredList(sl.topic_id, entries, sl.source_tag)
    hi = sl.entries[0][1]
    lo = sl.entries[-1][1]
    if hi == lo:
        entries = tuple((doc, 1.0) for doc, _ in sl.entries)
    else:
        span = hi - lo
        entries = tuple((doc, (score - lo) / span) for doc, score in sl.entries)
    return ScoredList(sl.topic_id, entries, sl.source_tag)


def fuse(lists: Sequence[ScoredList], spec: FusionSpec, tag: str | None = None) -> ScoredList:
    """Weighted linear combination of lists over one topic.

    fused(d) = sum_i w_i * score_i(d) / sum_i w_i, with spec.missing_score
    standing in for docs absent from a list. Output is truncated to
    spec.cutoff and sorted by (score desc, id asc).
    """
    if not lists:
        raise NoLists("fuse requires at least one input list")
    topic_ids = {sl.topic_id for sl in lists}
    if len(topic_ids) > 1:
        raise TopicMismatch(f"input lists span topics {sorted(topic_ids)}")
    topic_id = lists[0].topic_id
    weights = spec.weights if spec.weights is not None else (1.0,) * len(lists)
    if len(weights) != len(lists):
        raise ValueError(f"{len(weights)} weights for {len(lists)} lists")
    wsum = math.fsum(weights)
    if wsum <= 0:
        weights = (1.0,) * len(lists)
        wsum = float(len(lists))
    maps = [normalize_scores(sl, spec.normalization).as_dict() for sl in lists]
    union = sorted({doc for m in maps for doc in m})
    fused = {
        doc: math.fsum(w * m.get(doc, spec.missing_score) for w, m in zip(weights, maps)) / wsum
        for doc in union
    }
    out_tag = tag if tag is not None else "+".join(sl.source_tag for sl in lists if sl.source_tag)
    return make_scored_list(topic_id, fused, out_tag or "fused", cutoff=spec.cutoff)


def fuse_runs(runs: Sequence[Run], spec: FusionSpec, run_tag: str) -> Run:
    """Per-topic fusion across whole runs.

    Topics present in any input appear in the output; for each topic only
    the runs that retrieved it contribute, and their weights are
    renormalized by the weight-sum division in fuse().
    """
    if not runs:
        raise NoRuns("fuse_runs requires at least one run")
    weights = spec.weights if spec.weights is not None else (1.0,) * len(runs)
    if len(weights) != len(runs):
        raise ValueError(f"{len(weights)} weights for {len(runs)} runs")
    topics = sorted({t for run in runs for t in run.lists})
    out: dict[int, ScoredList] = {}
    for topic_id in topics:
        present = [
            (w, run.lists[topic_id])
            for w, run in zip(weights, runs)
            if topic_id in run.lists and run.lists[topic_id].entries
        ]
        if not present:
            out[topic_id] = ScoredList(topic_id, (), run_tag)
            continue
        sub = replace(spec, weights=tuple(w for w, _ in present))
        out[topic_id] = fuse([sl for _, sl in present], sub, tag=run_tag)
    return Run(run_tag, out)


class OverlapResult(NamedTuple):
    """Top-k overlap ratio plus the depth actually used."""

    value: float
    effective_depth: int


def rank_overlap(a: ScoredList, b: ScoredList, depth: int) -> OverlapResult:
    """|top-d(a) & top-d(b)| / d with d = min(depth, len(a), len(b)).

    Lists shorter than the requested depth are compared at their actual
    length, reported in effective_depth. Two empty lists overlap 0.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    eff = min(depth, len(a), len(b))
    if eff == 0:
        return OverlapResult(0.0, 0)
    top_a = {doc for doc, _ in a.entries[:eff]}
    top_b = {doc for doc, _ in b.entries[:eff]}
    return OverlapResult(len(top_a & top_b) / eff, eff)
