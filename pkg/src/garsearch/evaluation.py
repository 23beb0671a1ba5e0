"""Average precision and its stratified sampled-judgment estimator.

average_precision is the classic fully-judged metric and doubles as the
oracle for the estimator's full-judgment limit. xinf_ap estimates AP from
pools partitioned into strata where only a sample of each stratum was
judged: the number of relevant docs is estimated per stratum as
r_s * N_s / m_s, and the expected precision above each sampled-relevant
rank is built from per-stratum relevance rates with epsilon smoothing.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import QrelsMismatch
from .fusion import Run, ScoredList, rank_overlap
from .trec_io import StratifiedQrels, TopicJudgmentView

log = logging.getLogger(__name__)

METRICS = ("xinfap", "ap")


@dataclass(frozen=True)
class EvalConfig:
    """Estimator knobs: epsilon smoothing for within-stratum rates.

    Unjudged docs (outside every pool) are never relevant and belong to no
    stratum; this policy is fixed.
    """

    epsilon: float = 1e-5

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


def average_precision(sl: ScoredList, judgments: Mapping[str, int]) -> float:
    """Classic AP over fully specified judgments (>= 1 means relevant).

    R is the number of relevant docs in the judgment pool; docs retrieved
    but unjudged count as nonrelevant. Returns 0 when R is 0.
    """
    total_relevant = sum(1 for j in judgments.values() if j >= 1)
    if total_relevant == 0:
        return 0.0
    hits = 0
    acc = 0.0
    for k, (doc, _) in enumerate(sl.entries, 1):
        if judgments.get(doc, 0) >= 1:
            hits += 1
            acc += hits / k
    return acc / total_relevant


def estimated_relevant(view: TopicJudgmentView) -> float:
    """R-hat = sum_s r_s * N_s / m_s; strata with m_s = 0 contribute 0."""
    total = 0.0
    for s in view.strata():
        if view.m[s] == 0:
            if view.n[s]:
                log.warning(
                    "topic %s stratum %s has %d pooled docs but no samples",
                    view.topic_id, s, view.n[s],
                )
            continue
        total += view.r[s] * view.n[s] / view.m[s]
    return total


def xinf_ap(sl: ScoredList, view: TopicJudgmentView, cfg: EvalConfig = EvalConfig()) -> float:
    """Extended inferred AP of one ranked list against stratified judgments.

    Each rank k holding a sampled-relevant doc of stratum s* contributes
    (N_s*/m_s*) * E[P@k], where E[P@k] mixes 1/k for the doc itself with
    per-stratum relevance rates (r+eps)/(m+2eps) over the k-1 docs above
    it; docs above k outside every pool only dilute the denominator. The
    contributions are summed and divided by R-hat.
    """
    r_hat = estimated_relevant(view)
    if r_hat <= 0.0:
        return 0.0
    eps = cfg.epsilon
    strata = view.strata()
    pooled_above = {s: 0 for s in strata}   # docs above rank k in stratum s's pool
    sampled_above = {s: 0 for s in strata}  # ... of those, judged
    relevant_above = {s: 0 for s in strata}  # ... of those, judged relevant
    total = 0.0
    for k, (doc, _) in enumerate(sl.entries, 1):
        info = view.doc_to.get(doc)
        if info is not None and info[1] >= 1:
            s_star = info[0]
            if k == 1:
                expected_precision = 1.0
            else:
                above = k - 1
                inner = math.fsum(
                    (pooled_above[s] / above)
                    * ((relevant_above[s] + eps) / (sampled_above[s] + 2 * eps))
                    for s in strata
                    if pooled_above[s] > 0
                )
                expected_precision = 1.0 / k + (above / k) * inner
            total += (view.n[s_star] / view.m[s_star]) * expected_precision
        if info is not None:
            s, judgment = info
            pooled_above[s] += 1
            if judgment >= 0:
                sampled_above[s] += 1
            if judgment >= 1:
                relevant_above[s] += 1
    return total / r_hat


def full_judgments(view: TopicJudgmentView) -> dict[str, int]:
    """Flatten a fully sampled view into doc -> judgment for classic AP.

    Unsampled (-1) docs are treated as nonrelevant, which is only faithful
    when the view is fully sampled.
    """
    return {doc: max(judgment, 0) for doc, (_, judgment) in view.doc_to.items()}


@dataclass(frozen=True)
class EvalReport:
    """Per-topic metric values for one run over one qrels file."""

    run_tag: str
    metric: str
    per_topic: dict[int, float]
    mean: float
    missing_topics: tuple[int, ...]
    qrels_digest: int


def evaluate_run(run: Run, qrels: StratifiedQrels, cfg: EvalConfig = EvalConfig(),
                 metric: str = "xinfap") -> EvalReport:
    """Score every qrels topic; topics absent from the run score 0.

    The mean is the arithmetic mean over all qrels topics, zeros included,
    so runs answering fewer topics are penalized rather than excused.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    per_topic: dict[int, float] = {}
    missing: list[int] = []
    for topic_id in qrels.topics():
        if topic_id not in run.lists:
            per_topic[topic_id] = 0.0
            missing.append(topic_id)
            continue
        view = qrels.view(topic_id)
        sl = run.lists[topic_id]
        if metric == "ap":
            per_topic[topic_id] = average_precision(sl, full_judgments(view))
        else:
            per_topic[topic_id] = xinf_ap(sl, view, cfg)
    mean = math.fsum(per_topic.values()) / len(per_topic) if per_topic else 0.0
    return EvalReport(run.run_tag, metric, per_topic, mean, tuple(missing), qrels.digest())


def render_report_tsv(report: EvalReport) -> str:
    metric_name = "xinfAP" if report.metric == "xinfap" else "AP"
    lines = [f"{tid}\t{metric_name}\t{report.per_topic[tid]:.6f}" for tid in sorted(report.per_topic)]
    lines.append(f"mean\t{metric_name}\t{report.mean:.6f}")
    return "\n".join(lines) + "\n"


def report_as_dict(report: EvalReport) -> dict:
    return {
        "run_tag": report.run_tag,
        "metric": report.metric,
        "per_topic": {str(tid): report.per_topic[tid] for tid in sorted(report.per_topic)},
        "mean": report.mean,
        "missing_topics": list(report.missing_topics),
    }


def render_report_json(report: EvalReport) -> str:
    return json.dumps(report_as_dict(report), indent=2) + "\n"


@dataclass(frozen=True)
class RunComparison:
    """Reports sorted by mean, per-topic deltas vs the best run, and the
    pairwise mean top-depth overlap between runs."""

    reports: tuple[EvalReport, ...]
    deltas: dict[str, dict[int, float]]
    overlap: dict[str, dict[str, float]]
    depth: int


def compare_runs(reports: Sequence[EvalReport], runs: Sequence[Run],
                 depth: int = 1000) -> RunComparison:
    """Compare >= 2 evaluated runs over the same qrels.

    Runs are needed alongside their reports because overlap is computed
    from the rank lists themselves.
    """
    if len(reports) < 2:
        raise ValueError("compare_runs needs at least two reports")
    if len(reports) != len(runs):
        raise ValueError(f"{len(reports)} reports for {len(runs)} runs")
    by_tag = {run.run_tag: run for run in runs}
    for report in reports:
        if report.run_tag not in by_tag:
            raise ValueError(f"no run supplied for report {report.run_tag!r}")
    digests = {report.qrels_digest for report in reports}
    if len(digests) > 1:
        raise QrelsMismatch("reports were computed against different qrels")
    ordered = tuple(sorted(reports, key=lambda rep: (-rep.mean, rep.run_tag)))
    best = ordered[0]
    deltas = {
        rep.run_tag: {
            tid: rep.per_topic.get(tid, 0.0) - best.per_topic.get(tid, 0.0)
            for tid in sorted(best.per_topic)
        }
        for rep in ordered
    }
    overlap: dict[str, dict[str, float]] = {}
    for rep_a in ordered:
        row: dict[str, float] = {}
        run_a = by_tag[rep_a.run_tag]
        for rep_b in ordered:
            run_b = by_tag[rep_b.run_tag]
            shared = sorted(set(run_a.lists) & set(run_b.lists))
            if shared:
                row[rep_b.run_tag] = math.fsum(
                    rank_overlap(run_a.lists[t], run_b.lists[t], depth).value for t in shared
                ) / len(shared)
            else:
                row[rep_b.run_tag] = 0.0
        overlap[rep_a.run_tag] = row
    return RunComparison(ordered, deltas, overlap, depth)


def render_comparison_tsv(cmp: RunComparison) -> str:
    metric_name = "xinfAP" if cmp.reports[0].metric == "xinfap" else "AP"
    lines = [f"# run\tmean_{metric_name}"]
    for rep in cmp.reports:
        lines.append(f"{rep.run_tag}\t{rep.mean:.6f}")
    lines.append(f"# pairwise mean rank overlap at depth {cmp.depth}")
    tags = [rep.run_tag for rep in cmp.reports]
    lines.append("\t".join(["overlap"] + tags))
    for tag_a in tags:
        lines.append("\t".join([tag_a] + [f"{cmp.overlap[tag_a][tag_b]:.4f}" for tag_b in tags]))
    return "\n".join(lines) + "\n"
