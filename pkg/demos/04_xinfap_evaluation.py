"""Extended inferred AP over stratified sampled judgments.

Builds a 40-doc pool split into two strata (a densely sampled top stratum
and a sparsely sampled tail), then shows that the estimator computed from
the partial judgments tracks the classic AP computed from full judgments.
"""

import random

from garsearch import average_precision, evaluate_run, make_scored_list, parse_qrels
from garsearch.evaluation import render_report_tsv, xinf_ap
from garsearch.fusion import Run

rng = random.Random(42)
docs = [f"d{i:02d}" for i in range(40)]
relevance = {d: (1 if rng.random() < 0.35 else 0) for d in docs}
scores = {d: relevance[d] + rng.gauss(0, 0.8) for d in docs}
sl = make_scored_list(901, scores, "demo")
ranked = [d for d, _ in sl.entries]

true_ap = average_precision(sl, relevance)
print(f"true AP over full judgments: {true_ap:.4f}")

# stratify by pooling depth: top 20 sampled at 0.8, tail at 0.3
lines = []
for i, d in enumerate(ranked):
    stratum = 1 if i < 20 else 2
    rate = 0.8 if stratum == 1 else 0.3
    judgment = relevance[d] if rng.random() < rate else -1
    lines.append(f"901 {stratum} {d} {judgment}")
qrels = parse_qrels("\n".join(lines))

view = qrels.view(901)
print("stratum  pool  sampled  relevant")
for s in view.strata():
    print(f"   {s}      {view.n[s]:3d}    {view.m[s]:3d}      {view.r[s]:3d}")

estimate = xinf_ap(sl, view)
print(f"\nxinfAP from the sampled judgments: {estimate:.4f} "
      f"(|diff from true AP| = {abs(estimate - true_ap):.4f})")

report = evaluate_run(Run("demo", {901: sl}), qrels)
print("\nreport TSV:")
print(render_report_tsv(report))
