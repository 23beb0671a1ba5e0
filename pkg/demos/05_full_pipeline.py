"""The full generation-augmented retrieval loop on a tiny synthetic corpus.

An out-of-vocabulary query fails under plain embedding search because the
literal words match the wrong shots; the rewrite channel fixes it, and the
equal-weight fusion of all four channels beats the original query. This is
the desk-scale version of the reported run comparison.
"""

from garsearch import (
    FusionSpec,
    GeneratorConfig,
    PipelineConfig,
    build_store,
    evaluate_run,
    parse_qrels,
    rank_overlap,
    run_gar,
)
from garsearch.generation import mock_backend, token_hash_embed
from garsearch.generation.concept_bank import bank_from_terms
from garsearch.trec_io import Topic

DIM = 256

SHOTS = {
    "rel-1": "people lineup outdoors queue waiting",
    "rel-2": "long lineup of people waiting outdoors",
    "bad-1": "people standing near a line of trees outdoors",
    "bad-2": "line drawing of people standing indoors",
    "oth-1": "a dog running on a beach",
    "oth-2": "a chef cooking pasta in a kitchen",
}

store = build_store([(sid, token_hash_embed(t, DIM)) for sid, t in SHOTS.items()], DIM)
bank = bank_from_terms(
    {tok for text in SHOTS.values() for tok in text.split()} - {"standing", "line"})

backend = mock_backend(
    dim=DIM,
    substitutions={"standing in line": "lineup"},
    scene_fixtures={
        "people standing in line outdoors": "a crowd of people waiting in a queue outdoors"},
)

topics = [Topic(801, "people standing in line outdoors")]
qrels = parse_qrels("\n".join(
    f"801 1 {sid} {1 if sid.startswith('rel') else 0}" for sid in SHOTS))

cfg = PipelineConfig(run_tag="demo", k=6, generator=GeneratorConfig(seed=3),
                     fusion=FusionSpec(cutoff=6))
result = run_gar(topics, cfg, store, backend, bank)

print("per-channel rankings for the OOV topic:")
for channel, run in sorted(result.channels.items()):
    ids = run.lists[801].doc_ids()
    print(f"  {channel:9s} {ids}")
print(f"  {'fused':9s} {result.fused.lists[801].doc_ids()}")

print("\nmean xinfAP:")
for name, run in [("original only", result.channels["original"]), ("fused", result.fused)]:
    print(f"  {name:14s} {evaluate_run(run, qrels).mean:.4f}")

t2i_vs_orig = rank_overlap(result.channels["t2i"].lists[801],
                           result.channels["original"].lists[801], 4)
t2t_vs_orig = rank_overlap(result.channels["t2t"].lists[801],
                           result.channels["original"].lists[801], 4)
print(f"\ntop-4 overlap with the original ranking: "
      f"t2t {t2t_vs_orig.value:.2f}, t2i {t2i_vs_orig.value:.2f} "
      f"(the image channel diverges most)")
