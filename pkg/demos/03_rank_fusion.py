"""Score normalization, equal-weight fusion, and rank-list overlap."""

from garsearch import FusionSpec, ScoredList, fuse, normalize_scores, rank_overlap

dense = ScoredList(751, (("shotA", 14.2), ("shotB", 9.1), ("shotC", 3.3)), "dense")
concept = ScoredList(751, (("shotB", 0.92), ("shotD", 0.40), ("shotA", 0.05)), "concept")

print("raw lists:")
for sl in (dense, concept):
    print(f"  {sl.source_tag}: {list(sl.entries)}")

print("\nminmax-normalized (max -> 1, min -> 0):")
for sl in (dense, concept):
    print(f"  {sl.source_tag}: {list(normalize_scores(sl, 'minmax').entries)}")

fused = fuse([dense, concept], FusionSpec(), tag="dense+concept")
print("\nequal-weight fusion (missing docs score 0 after normalization):")
for rank, (doc, score) in enumerate(fused.entries, 1):
    print(f"  {rank}. {doc}  {score:.4f}")

weighted = fuse([dense, concept], FusionSpec(weights=(3.0, 1.0)), tag="3:1")
print("\n3:1 weighting flips the order toward the dense list:")
print(f"  {[doc for doc, _ in weighted.entries]}")

overlap = rank_overlap(dense, concept, depth=3)
print(f"\ntop-3 overlap between the two views: {overlap.value:.2f} "
      f"(effective depth {overlap.effective_depth})")

rr = normalize_scores(dense, "rank")
print(f"\nreciprocal-rank transform 1/(60+p): {list(rr.entries)}")
