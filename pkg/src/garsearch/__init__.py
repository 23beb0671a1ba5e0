"""Generation-augmented retrieval for ad-hoc video search.

A desk-scale toolkit around one idea: rewrite a textual query into
text/image/caption variants, retrieve a rank list per variant from an
exact embedding index, fuse the lists with equal weights, and score runs
with extended inferred average precision over stratified sampled
judgments. External generative/embedding models sit behind a small wire
protocol with deterministic mocks.
"""

from .embedding import (
    EmbeddingStore,
    SearchHit,
    build_store,
    knn_search,
    load_store,
    normalize,
    parse_store,
    save_store,
)
from .evaluation import (
    EvalConfig,
    EvalReport,
    average_precision,
    compare_runs,
    evaluate_run,
    xinf_ap,
)
from .fusion import (
    FusionSpec,
    OverlapResult,
    Run,
    ScoredList,
    fuse,
    fuse_runs,
    make_scored_list,
    normalize_scores,
    rank_overlap,
)
from .generation import (
    ConceptBank,
    GeneratedImage,
    GeneratorConfig,
    QueryVariantSet,
    build_t2t_prompt,
    detect_oov,
    generate_variants,
    load_concept_bank,
    mock_backend,
    token_hash_embed,
)
from .pipeline import GarResult, PipelineConfig, run_gar, search_image_variant, search_text_variant
from .trec_io import (
    StratifiedQrels,
    Topic,
    TopicJudgmentView,
    parse_qrels,
    parse_topics,
    read_run,
    write_run,
)

__version__ = "0.1.0"

__all__ = [
    "EmbeddingStore", "SearchHit", "build_store", "knn_search", "load_store",
    "normalize", "parse_store", "save_store",
    "EvalConfig", "EvalReport", "average_precision", "compare_runs",
    "evaluate_run", "xinf_ap",
    "FusionSpec", "OverlapResult", "Run", "ScoredList", "fuse", "fuse_runs",
    "make_scored_list", "normalize_scores", "rank_overlap",
    "ConceptBank", "GeneratedImage", "GeneratorConfig", "QueryVariantSet",
    "build_t2t_prompt", "detect_oov", "generate_variants", "load_concept_bank",
    "mock_backend", "token_hash_embed",
    "GarResult", "PipelineConfig", "run_gar", "search_image_variant",
    "search_text_variant",
    "StratifiedQrels", "Topic", "TopicJudgmentView", "parse_qrels",
    "parse_topics", "read_run", "write_run",
    "__version__",
]
