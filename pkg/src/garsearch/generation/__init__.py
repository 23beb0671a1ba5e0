"""Query transformations (text rewrite, image generation, captioning)
behind a backend abstraction with deterministic mocks, plus concept-bank
out-of-vocabulary detection."""

from .concept_bank import ConceptBank, detect_oov, load_concept_bank
from .prompts import PROMPT_VERSION, build_t2t_prompt
from .text_embed import token_hash_embed
from .variants import (
    GeneratedImage,
    GeneratorConfig,
    QueryVariantSet,
    generate_variants,
)
from .mocks import (
    MockEmbedClient,
    MockGeneratorBackend,
    MockI2TClient,
    MockT2IClient,
    MockT2TClient,
    mock_backend,
)

__all__ = [
    "ConceptBank",
    "detect_oov",
    "load_concept_bank",
    "PROMPT_VERSION",
    "build_t2t_prompt",
    "token_hash_embed",
    "GeneratedImage",
    "GeneratorConfig",
    "QueryVariantSet",
    "generate_variants",
    "MockEmbedClient",
    "MockGeneratorBackend",
    "MockI2TClient",
    "MockT2IClient",
    "MockT2TClient",
    "mock_backend",
]
