"""Prompt construction for the text-rewrite generator.

The template is fixed and versioned: any change to the wording must bump
PROMPT_VERSION so that recorded generations stay attributable.
"""

from __future__ import annotations

from ..trec_io import Topic
from .concept_bank import ConceptBank

PROMPT_VERSION = "t2t-prompt/v1"

# The concept sample embedded in a prompt is capped; concepts are chosen
# deterministically in lexicographic order.
CONCEPT_SAMPLE_CAP = 2000


def sample_concepts(bank: ConceptBank, cap: int = CONCEPT_SAMPLE_CAP) -> list[str]:
    return sorted(bank.concepts)[:cap]


def build_t2t_prompt(topic: Topic, bank: ConceptBank, oov: set[str]) -> str:
    """One prompt string carrying the instruction, the OOV terms, and a
    bounded sample of the known concepts."""
    concepts = sample_concepts(bank)
    oov_part = ", ".join(sorted(oov)) if oov else "(none)"
    return (
        f"[{PROMPT_VERSION}] Rewrite the video-search query below so that it "
        "only uses terms from the known concept list. Replace each "
        "out-of-vocabulary term with the closest synonym among the known "
        "concepts, keep the original meaning, and answer with the rewritten "
        "query only.\n"
        f"Query: {topic.text}\n"
        f"Out-of-vocabulary terms: {oov_part}\n"
        f"Known concepts: {', '.join(concepts)}\n"
    )
