"""The search system's known vocabulary and OOV detection against it.

Concepts are canonicalized through the shared tokenizer (lowercase,
alphanumeric tokens joined by single spaces), so bank lookups are exact
after tokenization. No stemming: reproducibility over recall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EmptyBank
from ..text import stopwords, tokenize


@dataclass(frozen=True)
class ConceptBank:
    concepts: frozenset[str]
    source_path: str = "<memory>"
    # Multi-word concepts as token tuples, longest first, for phrase cover.
    phrases: tuple[tuple[str, ...], ...] = field(init=False)

    def __post_init__(self):
        if not self.concepts:
            raise EmptyBank(f"concept bank from {self.source_path} is empty")
        phrases = tuple(
            sorted(
                (tuple(c.split(" ")) for c in self.concepts if " " in c),
                key=lambda p: (-len(p), p),
            )
        )
        object.__setattr__(self, "phrases", phrases)

    def __contains__(self, term: str) -> bool:
        return term in self.concepts

    def __len__(self) -> int:
        return len(self.concepts)


def _canonical(line: str) -> str:
    return " ".join(tokenize(line))


def bank_from_terms(terms, source_path: str = "<memory>") -> ConceptBank:
    canon = {_canonical(t) for t in terms}
    canon.discard("")
    return ConceptBank(frozenset(canon), source_path)


def load_concept_bank(path) -> ConceptBank:
    """Load a newline-delimited concept file; `#` comment lines ignored."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    terms = [ln for ln in lines if ln and not ln.startswith("#")]
    return bank_from_terms(terms, source_path=str(path))


def detect_oov(query: str, bank: ConceptBank) -> set[str]:
    """Query unigrams that the bank does not know.

    Stopwords are dropped, direct concept hits are dropped, and tokens
    covered by a multi-word bank phrase occurring in the query are dropped.
    Adding a concept to the bank can only shrink the result.
    """
    tokens = tokenize(query)
    if not tokens:
        return set()
    covered = [False] * len(tokens)
    for phrase in bank.phrases:
        width = len(phrase)
        for i in range(len(tokens) - width + 1):
            if tuple(tokens[i: i + width]) == phrase:
                covered[i: i + width] = [True] * width
    sw = stopwords()
    return {
        tok
        for i, tok in enumerate(tokens)
        if not covered[i] and tok not in sw and tok not in bank.concepts
    }
