"""Shared tokenizer and the bundled stopword list.

One tokenizer serves the whole package (OOV detection, hash embedding,
topic validation) so that every component agrees on what a "term" is.
"""

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, in order of appearance."""
    return _TOKEN_RE.findall(text.lower())


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The fixed bundled stopword list (50 words)."""
    data = resources.files("garsearch").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip()
        for line in data.splitlines()
        if line.strip() and not line.startswith("#")
    )


def content_tokens(text: str) -> list[str]:
    """Tokens with stopwords removed."""
    sw = stopwords()
    return [t for t in tokenize(text) if t not in sw]
