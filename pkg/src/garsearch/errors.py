"""Exception hierarchy for the garsearch package.

Every error carries a short machine-greppable ``code`` (the class name) and
a human-readable ``detail``; the service layer maps these onto HTTP errors
and the CLI prints them on stderr as one-line diagnostics.
"""


class GarError(Exception):
    """Base class for all package errors."""

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail

    @property
    def code(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}" if self.detail else self.code


# --- vectors and stores ---

class ZeroVector(GarError):
    pass


class NonFinite(GarError):
    pass


class DimMismatch(GarError):
    def __init__(self, expected: int, got: int, detail: str = ""):
        super().__init__(detail or f"expected dim {expected}, got {got}")
        self.expected = expected
        self.got = got


class DuplicateId(GarError):
    def __init__(self, shot_id: str):
        super().__init__(f"duplicate shot id {shot_id!r}")
        self.shot_id = shot_id


class StoreFormatError(GarError):
    pass


# --- parsing ---

class MalformedLine(GarError):
    def __init__(self, lineno: int, detail: str = ""):
        super().__init__(f"line {lineno}: {detail}" if detail else f"line {lineno}")
        self.lineno = lineno


class DuplicateTopic(GarError):
    def __init__(self, topic_id: int):
        super().__init__(f"duplicate topic id {topic_id}")
        self.topic_id = topic_id


class DuplicateDoc(GarError):
    def __init__(self, topic_id: int, doc_id: str):
        super().__init__(f"topic {topic_id}: duplicate doc {doc_id!r}")
        self.topic_id = topic_id
        self.doc_id = doc_id


class UnknownJudgment(GarError):
    def __init__(self, judgment: int, lineno: int = 0):
        super().__init__(f"line {lineno}: judgment {judgment} < -1")
        self.judgment = judgment
        self.lineno = lineno


class RankGap(GarError):
    def __init__(self, topic_id: int, expected: int, got: int):
        super().__init__(f"topic {topic_id}: expected rank {expected}, got {got}")
        self.topic_id = topic_id
        self.expected = expected
        self.got = got


class TagMismatch(GarError):
    def __init__(self, first: str, other: str):
        super().__init__(f"mixed run tags in one file: {first!r} vs {other!r}")
        self.first = first
        self.other = other


# --- generation ---

class EmptyText(GarError):
    pass


class EmptyBank(GarError):
    pass


class AllChannelsFailed(GarError):
    pass


class GeneratorRequestFailed(GarError):
    pass


# --- fusion ---

class EmptyList(GarError):
    pass


class TopicMismatch(GarError):
    pass


class NoLists(GarError):
    pass


class NoRuns(GarError):
    pass


# --- pipeline ---

class VariantSearchFailed(GarError):
    def __init__(self, channel: str, detail: str = ""):
        super().__init__(f"channel {channel!r}: {detail}" if detail else f"channel {channel!r}")
        self.channel = channel


class AllImagesFailed(GarError):
    pass


class NoTopics(GarError):
    pass


class StoreUnavailable(GarError):
    pass


# --- evaluation ---

class QrelsMismatch(GarError):
    pass


# --- service ---

class OovViolation(GarError):
    def __init__(self, topic_id: int, terms):
        terms = tuple(sorted(terms))
        super().__init__(f"topic {topic_id}: out-of-vocabulary terms {', '.join(terms)}")
        self.topic_id = topic_id
        self.terms = terms


class IncompleteSelections(GarError):
    def __init__(self, topic_ids):
        topic_ids = tuple(sorted(topic_ids))
        super().__init__(f"sessions without selections for topics {topic_ids}")
        self.topic_ids = topic_ids
