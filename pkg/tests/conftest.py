import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gar_corpus import build_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    """The 50-shot synthetic corpus shared by pipeline and acceptance tests."""
    return build_corpus()
