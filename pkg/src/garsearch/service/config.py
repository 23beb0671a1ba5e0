"""Service configuration, settable programmatically or via one TOML file.

Example:

    [service]
    host = "127.0.0.1"
    port = 8040
    store_path = "store.gar"
    concepts_path = "bank.txt"
    topics_path = "topics.tsv"
    mode = "mock"              # or "http"
    generator_url = ""         # base URL when mode = "http"
    journal_path = "sessions.jsonl"
    dim = 256
    seed = 0
    k = 1000
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8040
    store_path: str = ""
    concepts_path: str = ""
    topics_path: str = ""
    mode: str = "mock"
    generator_url: str = ""
    substitutions_path: str = ""
    journal_path: str = ""
    dim: int = 256
    seed: int = 0
    k: int = 1000
    n_t2t: int = 1
    n_images: int = 4

    def __post_init__(self):
        if self.mode not in ("mock", "http"):
            raise ValueError(f"mode must be 'mock' or 'http', got {self.mode!r}")
        if self.mode == "http" and not self.generator_url:
            raise ValueError("mode 'http' requires generator_url")


def load_config(path) -> ServiceConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    section = data.get("service", data)
    known = {f for f in ServiceConfig.__dataclass_fields__}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return ServiceConfig(**section)
