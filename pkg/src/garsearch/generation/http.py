"""HTTP backend for the generator wire protocol.

All five operations are JSON-over-HTTP POSTs against one base URL:

    /t2t          {"query", "concepts", "oov", "n"}   -> {"texts"}
    /t2i          {"prompt", "n", "seed"}             -> {"images": [b64 PNG]}
    /i2t          {"image": b64 PNG}                  -> {"caption"}
    /embed/text   {"texts"}                           -> {"vectors"}
    /embed/image  {"images": [b64 PNG]}               -> {"vectors"}

Failures surface as GeneratorRequestFailed, which the variant pipeline
turns into a degraded (empty) channel. A per-backend semaphore bounds
concurrent in-flight requests.
"""

from __future__ import annotations

import base64
import threading

import httpx
import numpy as np

from ..errors import GeneratorRequestFailed
from .images import provenance_of
from .variants import GeneratedImage

DEFAULT_INFLIGHT_CAP = 4


class HttpGeneratorBackend:
    """Generator backend speaking the wire protocol against a base URL.

    Pass a preconfigured httpx.Client to control transport (tests inject
    an ASGI transport bound to the mock server app).
    """

    def __init__(self, base_url: str, client: httpx.Client | None = None,
                 timeout: float = 30.0, inflight_cap: int = DEFAULT_INFLIGHT_CAP):
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout)
        self._gate = threading.BoundedSemaphore(inflight_cap)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            with self._gate:
                response = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise GeneratorRequestFailed(f"POST {path}: {exc}") from exc
        if response.status_code != 200:
            raise GeneratorRequestFailed(f"POST {path}: HTTP {response.status_code}")
        return response.json()

    def t2t(self, query: str, concepts: list[str], oov: list[str], n: int) -> list[str]:
        body = self._post("/t2t", {"query": query, "concepts": concepts, "oov": oov, "n": n})
        return [str(t) for t in body["texts"]]

    def t2i(self, prompt: str, n: int, seed: int) -> list[GeneratedImage]:
        body = self._post("/t2i", {"prompt": prompt, "n": n, "seed": seed})
        images = []
        for b64 in body["images"]:
            data = base64.b64decode(b64)
            images.append(GeneratedImage(data, provenance_of(data) or prompt, seed))
        return images

    def i2t(self, image: GeneratedImage | bytes) -> str:
        data = image.data if isinstance(image, GeneratedImage) else image
        body = self._post("/i2t", {"image": base64.b64encode(data).decode("ascii")})
        return str(body["caption"])

    def embed_text(self, texts: list[str]) -> np.ndarray:
        body = self._post("/embed/text", {"texts": list(texts)})
        return np.asarray(body["vectors"], dtype=np.float32)

    def embed_image(self, images: list[GeneratedImage | bytes]) -> np.ndarray:
        payload = [
            base64.b64encode(img.data if isinstance(img, GeneratedImage) else img).decode("ascii")
            for img in images
        ]
        body = self._post("/embed/image", {"images": payload})
        return np.asarray(body["vectors"], dtype=np.float32)
