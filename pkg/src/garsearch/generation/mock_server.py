"""FastAPI app serving the generator wire protocol over the mocks.

This is the deterministic model server used in tests and CI: it exposes
exactly the endpoints a real model gateway would, backed by the
substitution/fixture mocks, so the HTTP client path is exercised without
any model weights.
"""

from __future__ import annotations

import base64

from fastapi import FastAPI
from pydantic import BaseModel

from ..errors import GarError
from .mocks import MockGeneratorBackend, mock_backend


class T2TRequest(BaseModel):
    query: str
    concepts: list[str] = []
    oov: list[str] = []
    n: int = 1


class T2IRequest(BaseModel):
    prompt: str
    n: int = 1
    seed: int = 0


class I2TRequest(BaseModel):
    image: str


class EmbedTextRequest(BaseModel):
    texts: list[str]


class EmbedImageRequest(BaseModel):
    images: list[str]


def create_mock_server(backend: MockGeneratorBackend | None = None) -> FastAPI:
    backend = backend or mock_backend()
    app = FastAPI(title="garsearch mock generator server")

    @app.exception_handler(GarError)
    async def _gar_error(_, exc: GarError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"error": exc.code, "detail": exc.detail})

    @app.post("/t2t")
    def t2t(req: T2TRequest):
        return {"texts": backend.t2t(req.query, req.concepts, req.oov, req.n)}

    @app.post("/t2i")
    def t2i(req: T2IRequest):
        images = backend.t2i(req.prompt, req.n, req.seed)
        return {"images": [base64.b64encode(img.data).decode("ascii") for img in images]}

    @app.post("/i2t")
    def i2t(req: I2TRequest):
        return {"caption": backend.i2t(base64.b64decode(req.image))}

    @app.post("/embed/text")
    def embed_text(req: EmbedTextRequest):
        return {"vectors": backend.embed_text(req.texts).tolist()}

    @app.post("/embed/image")
    def embed_image(req: EmbedImageRequest):
        vectors = backend.embed_image([base64.b64decode(b) for b in req.images])
        return {"vectors": vectors.tolist()}

    return app
