"""The embed protocol over FastAPI.

POST /embed  {"texts": [str, ...]}
    200  {"vectors": [[float, ...], ...], "dim": int, "model": str}
    400  {"error": str}   malformed body
    413  {"error": str}   batch larger than the configured maximum
GET /health
    200  {"model": str, "dim": int}

The service is stateless and inference-only; callers own any caching.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8601
    max_batch_size: int = 256


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(model, max_batch_size: int = 256) -> FastAPI:
    app = FastAPI(title="embed-service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.post("/embed")
    def embed(request: EmbedRequest):
        if len(request.texts) > max_batch_size:
            return JSONResponse(
                status_code=413,
                content={"error": (
                    f"batch of {len(request.texts)} exceeds the maximum of "
                    f"{max_batch_size}"
                )},
            )
        vectors = model.encode(request.texts)
        return {"vectors": vectors, "dim": model.dim, "model": model.model_id}

    @app.get("/health")
    def health():
        return {"model": model.model_id, "dim": model.dim}

    return app
