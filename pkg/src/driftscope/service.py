"""Read-only HTTP facade over a precomputed analysis bundle."""

from __future__ import annotations

import os
import uuid

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, JSONResponse

from .bundle import AnalysisBundle
from .explore import UnknownWordError

STATIC_DIR = os.path.join(os.path.dirname(__file__), "static")


def create_app(bundle: AnalysisBundle, static_dir: str | None = None) -> FastAPI:
    bundle.validate()
    app = FastAPI(title="driftscope", docs_url=None, redoc_url=None)
    static = static_dir or STATIC_DIR

    @app.exception_handler(UnknownWordError)
    async def _unknown_word(request: Request, exc: UnknownWordError):
        return JSONResponse(status_code=404, content={"error": "unknown_word"})

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500, content={"error": "internal", "id": uuid.uuid4().hex}
        )

    @app.get("/api/meta")
    def meta():
        return bundle.meta

    @app.get("/api/words")
    def words(prefix: str = "", limit: int = Query(50, ge=0, le=1000),
              offset: int = Query(0, ge=0)):
        return {"words": bundle.list_words(prefix, limit, offset)}

    @app.get("/api/series/{word}")
    def series(word: str):
        return bundle.series(word)

    @app.get("/api/neighbors/{word}")
    def neighbors(word: str, t: int = 0, k: int = Query(10, ge=0),
                  metric: str = "cosine"):
        return bundle.neighbors(word, t, k, metric)

    @app.get("/api/trajectory/{word}")
    def trajectory(word: str, k: int = Query(2, ge=0)):
        return bundle.trajectory(word, k)

    @app.get("/api/clusters")
    def clusters(stat: str = "chi"):
        if stat not in bundle.clusters:
            raise HTTPException(status_code=400,
                                detail=f"unknown stat {stat!r}; have {sorted(bundle.clusters)}")
        return {"stat": stat, "clusters": bundle.clusters[stat]}

    @app.get("/api/forecast/{word}")
    def forecast(word: str, task: str = "shift", horizon: int = 1,
                 model: str = "lstm"):
        try:
            return bundle.forecast_for(word, task, horizon, model)
        except KeyError as exc:
            if isinstance(exc, UnknownWordError):
                raise
            raise HTTPException(
                status_code=400,
                detail=f"no precomputed forecast for {task}:{horizon}:{model}",
            ) from exc

    @app.get("/api/corr")
    def corr(kind: str = "cross_region", region: str = ""):
        if kind == "cross_region":
            result = bundle.correlations.get("cross_region")
            if result is None:
                raise HTTPException(status_code=400, detail="no cross-region data")
            return result
        if kind == "usage_vs_shift":
            table = bundle.correlations.get("usage_vs_shift", {})
            if region not in table:
                raise HTTPException(
                    status_code=400,
                    detail=f"unknown region {region!r}; have {sorted(table)}",
                )
            return table[region]
        raise HTTPException(status_code=400, detail=f"unknown kind {kind!r}")

    @app.get("/")
    def index():
        path = os.path.join(static, "index.html")
        if not os.path.exists(path):
            return JSONResponse({"service": "driftscope", "ui": "not built"})
        return FileResponse(path)

    @app.get("/assets/{name}")
    def asset(name: str):
        if "/" in name or ".." in name:
            raise HTTPException(status_code=404, detail="not found")
        path = os.path.join(static, name)
        if not os.path.exists(path):
            raise HTTPException(status_code=404, detail="not found")
        return FileResponse(path)

    return app


def serve(bundle: AnalysisBundle, bind: str = "127.0.0.1:8000",
          static_dir: str | None = None) -> None:
    """Run the server until interrupted. DRIFTSCOPE_BIND overrides bind."""
    import uvicorn

    bind = os.environ.get("DRIFTSCOPE_BIND", bind)
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(bundle, static_dir), host=host or "127.0.0.1",
                port=int(port))
