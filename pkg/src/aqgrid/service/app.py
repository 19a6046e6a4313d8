"""HTTP/JSON API over the scenario runner.

Routes (paths are part of the public contract):
  GET  /api/catalog                      catalog summary
  POST /api/scenarios                    create (idempotent) -> {id, status, cached}
  GET  /api/scenarios/{id}               status snapshot; metrics inline when done
  GET  /api/scenarios/{id}/surface       geojson or csv, dynamic or fixed legend
  GET  /api/health                       liveness + job counters
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from aqgrid.errors import DataError, ValidationError
from aqgrid.service.catalog import load_catalog
from aqgrid.service.config import ServiceConfig
from aqgrid.service.runner import ScenarioRunner
from aqgrid.surface import make_legend, surface_to_csv, surface_to_geojson

_FORMATS = ("geojson", "csv")
_LEGEND_MODES = ("dynamic", "fixed")


def create_app(config: ServiceConfig, static_dir=None) -> FastAPI:
    catalog = load_catalog(config.catalog_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.runner.close()

    app = FastAPI(title="aqgrid", lifespan=lifespan)
    app.state.runner = ScenarioRunner(
        catalog, config.store_dir, workers=config.workers, spacing_m=config.spacing_m,
    )
    app.state.catalog = catalog

    @app.exception_handler(ValidationError)
    async def _validation(_req: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(DataError)
    async def _data(_req: Request, exc: DataError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/api/health")
    def health():
        runner: ScenarioRunner = app.state.runner
        return {"ok": True, "scenarios": len(runner.ids()), "jobs": dict(runner.counters)}

    @app.get("/api/catalog")
    def catalog_summary():
        return app.state.catalog.summary()

    @app.post("/api/scenarios")
    def create_scenario(payload: dict):
        # accept both the bare config object and {"config": {...}}
        if set(payload) == {"config"} and isinstance(payload["config"], dict):
            payload = payload["config"]
        return app.state.runner.create(payload)

    @app.get("/api/scenarios/{sid}")
    def get_scenario(sid: str):
        try:
            return app.state.runner.get(sid)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown scenario id {sid!r}")

    @app.get("/api/scenarios/{sid}/surface")
    def get_surface(
        sid: str,
        format: str = Query("geojson"),
        legend: str = Query("dynamic"),
        min: Optional[float] = Query(None),
        max: Optional[float] = Query(None),
    ):
        if format not in _FORMATS:
            raise ValidationError(f"format must be one of {list(_FORMATS)}, got {format!r}")
        if legend not in _LEGEND_MODES:
            raise ValidationError(f"legend must be one of {list(_LEGEND_MODES)}, got {legend!r}")
        try:
            surface = app.state.runner.get_surface(sid)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown scenario id {sid!r}")
        leg = make_legend(surface, mode=legend, fixed_min=min, fixed_max=max)
        if format == "csv":
            return PlainTextResponse(surface_to_csv(surface), media_type="text/csv")
        return JSONResponse(surface_to_geojson(surface, leg))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
