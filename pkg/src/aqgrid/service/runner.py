"""Scenario identity, execution, and persistence.

A scenario is identified by the sha256 of its canonicalized config plus
the catalog version, so resubmitting the same configuration — in this
process or after a restart — finds the stored result instead of
retraining. Jobs run on a bounded thread pool; a result only becomes
visible as done after its directory has been atomically renamed into
place, and partially written directories found at startup are quarantined
rather than loaded.
"""

from __future__ import annotations

import hashlib
import logging
import shutil
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from aqgrid.errors import AqgridError, ValidationError
from aqgrid.jsonutil import canonical_dumps, dump_canonical, load_json
from aqgrid.models.serialize import save_model
from aqgrid.models.train import ModelKind
from aqgrid.pipeline import (
    build_dataset,
    load_raster_dir,
    run_surface,
    run_training,
    yearly_composites,
)
from aqgrid.raster.grid import GridSpec
from aqgrid.raster.layer import Temporal
from aqgrid.raster.variables import INPUT_NAMES
from aqgrid.service.catalog import Catalog
from aqgrid.surface import PredictionSurface

log = logging.getLogger("aqgrid.service")

RESULT_FILE = "result.json"
MODEL_FILE = "model.json"
SURFACE_FILE = "surface.json"


@dataclass(frozen=True)
class ScenarioConfig:
    city: str
    year: int
    pollutant: str
    model: str
    factors: tuple
    seed: int = 0
    grid: Optional[object] = None  # dict, "default", or None

    def to_dict(self) -> dict:
        return {
            "city": self.city,
            "year": self.year,
            "pollutant": self.pollutant,
            "model": self.model,
            "factors": list(self.factors),
            "seed": self.seed,
            "grid": self.grid,
        }


def validate_config(raw: dict, catalog: Catalog) -> ScenarioConfig:
    """Check a request against the catalog and normalize it.

    Factor subsets are reordered to the catalog's variable order, so two
    requests naming the same set in different orders are one scenario.
    """
    if not isinstance(raw, dict):
        raise ValidationError("scenario config must be an object")
    for req in ("city", "year", "pollutant", "model", "factors"):
        if req not in raw:
            raise ValidationError(f"scenario config missing field {req!r}")

    entry = catalog.entry(str(raw["city"]))
    try:
        year = int(raw["year"])
    except (TypeError, ValueError):
        raise ValidationError(f"year must be an integer, got {raw['year']!r}") from None
    if year not in entry.years:
        raise ValidationError(
            f"city {entry.city_id!r} has no year {year} (available: {list(entry.years)})"
        )
    pollutant = str(raw["pollutant"])
    if pollutant not in entry.pollutants:
        raise ValidationError(
            f"city {entry.city_id!r} has no pollutant {pollutant!r} "
            f"(available: {list(entry.pollutants)})"
        )
    kind = ModelKind.parse(raw["model"])

    factors = raw["factors"]
    if not isinstance(factors, (list, tuple)) or not factors:
        raise ValidationError("factors must be a nonempty list of variable names")
    unknown = [f for f in factors if f not in INPUT_NAMES]
    if unknown:
        raise ValidationError(f"unknown factors: {unknown} (inputs: {list(INPUT_NAMES)})")
    if len(set(factors)) != len(factors):
        raise ValidationError("factors list contains duplicates")
    ordered = tuple(n for n in INPUT_NAMES if n in set(factors))

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValidationError(f"seed must be a non-negative integer, got {seed!r}")

    grid = raw.get("grid")
    if grid in ({}, [], ""):
        grid = None
    if grid is not None and grid != "default" and not isinstance(grid, dict):
        raise ValidationError("grid must be an object of parameter lists, or \"default\"")

    return ScenarioConfig(
        city=entry.city_id, year=year, pollutant=pollutant,
        model=kind.value, factors=ordered, seed=seed, grid=grid,
    )


def scenario_id(config: ScenarioConfig, catalog_version: str) -> str:
    doc = canonical_dumps({
        "config": config.to_dict(),
        "dataset_version": catalog_version,
    })
    return hashlib.sha256(doc.encode("ascii")).hexdigest()[:16]


@dataclass
class ScenarioState:
    id: str
    config: ScenarioConfig
    status: str = "pending"            # pending | running | done | failed
    reason: str = ""                   # nonempty iff failed
    result: Optional[dict] = None      # the persisted result document
    surface: Optional[PredictionSurface] = None
    created_at: float = field(default_factory=time.time)

    def snapshot(self) -> dict:
        doc = {
            "id": self.id,
            "status": self.status,
            "config": self.config.to_dict(),
        }
        if self.status == "failed":
            doc["reason"] = self.reason
        if self.status == "done" and self.result is not None:
            for key in ("metrics", "train_rows", "test_rows", "grid_search",
                        "dataset_report", "timings", "dataset_version"):
                if key in self.result:
                    doc[key] = self.result[key]
            doc["surface_url"] = f"/api/scenarios/{self.id}/surface"
        return doc


class ScenarioRunner:
    """Owns scenario state, the worker pool, and the on-disk store."""

    def __init__(self, catalog: Catalog, store_dir, workers: int = 2,
                 spacing_m: float = 3000.0):
        self.catalog = catalog
        self.store = Path(store_dir)
        self.spacing_m = spacing_m
        self.store.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._states: dict = {}
        self._pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="scenario")
        self.counters = {"submitted": 0, "executed": 0, "completed": 0, "failed": 0}
        self._load_all()

    # ------------------------------------------------------------- lifecycle

    def close(self):
        self._pool.shutdown(wait=False, cancel_futures=True)

    def _load_all(self):
        for child in sorted(self.store.iterdir()) if self.store.exists() else []:
            if not child.is_dir() or child.name.startswith("."):
                continue
            try:
                doc = load_json(child / RESULT_FILE)
                if doc.get("status") != "done":
                    raise ValueError(f"status {doc.get('status')!r} is not done")
                config = validate_config(doc["config"], self.catalog)
                sid = doc["id"]
                expected = scenario_id(config, self.catalog.version)
                if sid != child.name:
                    raise ValueError(f"id {sid!r} does not match directory name")
                if sid != expected:
                    # config/dataset changed since this was written; stale
                    raise ValueError("stored result does not match current catalog version")
                if not (child / MODEL_FILE).is_file():
                    raise ValueError("model file missing")
                surface = PredictionSurface.from_dict(load_json(child / SURFACE_FILE))
            except Exception as exc:
                self._quarantine(child, str(exc))
                continue
            state = ScenarioState(id=sid, config=config, status="done",
                                  result=doc, surface=surface)
            self._states[sid] = state
        if self._states:
            log.info("restored %d completed scenarios from %s", len(self._states), self.store)

    def _quarantine(self, path: Path, why: str):
        qdir = self.store / ".quarantine"
        qdir.mkdir(exist_ok=True)
        target = qdir / f"{path.name}-{uuid.uuid4().hex[:8]}"
        log.warning("quarantining %s: %s", path, why)
        shutil.move(str(path), str(target))

    # ------------------------------------------------------------------- api

    def create(self, raw_config: dict) -> dict:
        config = validate_config(raw_config, self.catalog)
        sid = scenario_id(config, self.catalog.version)
        with self._lock:
            state = self._states.get(sid)
            if state is not None:
                return {"id": sid, "status": state.status, "cached": True}
            state = ScenarioState(id=sid, config=config)
            self._states[sid] = state
            self.counters["submitted"] += 1
        self._pool.submit(self._run_job, sid)
        return {"id": sid, "status": "pending", "cached": False}

    def get(self, sid: str) -> dict:
        with self._lock:
            state = self._states.get(sid)
            if state is None:
                raise KeyError(sid)
            return state.snapshot()

    def get_surface(self, sid: str) -> PredictionSurface:
        with self._lock:
            state = self._states.get(sid)
            if state is None:
                raise KeyError(sid)
            if state.status != "done" or state.surface is None:
                raise ValidationError(
                    f"scenario {sid} has no surface yet (status {state.status})"
                )
            return state.surface

    def ids(self):
        with self._lock:
            return sorted(self._states)

    # ------------------------------------------------------------------ jobs

    def _set_status(self, sid: str, status: str, reason: str = ""):
        with self._lock:
            state = self._states[sid]
            state.status = status
            state.reason = reason

    def _run_job(self, sid: str):
        with self._lock:
            state = self._states[sid]
            self.counters["executed"] += 1
        try:
            self._set_status(sid, "running")
            result, model, surface = self._execute(state.config, sid)
            self._persist(sid, result, model, surface)
            with self._lock:
                state.result = result
                state.surface = surface
                state.status = "done"
                self.counters["completed"] += 1
        except AqgridError as exc:
            log.warning("scenario %s failed: %s", sid, exc)
            with self._lock:
                state.status = "failed"
                state.reason = str(exc)
                self.counters["failed"] += 1
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("scenario %s crashed", sid)
            with self._lock:
                state.status = "failed"
                state.reason = f"internal error: {exc}"
                self.counters["failed"] += 1

    def _execute(self, config: ScenarioConfig, sid: str):
        entry = self.catalog.entry(config.city)
        timings = {}
        t0 = time.perf_counter()

        target_grid = GridSpec.from_bounds(entry.area.bounds, 3000.0)
        table, report = build_dataset(
            entry.stations_file, entry.rasters_dir, entry.ground_truth_file,
            year=config.year, pollutant=config.pollutant,
            variables=config.factors, target_grid=target_grid,
        )
        timings["build_dataset_s"] = round(time.perf_counter() - t0, 6)

        t1 = time.perf_counter()
        grid = None
        use_default = False
        if config.grid == "default":
            use_default = True
        elif isinstance(config.grid, dict):
            grid = config.grid
        model, metrics, search, info = run_training(
            table, config.model, seed=config.seed,
            grid=grid, use_default_grid=use_default,
        )
        timings["train_s"] = round(time.perf_counter() - t1, 6)

        t2 = time.perf_counter()
        months = [Temporal.of_month(config.year, m) for m in range(1, 13)]
        layers = load_raster_dir(entry.rasters_dir, config.factors, months, target_grid)
        composites = yearly_composites(layers, config.factors, config.year)
        surface = run_surface(
            model, entry.area, composites, scenario_id=sid,
            pollutant=config.pollutant, spacing_m=self.spacing_m,
        )
        timings["surface_s"] = round(time.perf_counter() - t2, 6)
        timings["total_s"] = round(time.perf_counter() - t0, 6)

        result = {
            "id": sid,
            "status": "done",
            "config": config.to_dict(),
            "dataset_version": self.catalog.version,
            "dataset_report": report,
            "metrics": metrics.to_dict(),
            "train_rows": info["train_rows"],
            "test_rows": info["test_rows"],
            "grid_search": None if search is None else search.to_dict(),
            "timings": timings,
            "model_file": MODEL_FILE,
            "surface_file": SURFACE_FILE,
        }
        return result, model, surface

    def _persist(self, sid: str, result: dict, model, surface: PredictionSurface):
        tmp = self.store / f".tmp-{sid}-{uuid.uuid4().hex[:8]}"
        tmp.mkdir(parents=True)
        try:
            dump_canonical(result, tmp / RESULT_FILE)
            save_model(model, tmp / MODEL_FILE)
            dump_canonical(surface.to_dict(), tmp / SURFACE_FILE)
            final = self.store / sid
            if final.exists():
                shutil.rmtree(tmp)
            else:
                tmp.rename(final)
        except Exception:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
