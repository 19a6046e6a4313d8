"""End-to-end orchestration: rasters on disk -> dataset -> model -> surface.

The CLI commands and the HTTP service both drive these functions; nothing
here touches global state, so concurrent scenario jobs can share them.

Raster directories follow one layout: <dir>/<variable>/<slice>.<ext>,
where <slice> is "static", "YYYY" (a yearly composite), or "YYYY-MM", and
the extension picks the format (.tif/.tiff or .asc/.txt).
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from aqgrid.dataset import (
    LayerSet,
    TrainingTable,
    clean,
    extract_features,
    join_targets,
    load_ground_truth,
    load_stations,
    train_test_split,
)
from aqgrid.errors import DataError, ValidationError
from aqgrid.models.metrics import MetricsReport, evaluate
from aqgrid.models.train import ModelKind, TrainedModel, train
from aqgrid.models.tuning import DEFAULT_GRIDS, GridSearchResult, grid_search
from aqgrid.raster.grid import GridSpec
from aqgrid.raster.io import detect_format, read_raster
from aqgrid.raster.layer import RasterLayer, Temporal
from aqgrid.raster.ops import resample_to_grid, temporal_composite
from aqgrid.raster.variables import INPUT_NAMES, STATIC_NAMES
from aqgrid.surface import (
    PredictionSurface,
    StudyArea,
    build_inference_matrix,
    generate_grid,
    lattice_shape,
    predict_surface,
)

_RASTER_SUFFIXES = (".tif", ".tiff", ".asc", ".txt")


def _find_slice_file(var_dir: Path, key: str) -> Optional[Path]:
    for suffix in _RASTER_SUFFIXES:
        p = var_dir / f"{key}{suffix}"
        if p.exists():
            return p
    return None


def load_raster_dir(rasters_dir, variables, months, target_grid: Optional[GridSpec] = None) -> LayerSet:
    """Read (and, if needed, regrid) every layer the requested slices need."""
    root = Path(rasters_dir)
    if not root.is_dir():
        raise DataError(f"raster directory not found: {root}")
    layers = LayerSet()
    for name in variables:
        var_dir = root / name
        if not var_dir.is_dir():
            raise DataError(f"no raster directory for variable {name!r} under {root}")
        wanted = [Temporal.static()] if name in STATIC_NAMES else list(months)
        for t in wanted:
            path = _find_slice_file(var_dir, t.key())
            if path is None:
                raise DataError(f"missing raster for {name!r} slice {t.key()} under {var_dir}")
            layer = read_raster(path, format=detect_format(path), variable=name, temporal=t)
            if target_grid is not None and not layer.grid.approx_equals(target_grid):
                layer = resample_to_grid(layer, target_grid)
            layers.add(layer)
    return layers


def build_dataset(stations_path, rasters_dir, ground_truth_path, year: int,
                  pollutant: str, variables=None,
                  target_grid: Optional[GridSpec] = None):
    """Sample rasters at stations and join monthly observations.

    Returns (clean TrainingTable, report dict).
    """
    variables = tuple(variables) if variables else INPUT_NAMES
    unknown = [v for v in variables if v not in INPUT_NAMES]
    if unknown:
        raise ValidationError(f"unknown input variables: {unknown}")

    stations = load_stations(stations_path)
    if not stations:
        raise DataError(f"{stations_path}: no stations")
    observations, skipped = load_ground_truth(ground_truth_path)
    months = [Temporal.of_month(year, m) for m in range(1, 13)]
    layers = load_raster_dir(rasters_dir, variables, months, target_grid)

    table = extract_features(stations, layers, months, variables=variables)
    table = join_targets(table, observations, pollutant=pollutant)
    total = len(table)
    table, removed = clean(table)
    report = {
        "stations": len(stations),
        "months": len(months),
        "rows_total": total,
        "rows_removed": removed,
        "rows_written": len(table),
        "skipped_observations": skipped,
        "feature_names": list(variables),
    }
    return table, report


def select_factors(table: TrainingTable, factors) -> TrainingTable:
    """Restrict a table to a subset of its feature columns, keeping order."""
    factors = tuple(factors)
    missing = [f for f in factors if f not in table.feature_names]
    if missing:
        raise ValidationError(
            f"factors not in dataset: {missing} (have: {list(table.feature_names)})"
        )
    idx = [table.feature_names.index(f) for f in factors]
    return TrainingTable(
        feature_names=factors,
        station_ids=table.station_ids,
        years=table.years,
        months=table.months,
        features=table.features[:, idx],
        targets=table.targets,
    )


def run_training(table: TrainingTable, kind, seed: int = 0,
                 grid: Optional[dict] = None, use_default_grid: bool = False,
                 train_fraction: float = 0.7, cv_folds: int = 5):
    """Split, optionally tune, fit, and score one model.

    Returns (model, metrics, search_result_or_None, info dict).
    """
    kind = ModelKind.parse(kind)
    train_tbl, test_tbl = train_test_split(table, train_fraction, seed)

    search: Optional[GridSearchResult] = None
    params: Optional[dict] = None
    if grid:
        search = grid_search(
            kind, grid, train_tbl.features, train_tbl.targets,
            cv_folds=cv_folds, seed=seed, feature_names=table.feature_names,
        )
        params = search.best
    elif use_default_grid and DEFAULT_GRIDS.get(kind):
        search = grid_search(
            kind, DEFAULT_GRIDS[kind], train_tbl.features, train_tbl.targets,
            cv_folds=cv_folds, seed=seed, feature_names=table.feature_names,
        )
        params = search.best

    model = train(
        kind, train_tbl.features, train_tbl.targets, params=params,
        seed=seed, feature_names=table.feature_names,
    )
    metrics = evaluate(test_tbl.targets, model.predict(test_tbl.features))
    info = {
        "train_rows": len(train_tbl),
        "test_rows": len(test_tbl),
        "seed": seed,
        "kind": kind.value,
    }
    return model, metrics, search, info


def yearly_composites(layers: LayerSet, variables, year: int) -> dict:
    """Collapse each monthly variable to its year mean; statics pass through."""
    out = {}
    for name in variables:
        if name in STATIC_NAMES:
            out[name] = layers.require(name, Temporal.static())
            continue
        monthly = [
            layers.get(name, Temporal.of_month(year, m))
            for m in range(1, 13)
        ]
        monthly = [ly for ly in monthly if ly is not None]
        if not monthly:
            raise DataError(f"no monthly layers of {name!r} for {year}")
        out[name] = temporal_composite(monthly)
    return out


def run_surface(model: TrainedModel, area: StudyArea, composites: dict,
                scenario_id: str, pollutant: str, spacing_m: float = 3000.0) -> PredictionSurface:
    points = generate_grid(area, spacing_m)
    ny, nx = lattice_shape(area, spacing_m)
    X, mask = build_inference_matrix(points, composites, model.feature_names)
    # points outside the boundary polygon are masked too, never predicted
    if area.polygon is not None:
        for i, (lon, lat) in enumerate(points):
            if not area.contains(lon, lat):
                mask[i] = True
    return predict_surface(
        model, points, X, mask, scenario_id=scenario_id,
        pollutant=pollutant, spacing_m=spacing_m, nx=nx, ny=ny,
    )
