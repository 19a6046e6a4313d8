"""Synthetic desk-scale city generator.

Emits everything the pipeline consumes — driving-factor rasters for one
year, a stations CSV, monthly ground truth, a study-area file, a catalog
— plus a manifest recording the generating model. Targets are built as

    y = intercept + sum_j beta_j * f_j(station, month) + gaussian noise

where f_j are the very values the dataset builder will sample back out
of the rasters, so the manifest relation is exact by construction. The
betas are rescaled so the linear signal has a fixed standard deviation,
which pins the achievable R^2 independent of how the per-variable fields
happen to correlate.

Everything is derived from numpy generators seeded off one root seed, so
a fixed seed reproduces the fixture byte for byte.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
import yaml

from aqgrid.dataset import LayerSet, Station, extract_features
from aqgrid.jsonutil import canonical_dumps
from aqgrid.raster.grid import METERS_PER_DEGREE_LAT, GeoBounds, GridSpec
from aqgrid.raster.io import write_raster
from aqgrid.raster.layer import RasterLayer, Temporal
from aqgrid.raster.variables import INPUT_VARIABLES, STATIC_NAMES

CITY_ID = "fixtureville"
CITY_NAME = "Fixtureville"
YEAR = 2019
POLLUTANT = "no2"
N_STATIONS = 10
INTERCEPT = 50.0
SIGNAL_SD = 10.0
NOISE_SD = 2.0

# per-variable field shape: base level, north-south and west-east slopes
# (per cell index), seasonal amplitude, per-cell noise sd, season phase
_FIELDS = {
    "no2_column":    (8.0e-5, 6.0e-6, -4.0e-6, 1.5e-5, 2.0e-6, 0.0),
    "precipitation": (90.0, 4.0, 3.0, 60.0, 4.0, 3.1),
    "temperature":   (298.0, -0.5, 0.3, 4.0, 0.2, 1.2),
    "wind_speed":    (3.0, 0.15, -0.2, 1.2, 0.1, 2.0),
    "population":    (5000.0, 900.0, 600.0, 0.0, 250.0, 0.0),
    "elevation":     (900.0, -8.0, 5.0, 0.0, 3.0, 0.0),
    "night_lights":  (30.0, 4.0, -3.0, 6.0, 1.5, 0.4),
}

# relative contribution weights of each factor to the target signal
_WEIGHTS = {
    "no2_column": 6.0,
    "precipitation": -2.0,
    "temperature": 4.0,
    "wind_speed": -3.0,
    "population": 4.0,
    "elevation": -1.5,
    "night_lights": 3.0,
}


def fixture_bounds() -> GeoBounds:
    """A 30 km x 30 km box, both extents exact multiples of the 3 km cell."""
    min_lat = 12.9
    max_lat = min_lat + 30_000.0 / METERS_PER_DEGREE_LAT
    min_lon = 77.45
    mid_lat = 0.5 * (min_lat + max_lat)
    max_lon = min_lon + 30_000.0 / (METERS_PER_DEGREE_LAT * math.cos(math.radians(mid_lat)))
    return GeoBounds(min_lon=min_lon, max_lon=max_lon, min_lat=min_lat, max_lat=max_lat)


def _field_values(grid: GridSpec, name: str, month: int, seed: int) -> np.ndarray:
    base, r_slope, c_slope, seas, noise, phase = _FIELDS[name]
    var_index = [v.name for v in INPUT_VARIABLES].index(name)
    r = np.arange(grid.rows)[:, None] - (grid.rows - 1) / 2.0
    c = np.arange(grid.cols)[None, :] - (grid.cols - 1) / 2.0
    vals = base + r_slope * r + c_slope * c
    if month:
        vals = vals + seas * math.sin(2.0 * math.pi * (month - 1) / 12.0 + phase)
    rng = np.random.default_rng([seed, var_index, month])
    vals = vals + noise * rng.standard_normal((grid.rows, grid.cols))
    return vals


def generate_fixture(out_dir, seed: int = 0) -> dict:
    """Write the complete fixture into out_dir; returns the manifest."""
    out = Path(out_dir)
    rasters = out / "rasters"
    bounds = fixture_bounds()
    grid = GridSpec.from_bounds(bounds, 3000.0)

    months = [Temporal.of_month(YEAR, m) for m in range(1, 13)]
    layers = LayerSet()
    for var in INPUT_VARIABLES:
        var_dir = rasters / var.name
        var_dir.mkdir(parents=True, exist_ok=True)
        if var.name in STATIC_NAMES:
            layer = RasterLayer(
                grid=grid, values=_field_values(grid, var.name, 0, seed),
                variable=var.name, temporal=Temporal.static(),
            )
            write_raster(layer, var_dir / "static.asc")
            layers.add(layer)
        else:
            for t in months:
                layer = RasterLayer(
                    grid=grid, values=_field_values(grid, var.name, t.month, seed),
                    variable=var.name, temporal=t,
                )
                write_raster(layer, var_dir / f"{t.key()}.tif")
                layers.add(layer)

    # stations at distinct cell centers, so sampling returns field values
    # exactly
    st_rng = np.random.default_rng([seed, 99])
    cells = st_rng.choice(grid.rows * grid.cols, size=N_STATIONS, replace=False)
    stations = []
    for k, cell in enumerate(cells):
        row, col = divmod(int(cell), grid.cols)
        lon, lat = grid.cell_center(row, col)
        stations.append(Station(
            id=f"st{k:02d}", name=f"Station {k:02d}", lon=lon, lat=lat,
        ))
    with open(out / "stations.csv", "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "lon", "lat"])
        for s in stations:
            w.writerow([s.id, s.name, repr(s.lon), repr(s.lat)])

    # sample features exactly as the dataset builder will
    feature_order = tuple(v.name for v in INPUT_VARIABLES)
    table = extract_features(stations, layers, months, variables=feature_order)
    feats = table.features
    assert not np.isnan(feats).any(), "fixture rasters have no nodata"

    sds = feats.std(axis=0)
    raw_betas = np.array([
        _WEIGHTS[name] / sds[j] for j, name in enumerate(feature_order)
    ])
    raw_signal = feats @ raw_betas
    scale = SIGNAL_SD / raw_signal.std()
    betas = raw_betas * scale
    signal = feats @ betas
    intercept = INTERCEPT - float(signal.mean())

    noise = np.random.default_rng([seed, 7]).normal(0.0, NOISE_SD, size=len(table))
    targets = intercept + signal + noise
    if targets.min() <= 0.0:
        raise AssertionError(
            f"fixture produced a non-positive concentration ({targets.min():.3f}); "
            "choose another seed"
        )

    with open(out / "ground_truth.csv", "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["station_id", "year", "month", "pollutant", "value"])
        for i in range(len(table)):
            w.writerow([
                table.station_ids[i], int(table.years[i]), int(table.months[i]),
                POLLUTANT, repr(float(targets[i])),
            ])

    area = {
        "id": CITY_ID,
        "name": CITY_NAME,
        "bounds": bounds.to_dict(),
    }
    (out / "area.json").write_text(canonical_dumps(area) + "\n", encoding="ascii")

    manifest = {
        "seed": seed,
        "city": CITY_ID,
        "year": YEAR,
        "pollutant": POLLUTANT,
        "bounds": bounds.to_dict(),
        "grid": {"rows": grid.rows, "cols": grid.cols, "cell_size_m": grid.cell_size_m},
        "stations": [s.id for s in stations],
        "feature_order": list(feature_order),
        "intercept": intercept,
        "betas": {name: float(b) for name, b in zip(feature_order, betas)},
        "noise_sd": NOISE_SD,
        "signal_sd": SIGNAL_SD,
        "n_rows": len(table),
    }
    (out / "manifest.json").write_text(canonical_dumps(manifest) + "\n", encoding="ascii")

    catalog = {
        "version": "fixture-1",
        "cities": {
            CITY_ID: {
                "name": CITY_NAME,
                "area_file": "area.json",
                "stations_file": "stations.csv",
                "ground_truth_file": "ground_truth.csv",
                "rasters_dir": "rasters",
                "years": [YEAR],
                "pollutants": [POLLUTANT],
            }
        },
    }
    (out / "catalog.yaml").write_text(
        yaml.safe_dump(catalog, sort_keys=True), encoding="ascii"
    )
    return manifest
