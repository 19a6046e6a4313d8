"""Orchestration layer: dataset build, training runs, composites, surfaces."""

import numpy as np
import pytest

from aqgrid.errors import DataError, ValidationError
from aqgrid.pipeline import (
    build_dataset,
    load_raster_dir,
    run_surface,
    run_training,
    select_factors,
    yearly_composites,
)
from aqgrid.raster.layer import Temporal
from aqgrid.surface import load_study_area

MONTHS_2019 = [Temporal.of_month(2019, m) for m in range(1, 13)]


def test_build_dataset_report(fixture_dir):
    table, report = build_dataset(
        fixture_dir / "stations.csv", fixture_dir / "rasters",
        fixture_dir / "ground_truth.csv", 2019, "no2",
    )
    assert report["stations"] == 10
    assert report["months"] == 12
    assert report["rows_total"] == 120
    assert report["rows_removed"] == 0
    assert report["rows_written"] == 120
    assert report["skipped_observations"] == 0
    assert len(report["feature_names"]) == 7
    assert len(table) == 120
    assert not np.isnan(table.features).any()


def test_build_dataset_rejects_unknown_variable(fixture_dir):
    with pytest.raises(ValidationError) as err:
        build_dataset(
            fixture_dir / "stations.csv", fixture_dir / "rasters",
            fixture_dir / "ground_truth.csv", 2019, "no2",
            variables=["temperature", "humidity"],
        )
    assert "humidity" in str(err.value)


def test_build_dataset_wrong_year_has_no_rasters(fixture_dir):
    with pytest.raises(DataError) as err:
        build_dataset(
            fixture_dir / "stations.csv", fixture_dir / "rasters",
            fixture_dir / "ground_truth.csv", 2021, "no2",
        )
    assert "2021" in str(err.value)


def test_load_raster_dir_errors(fixture_dir, tmp_path):
    with pytest.raises(DataError) as err:
        load_raster_dir(tmp_path / "nope", ["temperature"], MONTHS_2019)
    assert "nope" in str(err.value)
    with pytest.raises(DataError) as err:
        load_raster_dir(fixture_dir / "rasters", ["wind_gust"], MONTHS_2019)
    assert "wind_gust" in str(err.value)


def test_select_factors_subsets_in_request_order(fixture_table):
    sub = select_factors(fixture_table, ["elevation", "temperature"])
    assert sub.feature_names == ("elevation", "temperature")
    i_el = fixture_table.feature_names.index("elevation")
    assert np.array_equal(sub.features[:, 0], fixture_table.features[:, i_el])
    assert np.array_equal(sub.targets, fixture_table.targets)


def test_select_factors_names_missing_and_available(fixture_table):
    with pytest.raises(ValidationError) as err:
        select_factors(fixture_table, ["temperature", "ozone"])
    msg = str(err.value)
    assert "ozone" in msg
    assert "temperature" in msg  # the available list is spelled out


def test_run_training_info_and_metrics(fixture_table):
    model, metrics, search, info = run_training(fixture_table, "linear", seed=0)
    assert info == {"train_rows": 84, "test_rows": 36, "seed": 0, "kind": "linear"}
    assert search is None
    assert metrics.r2 > 0.9
    assert model.feature_names == fixture_table.feature_names


def test_run_training_with_explicit_grid(fixture_table):
    small = select_factors(fixture_table, ["no2_column", "temperature", "population"])
    model, metrics, search, _ = run_training(
        small, "random_forest", seed=0,
        grid={"n_trees": [10, 25], "max_depth": [6]}, cv_folds=3,
    )
    assert search is not None
    assert len(search.evaluated) == 2
    assert search.best["n_trees"] in (10, 25)
    assert metrics.r2 > 0.5


def test_yearly_composites_statics_pass_through(fixture_dir):
    layers = load_raster_dir(
        fixture_dir / "rasters", ["temperature", "elevation"], MONTHS_2019
    )
    comps = yearly_composites(layers, ["temperature", "elevation"], 2019)
    # the static layer is handed back untouched, not averaged
    assert comps["elevation"] is layers.require("elevation", Temporal.static())
    jan = layers.require("temperature", Temporal.of_month(2019, 1))
    monthly = np.stack([
        layers.require("temperature", Temporal.of_month(2019, m)).values
        for m in range(1, 13)
    ])
    assert np.allclose(comps["temperature"].values, monthly.mean(axis=0))
    assert comps["temperature"].grid == jan.grid


def test_yearly_composites_missing_year(fixture_dir):
    layers = load_raster_dir(fixture_dir / "rasters", ["temperature"], MONTHS_2019)
    with pytest.raises(DataError):
        yearly_composites(layers, ["temperature"], 2020)


def test_run_surface_counts_and_ids(fixture_dir, fixture_table):
    model, _, _, _ = run_training(fixture_table, "linear", seed=0)
    area = load_study_area(fixture_dir / "area.json")
    layers = load_raster_dir(
        fixture_dir / "rasters", fixture_table.feature_names, MONTHS_2019
    )
    comps = yearly_composites(layers, fixture_table.feature_names, 2019)
    surface = run_surface(model, area, comps, "deadbeef", "no2", spacing_m=3000.0)
    assert (surface.ny, surface.nx) == (10, 10)
    assert len(surface) == 100
    assert surface.scenario_id == "deadbeef"
    assert all(v is not None for v in surface.values)
    vals = np.array(surface.present_values())
    # predictions should live in the neighborhood of the training targets
    assert vals.mean() == pytest.approx(fixture_table.targets.mean(), abs=10.0)
