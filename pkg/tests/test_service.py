"""Scenario service: config, catalog, runner lifecycle, HTTP API."""

import json
import time

import pytest
import yaml
from fastapi.testclient import TestClient

from aqgrid.errors import DataError, ValidationError
from aqgrid.service.app import create_app
from aqgrid.service.catalog import load_catalog
from aqgrid.service.config import ServiceConfig, load_config
from aqgrid.service.runner import ScenarioRunner, scenario_id, validate_config

BASE_CONFIG = {
    "city": "fixtureville",
    "year": 2019,
    "pollutant": "no2",
    "model": "linear",
    "factors": ["no2_column", "temperature", "population", "elevation"],
}


def _wait_done(runner_or_client, sid, timeout_s=60.0):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        if isinstance(runner_or_client, ScenarioRunner):
            doc = runner_or_client.get(sid)
        else:
            doc = runner_or_client.get(f"/api/scenarios/{sid}").json()
        if doc["status"] in ("done", "failed"):
            return doc
        time.sleep(0.02)
    raise TimeoutError(f"scenario {sid} still {doc['status']}")


@pytest.fixture(scope="module")
def catalog(fixture_dir):
    return load_catalog(fixture_dir / "catalog.yaml")


@pytest.fixture()
def runner(catalog, tmp_path):
    r = ScenarioRunner(catalog, tmp_path / "store", workers=2)
    yield r
    r.close()


# -------------------------------------------------------------------- config

def test_load_config_resolves_relative_to_file(tmp_path, fixture_dir):
    cfg_file = tmp_path / "service.yaml"
    cfg_file.write_text(yaml.safe_dump({
        "catalog": str(fixture_dir / "catalog.yaml"),
        "store": "runs",
        "port": 9001,
    }))
    cfg = load_config(cfg_file, env={})
    assert cfg.catalog_path == fixture_dir / "catalog.yaml"
    assert cfg.store_dir == (tmp_path / "runs").resolve()
    assert cfg.port == 9001
    assert cfg.workers == 2  # default


def test_load_config_env_overrides(tmp_path, fixture_dir):
    cfg_file = tmp_path / "service.yaml"
    cfg_file.write_text(yaml.safe_dump({
        "catalog": str(fixture_dir / "catalog.yaml"),
        "port": 9001,
    }))
    cfg = load_config(cfg_file, env={
        "AQGRID_CATALOG": str(fixture_dir / "catalog.yaml"),
        "AQGRID_STORE": str(tmp_path / "elsewhere"),
        "AQGRID_PORT": "7777",
        "AQGRID_WORKERS": "5",
        "AQGRID_SPACING_M": "1500",
    })
    assert cfg.store_dir == tmp_path / "elsewhere"
    assert cfg.port == 7777
    assert cfg.workers == 5
    assert cfg.spacing_m == 1500.0


def test_load_config_requires_catalog(tmp_path):
    cfg_file = tmp_path / "service.yaml"
    cfg_file.write_text(yaml.safe_dump({"port": 9001}))
    with pytest.raises(ValidationError):
        load_config(cfg_file, env={})
    with pytest.raises(ValidationError):
        load_config(None, env={})


def test_service_config_validation(tmp_path):
    with pytest.raises(ValidationError):
        ServiceConfig(catalog_path=tmp_path, store_dir=tmp_path, workers=0)
    with pytest.raises(ValidationError):
        ServiceConfig(catalog_path=tmp_path, store_dir=tmp_path, port=0)


# ------------------------------------------------------------------- catalog

def test_catalog_loads_fixture(catalog):
    entry = catalog.entry("fixtureville")
    assert entry.years == (2019,)
    assert entry.pollutants == ("no2",)
    assert entry.stations_file.is_file()
    assert entry.rasters_dir.is_dir()
    assert entry.area.bounds.min_lat < entry.area.bounds.max_lat
    summary = catalog.summary()
    assert summary["version"] == "fixture-1"
    assert len(summary["variables"]) == 7
    assert set(summary["model_kinds"]) == {
        "linear", "random_forest", "svr", "gradient_boosting",
    }


def test_catalog_unknown_city_names_known(catalog):
    with pytest.raises(ValidationError) as err:
        catalog.entry("atlantis")
    assert "fixtureville" in str(err.value)


def test_catalog_missing_file_fails_at_load(tmp_path, fixture_dir):
    doc = yaml.safe_load((fixture_dir / "catalog.yaml").read_text())
    city = doc["cities"]["fixtureville"]
    for key in ("area_file", "stations_file", "ground_truth_file", "rasters_dir"):
        city[key] = str(fixture_dir / city[key])
    city["stations_file"] = str(tmp_path / "gone.csv")
    bad = tmp_path / "catalog.yaml"
    bad.write_text(yaml.safe_dump(doc))
    with pytest.raises(DataError) as err:
        load_catalog(bad)
    assert "gone.csv" in str(err.value)


# ------------------------------------------------------------ config checks

def test_validate_config_normalizes_factor_order(catalog):
    a = validate_config(dict(BASE_CONFIG), catalog)
    shuffled = dict(BASE_CONFIG, factors=["elevation", "population",
                                          "temperature", "no2_column"])
    b = validate_config(shuffled, catalog)
    assert a == b
    assert scenario_id(a, catalog.version) == scenario_id(b, catalog.version)
    # catalog order, not request order
    assert a.factors == ("no2_column", "temperature", "population", "elevation")


def test_validate_config_field_errors(catalog):
    cases = [
        ({}, "missing field"),
        (dict(BASE_CONFIG, city="atlantis"), "atlantis"),
        (dict(BASE_CONFIG, year=2031), "2031"),
        (dict(BASE_CONFIG, year="soon"), "soon"),
        (dict(BASE_CONFIG, pollutant="so2"), "so2"),
        (dict(BASE_CONFIG, model="xgboost"), "xgboost"),
        (dict(BASE_CONFIG, factors=[]), "nonempty"),
        (dict(BASE_CONFIG, factors=["temperature", "temperature"]), "duplicate"),
        (dict(BASE_CONFIG, factors=["humidity"]), "humidity"),
        (dict(BASE_CONFIG, seed=-1), "seed"),
        (dict(BASE_CONFIG, seed=True), "seed"),
        (dict(BASE_CONFIG, grid=7), "grid"),
    ]
    for raw, needle in cases:
        with pytest.raises(ValidationError) as err:
            validate_config(raw, catalog)
        assert needle in str(err.value), raw


def test_validate_config_grid_normalization(catalog):
    none = validate_config(dict(BASE_CONFIG), catalog)
    empty = validate_config(dict(BASE_CONFIG, grid={}), catalog)
    assert none.grid is None and empty.grid is None
    assert scenario_id(none, "v") == scenario_id(empty, "v")
    dflt = validate_config(dict(BASE_CONFIG, grid="default"), catalog)
    assert dflt.grid == "default"
    assert scenario_id(dflt, "v") != scenario_id(none, "v")


def test_scenario_id_sensitivity(catalog):
    base = validate_config(dict(BASE_CONFIG), catalog)
    other_seed = validate_config(dict(BASE_CONFIG, seed=1), catalog)
    assert scenario_id(base, "v1") != scenario_id(other_seed, "v1")
    assert scenario_id(base, "v1") != scenario_id(base, "v2")
    sid = scenario_id(base, "v1")
    assert len(sid) == 16 and all(c in "0123456789abcdef" for c in sid)


# -------------------------------------------------------------------- runner

def test_runner_executes_and_persists(catalog, tmp_path):
    store = tmp_path / "store"
    runner = ScenarioRunner(catalog, store, workers=2)
    try:
        created = runner.create(dict(BASE_CONFIG))
        assert created["cached"] is False
        sid = created["id"]
        doc = _wait_done(runner, sid)
        assert doc["status"] == "done"
        assert doc["metrics"]["r2"] > 0.8
        assert doc["train_rows"] == 84
        assert doc["surface_url"].endswith(f"/{sid}/surface")
        assert len(runner.get_surface(sid)) == 100
        assert (store / sid / "result.json").is_file()
        assert (store / sid / "model.json").is_file()
        assert (store / sid / "surface.json").is_file()
    finally:
        runner.close()

    # a fresh runner on the same store restores the finished scenario
    again = ScenarioRunner(catalog, store, workers=1)
    try:
        assert again.get(sid)["status"] == "done"
        assert again.counters["executed"] == 0
        assert len(again.get_surface(sid)) == 100
    finally:
        again.close()


def test_runner_duplicate_create_is_cached(runner):
    first = runner.create(dict(BASE_CONFIG))
    _wait_done(runner, first["id"])
    second = runner.create(dict(BASE_CONFIG))
    assert second == {"id": first["id"], "status": "done", "cached": True}
    # reordered factors are the same scenario
    third = runner.create(dict(BASE_CONFIG, factors=list(reversed(BASE_CONFIG["factors"]))))
    assert third["id"] == first["id"]
    assert runner.counters == {
        "submitted": 1, "executed": 1, "completed": 1, "failed": 0,
    }


def test_runner_unknown_id(runner):
    with pytest.raises(KeyError):
        runner.get("0000000000000000")
    with pytest.raises(KeyError):
        runner.get_surface("0000000000000000")


def test_runner_quarantines_corrupt_store(catalog, tmp_path):
    store = tmp_path / "store"
    bad = store / "deadbeefdeadbeef"
    bad.mkdir(parents=True)
    (bad / "result.json").write_text("{ not json")
    runner = ScenarioRunner(catalog, store, workers=1)
    try:
        assert runner.ids() == []
        assert not bad.exists()
        quarantined = list((store / ".quarantine").iterdir())
        assert len(quarantined) == 1
        assert quarantined[0].name.startswith("deadbeefdeadbeef-")
    finally:
        runner.close()


def test_runner_quarantines_stale_results(catalog, tmp_path):
    # a result whose id no longer matches its config hash (e.g. written
    # under an older catalog version) must not be served
    store = tmp_path / "store"
    runner = ScenarioRunner(catalog, store, workers=1)
    try:
        sid = runner.create(dict(BASE_CONFIG))["id"]
        _wait_done(runner, sid)
    finally:
        runner.close()
    result = store / sid / "result.json"
    doc = json.loads(result.read_text())
    doc["config"]["seed"] = 42  # silently different config, same directory
    result.write_text(json.dumps(doc))

    again = ScenarioRunner(catalog, store, workers=1)
    try:
        assert again.ids() == []
        assert (store / ".quarantine").exists()
    finally:
        again.close()


def test_runner_failure_reported_with_reason(fixture_dir, tmp_path):
    # year 2020 passes validation (listed in the catalog) but has no
    # rasters on disk, so the job itself fails
    doc = yaml.safe_load((fixture_dir / "catalog.yaml").read_text())
    city = doc["cities"]["fixtureville"]
    for key in ("area_file", "stations_file", "ground_truth_file", "rasters_dir"):
        city[key] = str(fixture_dir / city[key])
    city["years"] = [2019, 2020]
    cat_file = tmp_path / "catalog.yaml"
    cat_file.write_text(yaml.safe_dump(doc))
    runner = ScenarioRunner(load_catalog(cat_file), tmp_path / "store", workers=1)
    try:
        sid = runner.create(dict(BASE_CONFIG, year=2020))["id"]
        doc = _wait_done(runner, sid)
        assert doc["status"] == "failed"
        assert "2020" in doc["reason"]
        assert runner.counters["failed"] == 1
        with pytest.raises(ValidationError):
            runner.get_surface(sid)
        assert not (tmp_path / "store" / sid).exists()  # nothing persisted
    finally:
        runner.close()


# ----------------------------------------------------------------------- api

@pytest.fixture(scope="module")
def client(fixture_dir, tmp_path_factory):
    config = ServiceConfig(
        catalog_path=fixture_dir / "catalog.yaml",
        store_dir=tmp_path_factory.mktemp("api-store"),
        workers=2,
    )
    with TestClient(create_app(config)) as c:
        yield c


def test_api_health(client):
    doc = client.get("/api/health").json()
    assert doc["ok"] is True
    assert set(doc["jobs"]) == {"submitted", "executed", "completed", "failed"}


def test_api_catalog(client):
    doc = client.get("/api/catalog").json()
    assert doc["cities"][0]["id"] == "fixtureville"
    assert len(doc["variables"]) == 7


def test_api_create_poll_surface(client):
    res = client.post("/api/scenarios", json={"config": dict(BASE_CONFIG)})
    assert res.status_code == 200
    sid = res.json()["id"]
    doc = _wait_done(client, sid)
    assert doc["status"] == "done"
    assert set(doc["metrics"]) >= {"r2", "mae", "mse", "rmse", "pairs"}
    assert "values" not in doc  # surface only by reference
    assert doc["surface_url"] == f"/api/scenarios/{sid}/surface"

    # bare config (no wrapper) resolves to the same scenario
    bare = client.post("/api/scenarios", json=dict(BASE_CONFIG)).json()
    assert bare == {"id": sid, "status": "done", "cached": True}

    geo = client.get(f"/api/scenarios/{sid}/surface").json()
    assert geo["type"] == "FeatureCollection"
    assert len(geo["features"]) == 100
    assert geo["properties"]["legend"]["mode"] == "dynamic"

    fixed = client.get(
        f"/api/scenarios/{sid}/surface",
        params={"legend": "fixed", "min": 0, "max": 200},
    ).json()
    leg = fixed["properties"]["legend"]
    assert (leg["mode"], leg["min"], leg["max"]) == ("fixed", 0.0, 200.0)

    csv_res = client.get(f"/api/scenarios/{sid}/surface", params={"format": "csv"})
    assert csv_res.headers["content-type"].startswith("text/csv")
    assert csv_res.text.startswith("lon,lat,value\n")
    assert len(csv_res.text.strip().split("\n")) == 101


def test_api_error_statuses(client):
    assert client.get("/api/scenarios/ffffffffffffffff").status_code == 404
    assert client.get("/api/scenarios/ffffffffffffffff/surface").status_code == 404

    bad = client.post("/api/scenarios", json=dict(BASE_CONFIG, city="atlantis"))
    assert bad.status_code == 400
    assert "atlantis" in bad.json()["error"]

    res = client.post("/api/scenarios", json={"config": dict(BASE_CONFIG)})
    sid = res.json()["id"]
    _wait_done(client, sid)
    assert client.get(f"/api/scenarios/{sid}/surface",
                      params={"format": "xml"}).status_code == 400
    assert client.get(f"/api/scenarios/{sid}/surface",
                      params={"legend": "neon"}).status_code == 400
    missing_range = client.get(f"/api/scenarios/{sid}/surface",
                               params={"legend": "fixed"})
    assert missing_range.status_code == 400
