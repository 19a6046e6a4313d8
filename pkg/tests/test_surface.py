"""Lattice generation, legends, surface exports, area masking."""

import json
import math

import numpy as np
import pytest

from aqgrid.errors import DataError, ValidationError
from aqgrid.raster.grid import METERS_PER_DEGREE_LAT, GeoBounds
from aqgrid.surface import (
    Legend,
    PredictionSurface,
    StudyArea,
    build_inference_matrix,
    export_surface,
    generate_grid,
    kde_smooth,
    lattice_shape,
    load_study_area,
    make_legend,
    read_surface_csv,
    surface_to_csv,
    surface_to_geojson,
)


def _area_km(width_km, height_km, min_lat=12.9, min_lon=77.0, polygon=None):
    max_lat = min_lat + height_km * 1000.0 / METERS_PER_DEGREE_LAT
    mid = (min_lat + max_lat) / 2
    m_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid))
    bounds = GeoBounds(min_lon=min_lon, min_lat=min_lat,
                       max_lon=min_lon + width_km * 1000.0 / m_lon, max_lat=max_lat)
    return StudyArea(id="t", name="T", bounds=bounds, polygon=polygon)


def _surface(values, nx=2, ny=2, spacing_m=3000.0):
    pts = generate_grid(_area_km(nx * 3, ny * 3), spacing_m)
    return PredictionSurface(
        scenario_id="abc", pollutant="no2", unit="ug/m3", spacing_m=spacing_m,
        nx=nx, ny=ny,
        lons=tuple(p[0] for p in pts), lats=tuple(p[1] for p in pts),
        values=tuple(values),
    )


# ------------------------------------------------------------------- lattice

def test_30km_box_gives_100_points():
    area = _area_km(30, 30)
    assert lattice_shape(area, 3000.0) == (10, 10)
    assert len(generate_grid(area, 3000.0)) == 100


def test_fractional_extent_floors():
    # 31.4 km of extent still fits only 10 full 3 km steps
    area = _area_km(31.4, 29.9)
    assert lattice_shape(area, 3000.0) == (9, 10)


def test_lattice_row_major_from_northwest():
    pts = generate_grid(_area_km(9, 6), 3000.0)  # 2 rows x 3 cols
    assert len(pts) == 6
    lats = [p[1] for p in pts]
    lons = [p[0] for p in pts]
    assert lats[0] == max(lats)
    assert lons[0] == min(lons)
    assert lats[0] == lats[1] == lats[2]  # first row scans west-to-east
    assert lons[0] < lons[1] < lons[2]
    assert lats[3] < lats[0]


def test_lattice_centered_and_inside():
    area = _area_km(31.4, 30.7)
    b = area.bounds
    pts = generate_grid(area, 3000.0)
    for lon, lat in pts:
        assert b.min_lon < lon < b.max_lon
        assert b.min_lat < lat < b.max_lat
    # symmetric margins: west gap == east gap, north gap == south gap
    lons = sorted({p[0] for p in pts})
    lats = sorted({p[1] for p in pts})
    assert (lons[0] - b.min_lon) == pytest.approx(b.max_lon - lons[-1], abs=1e-12)
    assert (lats[0] - b.min_lat) == pytest.approx(b.max_lat - lats[-1], abs=1e-12)


def test_lattice_rejects_bad_spacing():
    with pytest.raises(ValidationError):
        generate_grid(_area_km(30, 30), 0.0)


# -------------------------------------------------------------------- legend

def test_fixed_legend_binning():
    lg = Legend(mode="fixed", min=0.0, max=100.0, bins=5)
    # right-closed 20-wide bins; clamp beyond the fixed range
    assert lg.bin_of(0.0) == 0
    assert lg.bin_of(20.0) == 0
    assert lg.bin_of(20.000001) == 1
    assert lg.bin_of(50.0) == 2
    assert lg.bin_of(100.0) == 4
    assert lg.bin_of(-5.0) == 0
    assert lg.bin_of(140.0) == 4


def test_make_legend_dynamic_range():
    s = _surface([0.0, 50.0, 100.0, None])
    lg = make_legend(s, mode="dynamic", bins=5)
    assert (lg.min, lg.max, lg.bins) == (0.0, 100.0, 5)
    assert [lg.bin_of(v) for v in (0.0, 50.0, 100.0)] == [0, 2, 4]


def test_make_legend_degenerate_widens():
    s = _surface([7.0, 7.0, 7.0, 7.0])
    lg = make_legend(s)
    assert (lg.min, lg.max) == (6.0, 8.0)
    empty = make_legend(_surface([None] * 4))
    assert (empty.min, empty.max) == (-1.0, 1.0)


def test_make_legend_fixed_validation():
    s = _surface([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValidationError):
        make_legend(s, mode="fixed")          # no min/max
    with pytest.raises(ValidationError):
        make_legend(s, mode="fixed", fixed_min=5.0, fixed_max=5.0)
    with pytest.raises(ValidationError):
        make_legend(s, mode="rainbow")
    lg = make_legend(s, mode="fixed", fixed_min=0.0, fixed_max=10.0)
    assert lg.mode == "fixed"


# ------------------------------------------------------------------- exports

def test_geojson_omits_missing_points():
    s = _surface([1.0, None, 3.0, 4.0])
    doc = surface_to_geojson(s, make_legend(s))
    assert doc["type"] == "FeatureCollection"
    assert len(doc["features"]) == 3
    f = doc["features"][0]
    assert f["geometry"]["type"] == "Point"
    assert len(f["geometry"]["coordinates"]) == 2
    assert set(f["properties"]) == {"value", "bin"}
    meta = doc["properties"]
    assert meta["scenario_id"] == "abc"
    assert meta["legend"]["mode"] == "dynamic"


def test_csv_roundtrip_with_missing(tmp_path):
    s = _surface([1.5, None, 3.25, 4.0])
    text = surface_to_csv(s)
    lines = text.strip().split("\n")
    assert lines[0] == "lon,lat,value"
    assert lines[2].endswith(",")  # missing value stays empty
    p = tmp_path / "s.csv"
    export_surface(s, p, format="csv")
    back = read_surface_csv(p)
    assert [v for _, _, v in back] == [1.5, None, 3.25, 4.0]
    # coordinates round to 6 decimals on write
    assert back[0][0] == pytest.approx(s.lons[0], abs=5e-7)


def test_export_geojson_is_valid_json(tmp_path):
    s = _surface([1.0, 2.0, 3.0, 4.0])
    p = tmp_path / "s.geojson"
    export_surface(s, p, format="geojson",
                   legend=make_legend(s, mode="fixed", fixed_min=0.0, fixed_max=10.0))
    doc = json.loads(p.read_text())
    assert doc["properties"]["legend"]["max"] == 10.0
    with pytest.raises(ValidationError):
        export_surface(s, p, format="xml")


def test_surface_dict_roundtrip():
    s = _surface([1.0, None, 3.0, 4.0])
    back = PredictionSurface.from_dict(s.to_dict())
    assert back == s


def test_surface_shape_validated():
    with pytest.raises(ValidationError):
        PredictionSurface(scenario_id="x", pollutant="p", unit="u",
                          spacing_m=1.0, nx=2, ny=2,
                          lons=(0.0,), lats=(0.0,), values=(1.0,))


# ----------------------------------------------------------- area + sampling

def test_polygon_ring_must_close():
    with pytest.raises(ValidationError):
        _area_km(30, 30, polygon=((77.0, 12.9), (77.1, 12.9), (77.1, 13.0)))


def test_polygon_must_not_self_intersect():
    # bowtie inside a 30 km box
    bow = ((77.01, 12.91), (77.05, 12.95), (77.05, 12.91),
           (77.01, 12.95), (77.01, 12.91))
    with pytest.raises(ValidationError) as err:
        _area_km(30, 30, polygon=bow)
    assert "self-intersects" in str(err.value)


def test_polygon_vertex_must_be_inside_bounds():
    with pytest.raises(ValidationError):
        _area_km(30, 30, polygon=((76.0, 12.91), (77.05, 12.95),
                                  (77.05, 12.91), (76.0, 12.91)))


def test_polygon_masks_containment():
    tri = ((77.01, 12.91), (77.10, 12.91), (77.01, 13.00), (77.01, 12.91))
    area = _area_km(30, 30, polygon=tri)
    assert area.contains(77.02, 12.92)          # near the right-angle corner
    assert not area.contains(77.09, 12.99)      # inside bounds, outside triangle
    assert not area.contains(60.0, 0.0)         # outside bounds entirely


def test_load_study_area_roundtrip(tmp_path):
    area = _area_km(12, 9)
    p = tmp_path / "area.json"
    p.write_text(json.dumps(area.to_dict()))
    back = load_study_area(p)
    assert back.bounds == area.bounds
    assert back.polygon is None
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DataError):
        load_study_area(bad)


def test_inference_matrix_requires_all_composites(fixture_dir):
    from aqgrid.pipeline import load_raster_dir, yearly_composites
    from aqgrid.raster.layer import Temporal

    area = load_study_area(fixture_dir / "area.json")
    pts = generate_grid(area, 3000.0)
    months = [Temporal.of_month(2019, m) for m in range(1, 13)]
    layers = load_raster_dir(fixture_dir / "rasters",
                             ["temperature", "elevation"], months)
    comps = yearly_composites(layers, ["temperature", "elevation"], 2019)
    X, mask = build_inference_matrix(pts, comps, ["temperature", "elevation"])
    assert X.shape == (100, 2)
    assert not mask.any()  # fixture rasters cover the whole area
    with pytest.raises(ValidationError):
        build_inference_matrix(pts, comps, ["temperature", "wind_speed"])


# ----------------------------------------------------------------- smoothing

def test_kde_stays_within_input_range():
    vals = [10.0, 20.0, 30.0, 40.0]
    s = _surface(vals)
    layer = kde_smooth(s, bandwidth_m=2000.0)
    assert layer.values.shape == (2, 2)
    assert np.all(layer.values >= 10.0) and np.all(layer.values <= 40.0)
    # small bandwidth: each point dominated by itself
    tight = kde_smooth(s, bandwidth_m=10.0)
    assert np.allclose(np.sort(tight.values.ravel()), vals)


def test_kde_validation():
    s = _surface([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValidationError):
        kde_smooth(s, bandwidth_m=0.0)
    with pytest.raises(DataError):
        kde_smooth(_surface([None] * 4), bandwidth_m=100.0)
