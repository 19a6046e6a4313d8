"""Planar grid arithmetic: cell counts, centers, and nearest-cell lookup."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqgrid.errors import OutsideBoundsError, ValidationError
from aqgrid.raster.grid import (
    METERS_PER_DEGREE_LAT,
    GeoBounds,
    GridSpec,
    ceil_cells,
    floor_cells,
)


def _bounds_for_km(km_lat=30.0, km_lon=30.0, min_lat=12.9, min_lon=77.45):
    mid = min_lat + (km_lat * 1000 / METERS_PER_DEGREE_LAT) / 2
    m_per_deg_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid))
    return GeoBounds(
        min_lon=min_lon,
        min_lat=min_lat,
        max_lon=min_lon + km_lon * 1000 / m_per_deg_lon,
        max_lat=min_lat + km_lat * 1000 / METERS_PER_DEGREE_LAT,
    )


def test_thirty_km_at_three_km_cells():
    spec = GridSpec.from_bounds(_bounds_for_km(30, 30), 3000.0)
    assert (spec.rows, spec.cols) == (10, 10)


def test_fractional_extent_rounds_up():
    spec = GridSpec.from_bounds(_bounds_for_km(31, 29.5), 3000.0)
    assert spec.rows == 11  # ceil(31/3)
    assert spec.cols == 10  # ceil(29.5/3)


def test_epsilon_guard_on_exact_multiples():
    # 30000/3000 must count 10 cells even when the division lands a hair
    # above the integer
    assert ceil_cells(30000.0000000001, 3000.0) == 10
    assert floor_cells(29999.9999999999, 3000.0) == 10


def test_bounds_validation():
    with pytest.raises(ValidationError):
        GeoBounds(min_lon=10, min_lat=5, max_lon=9, max_lat=6)  # inverted lon
    with pytest.raises(ValidationError):
        GeoBounds(min_lon=10, min_lat=95, max_lon=11, max_lat=96)  # off-planet


def test_lat_centers_run_north_to_south():
    spec = GridSpec.from_bounds(_bounds_for_km(), 3000.0)
    lats = spec.lat_centers()
    assert all(a > b for a, b in zip(lats, lats[1:]))
    lons = spec.lon_centers()
    assert all(a < b for a, b in zip(lons, lons[1:]))


def test_center_and_index_are_inverse():
    spec = GridSpec.from_bounds(_bounds_for_km(), 3000.0)
    for r in (0, 3, 9):
        for c in (0, 5, 9):
            lon, lat = spec.cell_center(r, c)
            assert spec.index_of(lon, lat) == (r, c)


def test_outside_raises():
    spec = GridSpec.from_bounds(_bounds_for_km(), 3000.0)
    with pytest.raises(OutsideBoundsError):
        spec.index_of(0.0, 0.0)


def test_edge_tie_goes_to_smaller_index():
    spec = GridSpec.from_bounds(_bounds_for_km(), 3000.0)
    b = spec.bounds
    # a point exactly on the boundary between columns 0 and 1
    edge_lon = b.min_lon + spec.cell_width_deg
    _, c = spec.index_of(edge_lon, b.min_lat + 1e-6)
    assert c == 0
    # and exactly on the row boundary between rows 0 and 1 (from the north)
    edge_lat = b.max_lat - spec.cell_height_deg
    r, _ = spec.index_of(b.min_lon + 1e-6, edge_lat)
    assert r == 0


def test_corners_are_in_bounds():
    spec = GridSpec.from_bounds(_bounds_for_km(), 3000.0)
    b = spec.bounds
    assert spec.index_of(b.min_lon, b.min_lat) == (spec.rows - 1, 0)
    assert spec.index_of(b.max_lon, b.max_lat) == (0, spec.cols - 1)


@given(
    st.floats(-60, 60), st.floats(-170, 170),
    st.floats(5_000, 300_000), st.floats(5_000, 300_000),
    st.integers(0, 10_000),
)
def test_index_of_center_roundtrip(lat0, lon0, ext_lat, ext_lon, pick):
    mid = lat0 + (ext_lat / METERS_PER_DEGREE_LAT) / 2
    m_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid))
    bounds = GeoBounds(
        min_lon=lon0, min_lat=lat0,
        max_lon=lon0 + ext_lon / m_lon, max_lat=lat0 + ext_lat / METERS_PER_DEGREE_LAT,
    )
    spec = GridSpec.from_bounds(bounds, 3000.0)
    r = pick % spec.rows
    c = (pick * 7) % spec.cols
    lon, lat = spec.cell_center(r, c)
    assert spec.index_of(lon, lat) == (r, c)


def test_roundtrip_dict():
    b = _bounds_for_km()
    assert GeoBounds.from_dict(b.to_dict()) == b
