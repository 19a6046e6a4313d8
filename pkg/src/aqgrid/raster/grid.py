"""Geographic bounds and the uniform cell grid all layers share.

Coordinates are WGS84 decimal degrees. Metric distances use a planar
local approximation: one degree of latitude is 111,320 m and one degree
of longitude is 111,320 * cos(mid-latitude of the bounds) m. Study areas
span well under a degree, so the approximation error is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from aqgrid.errors import OutsideBoundsError, ValidationError

METERS_PER_DEGREE_LAT = 111_320.0

# Guard against float noise when an extent divides a cell size exactly.
_EPS = 1e-9


def ceil_cells(extent_m: float, cell_size_m: float) -> int:
    return max(1, math.ceil(extent_m / cell_size_m - _EPS))


def floor_cells(extent_m: float, cell_size_m: float) -> int:
    return max(1, math.floor(extent_m / cell_size_m + _EPS))


@dataclass(frozen=True)
class GeoBounds:
    """A lon/lat bounding box, west/south-inclusive and east/north-inclusive."""

    min_lon: float
    max_lon: float
    min_lat: float
    max_lat: float

    def __post_init__(self):
        if not (-180.0 <= self.min_lon <= 180.0 and -180.0 <= self.max_lon <= 180.0):
            raise ValidationError(f"longitude out of [-180, 180]: {self}")
        if not (-90.0 <= self.min_lat <= 90.0 and -90.0 <= self.max_lat <= 90.0):
            raise ValidationError(f"latitude out of [-90, 90]: {self}")
        if not self.min_lon < self.max_lon:
            raise ValidationError(f"min_lon must be < max_lon: {self}")
        if not self.min_lat < self.max_lat:
            raise ValidationError(f"min_lat must be < max_lat: {self}")

    @property
    def mid_lat(self) -> float:
        return 0.5 * (self.min_lat + self.max_lat)

    @property
    def meters_per_degree_lon(self) -> float:
        return METERS_PER_DEGREE_LAT * math.cos(math.radians(self.mid_lat))

    @property
    def lat_extent_m(self) -> float:
        return (self.max_lat - self.min_lat) * METERS_PER_DEGREE_LAT

    @property
    def lon_extent_m(self) -> float:
        return (self.max_lon - self.min_lon) * self.meters_per_degree_lon

    def contains(self, lon: float, lat: float) -> bool:
        return (
            self.min_lon <= lon <= self.max_lon
            and self.min_lat <= lat <= self.max_lat
        )

    def overlaps(self, other: "GeoBounds") -> bool:
        return not (
            self.max_lon < other.min_lon
            or other.max_lon < self.min_lon
            or self.max_lat < other.min_lat
            or other.max_lat < self.min_lat
        )

    def to_dict(self) -> dict:
        return {
            "min_lon": self.min_lon,
            "max_lon": self.max_lon,
            "min_lat": self.min_lat,
            "max_lat": self.max_lat,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeoBounds":
        try:
            return cls(
                min_lon=float(d["min_lon"]),
                max_lon=float(d["max_lon"]),
                min_lat=float(d["min_lat"]),
                max_lat=float(d["max_lat"]),
            )
        except KeyError as exc:
            raise ValidationError(f"bounds missing field {exc}") from exc


@dataclass(frozen=True)
class GridSpec:
    """Rectangular cell grid tiling a GeoBounds, row-major from the north-west.

    Row 0 is the northernmost row. Cells tile the bounds exactly, so each
    cell is (lat extent / rows) degrees tall; cell_size_m records that
    height in meters. Grids built with from_bounds() target a nominal
    metric cell size (default 3 km) and round the counts up so the bounds
    stay covered.
    """

    bounds: GeoBounds
    rows: int
    cols: int
    cell_size_m: float

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"grid must have rows, cols >= 1: {self}")
        if self.cell_size_m <= 0:
            raise ValidationError(f"cell_size_m must be positive: {self}")
        # rows == ceil(extent / cell_size) must hold for the recorded size.
        if ceil_cells(self.bounds.lat_extent_m, self.cell_size_m) != self.rows:
            raise ValidationError(
                f"rows={self.rows} inconsistent with extent "
                f"{self.bounds.lat_extent_m:.1f} m at cell {self.cell_size_m:.1f} m"
            )

    @classmethod
    def from_bounds(cls, bounds: GeoBounds, cell_size_m: float = 3000.0) -> "GridSpec":
        if cell_size_m <= 0:
            raise ValidationError("cell_size_m must be positive")
        rows = ceil_cells(bounds.lat_extent_m, cell_size_m)
        cols = ceil_cells(bounds.lon_extent_m, cell_size_m)
        return cls(
            bounds=bounds,
            rows=rows,
            cols=cols,
            cell_size_m=bounds.lat_extent_m / rows,
        )

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @property
    def cell_height_deg(self) -> float:
        return (self.bounds.max_lat - self.bounds.min_lat) / self.rows

    @property
    def cell_width_deg(self) -> float:
        return (self.bounds.max_lon - self.bounds.min_lon) / self.cols

    def lat_centers(self) -> np.ndarray:
        """Cell-center latitudes, north to south (row order)."""
        r = np.arange(self.rows)
        return self.bounds.max_lat - (r + 0.5) * self.cell_height_deg

    def lon_centers(self) -> np.ndarray:
        """Cell-center longitudes, west to east (column order)."""
        c = np.arange(self.cols)
        return self.bounds.min_lon + (c + 0.5) * self.cell_width_deg

    def cell_center(self, row: int, col: int) -> tuple:
        return (
            self.bounds.min_lon + (col + 0.5) * self.cell_width_deg,
            self.bounds.max_lat - (row + 0.5) * self.cell_height_deg,
        )

    def index_of(self, lon: float, lat: float) -> tuple:
        """(row, col) of the cell whose center is nearest the point.

        A point exactly equidistant between two centers (on a shared cell
        edge) goes to the smaller row-major index. Raises
        OutsideBoundsError for points outside the bounds.
        """
        if not self.bounds.contains(lon, lat):
            raise OutsideBoundsError(
                f"point ({lon}, {lat}) outside bounds {self.bounds}"
            )
        return (
            _edge_tied_index((self.bounds.max_lat - lat) / self.cell_height_deg, self.rows),
            _edge_tied_index((lon - self.bounds.min_lon) / self.cell_width_deg, self.cols),
        )

    def approx_equals(self, other: "GridSpec", tol_deg: float = 1e-9) -> bool:
        """Structural equality up to float noise in the derived geometry."""
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and abs(self.bounds.min_lon - other.bounds.min_lon) <= tol_deg
            and abs(self.bounds.max_lon - other.bounds.max_lon) <= tol_deg
            and abs(self.bounds.min_lat - other.bounds.min_lat) <= tol_deg
            and abs(self.bounds.max_lat - other.bounds.max_lat) <= tol_deg
        )


def _edge_tied_index(t: float, count: int) -> int:
    # t is the position in cell units from the grid edge; a whole number
    # means the point sits exactly on a cell boundary, which ties two
    # centers -> keep the smaller index.
    idx = math.floor(t)
    if idx > 0 and t == idx:
        idx -= 1
    return min(max(idx, 0), count - 1)


def edge_tied_indices(t: np.ndarray, count: int) -> np.ndarray:
    """Vectorized _edge_tied_index over an array of cell-unit positions."""
    idx = np.floor(t).astype(np.int64)
    on_edge = (t == idx) & (idx > 0)
    idx[on_edge] -= 1
    return np.clip(idx, 0, count - 1)
