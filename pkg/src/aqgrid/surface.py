"""Inference lattice, prediction surfaces, and their exports.

The lattice is a rectangle of points at a fixed metric spacing, centered
inside the study-area bounds (row-major from the north-west corner, like
raster rows). Points outside an area's boundary polygon — and points
whose feature sampling hit nodata — carry a missing value; nothing is
ever extrapolated to fill them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from aqgrid.errors import DataError, ValidationError
from aqgrid.jsonutil import canonical_dumps
from aqgrid.raster.grid import METERS_PER_DEGREE_LAT, GeoBounds, GridSpec, floor_cells
from aqgrid.raster.layer import RasterLayer
from aqgrid.models.train import TrainedModel

DEFAULT_SPACING_M = 3000.0
DEFAULT_BINS = 9


# ---------------------------------------------------------------- study areas

@dataclass(frozen=True)
class StudyArea:
    id: str
    name: str
    bounds: GeoBounds
    polygon: Optional[tuple] = None  # ((lon, lat), ...) closed ring

    def __post_init__(self):
        if self.polygon is not None:
            ring = tuple((float(x), float(y)) for x, y in self.polygon)
            if len(ring) < 4 or ring[0] != ring[-1]:
                raise ValidationError(
                    f"area {self.id!r}: polygon must be a closed ring "
                    "(first point repeated last, at least 4 entries)"
                )
            for lon, lat in ring:
                if not self.bounds.contains(lon, lat):
                    raise ValidationError(
                        f"area {self.id!r}: polygon vertex ({lon}, {lat}) outside bounds"
                    )
            if _self_intersects(ring):
                raise ValidationError(f"area {self.id!r}: polygon self-intersects")
            object.__setattr__(self, "polygon", ring)

    def contains(self, lon: float, lat: float) -> bool:
        if not self.bounds.contains(lon, lat):
            return False
        if self.polygon is None:
            return True
        return _point_in_ring(lon, lat, self.polygon)

    def to_dict(self) -> dict:
        d = {"id": self.id, "name": self.name, "bounds": self.bounds.to_dict()}
        if self.polygon is not None:
            d["polygon"] = [[lon, lat] for lon, lat in self.polygon]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyArea":
        try:
            return cls(
                id=str(d["id"]),
                name=str(d.get("name", d["id"])),
                bounds=GeoBounds.from_dict(d["bounds"]),
                polygon=tuple(tuple(p) for p in d["polygon"]) if d.get("polygon") else None,
            )
        except KeyError as exc:
            raise ValidationError(f"study area missing field {exc}") from exc


def load_study_area(path) -> StudyArea:
    import json

    p = Path(path)
    try:
        d = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{p}: cannot read study area ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{p}: not valid JSON ({exc})") from exc
    return StudyArea.from_dict(d)


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def _self_intersects(ring) -> bool:
    segs = list(zip(ring[:-1], ring[1:]))
    k = len(segs)
    for i in range(k):
        for j in range(i + 2, k):
            if i == 0 and j == k - 1:
                continue  # first and last share the closing vertex
            if _segments_cross(*segs[i], *segs[j]):
                return True
    return False


def _point_in_ring(lon, lat, ring) -> bool:
    inside = False
    for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
        if (y1 > lat) != (y2 > lat):
            x_cross = x1 + (lat - y1) * (x2 - x1) / (y2 - y1)
            if lon < x_cross:
                inside = not inside
    return inside


# -------------------------------------------------------------------- lattice

def generate_grid(area: StudyArea, spacing_m: float = DEFAULT_SPACING_M):
    """Lattice points covering the area bounds, row-major from north-west.

    Each axis takes floor(extent / spacing) points (at least one) and the
    whole block is centered, so every point lies strictly inside the
    bounds. Returns a list of (lon, lat).
    """
    if spacing_m <= 0:
        raise ValidationError(f"spacing_m must be positive, got {spacing_m}")
    b = area.bounds
    ny = floor_cells(b.lat_extent_m, spacing_m)
    nx = floor_cells(b.lon_extent_m, spacing_m)

    spacing_lat_deg = spacing_m / METERS_PER_DEGREE_LAT
    spacing_lon_deg = spacing_m / b.meters_per_degree_lon
    lat_extent_deg = b.max_lat - b.min_lat
    lon_extent_deg = b.max_lon - b.min_lon
    lat_off = 0.5 * (lat_extent_deg - ny * spacing_lat_deg)
    lon_off = 0.5 * (lon_extent_deg - nx * spacing_lon_deg)

    points = []
    for i in range(ny):
        lat = b.max_lat - lat_off - (i + 0.5) * spacing_lat_deg
        for j in range(nx):
            lon = b.min_lon + lon_off + (j + 0.5) * spacing_lon_deg
            points.append((lon, lat))
    return points


def lattice_shape(area: StudyArea, spacing_m: float = DEFAULT_SPACING_M):
    b = area.bounds
    return (floor_cells(b.lat_extent_m, spacing_m), floor_cells(b.lon_extent_m, spacing_m))


# ---------------------------------------------------------- matrix + surface

def build_inference_matrix(points, composites, variables):
    """Feature matrix over lattice points and its missing-row mask.

    composites maps variable name -> yearly RasterLayer. Row i samples
    each composite at point i; a nodata cell or out-of-bounds point marks
    the whole row missing.
    """
    variables = tuple(variables)
    for v in variables:
        if v not in composites:
            raise ValidationError(f"no composite for variable {v!r}")
    n = len(points)
    X = np.full((n, len(variables)), np.nan)
    for j, v in enumerate(variables):
        layer = composites[v]
        for i, (lon, lat) in enumerate(points):
            try:
                X[i, j] = layer.sample(lon, lat)
            except Exception:
                pass  # outside this composite: row will be masked
    mask = np.isnan(X).any(axis=1)
    return X, mask


@dataclass(frozen=True)
class PredictionSurface:
    scenario_id: str
    pollutant: str
    unit: str
    spacing_m: float
    nx: int
    ny: int
    lons: tuple = field(repr=False)
    lats: tuple = field(repr=False)
    values: tuple = field(repr=False)  # float or None, row-major from NW

    def __post_init__(self):
        if len(self.lons) != self.nx * self.ny or len(self.lons) != len(self.lats) \
                or len(self.values) != len(self.lons):
            raise ValidationError("surface arrays do not form the declared lattice")

    def __len__(self) -> int:
        return len(self.values)

    def present_values(self):
        return [v for v in self.values if v is not None]

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "pollutant": self.pollutant,
            "unit": self.unit,
            "spacing_m": self.spacing_m,
            "nx": self.nx,
            "ny": self.ny,
            "points": [
                [lon, lat, v]
                for lon, lat, v in zip(self.lons, self.lats, self.values)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionSurface":
        pts = d["points"]
        return cls(
            scenario_id=str(d["scenario_id"]),
            pollutant=str(d["pollutant"]),
            unit=str(d["unit"]),
            spacing_m=float(d["spacing_m"]),
            nx=int(d["nx"]),
            ny=int(d["ny"]),
            lons=tuple(float(p[0]) for p in pts),
            lats=tuple(float(p[1]) for p in pts),
            values=tuple(None if p[2] is None else float(p[2]) for p in pts),
        )


def predict_surface(model: TrainedModel, points, matrix, mask, scenario_id: str,
                    pollutant: str = "", unit: str = "ug/m3",
                    spacing_m: float = DEFAULT_SPACING_M,
                    nx: Optional[int] = None, ny: Optional[int] = None) -> PredictionSurface:
    matrix = np.asarray(matrix, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if matrix.shape[0] != len(points) or mask.shape[0] != len(points):
        raise ValidationError("points, matrix, and mask lengths differ")
    if matrix.shape[1] != len(model.feature_names):
        raise ValidationError(
            f"matrix has {matrix.shape[1]} columns, model expects "
            f"{len(model.feature_names)}"
        )
    values = [None] * len(points)
    keep = np.flatnonzero(~mask)
    if keep.size:
        preds = model.predict(matrix[keep])
        for i, v in zip(keep, preds):
            values[int(i)] = float(v)
    if nx is None:
        nx = len(points)
        ny = 1
    return PredictionSurface(
        scenario_id=scenario_id,
        pollutant=pollutant,
        unit=unit,
        spacing_m=spacing_m,
        nx=nx,
        ny=ny,
        lons=tuple(p[0] for p in points),
        lats=tuple(p[1] for p in points),
        values=tuple(values),
    )


# ------------------------------------------------------------------- legends

@dataclass(frozen=True)
class Legend:
    mode: str  # "dynamic" | "fixed"
    min: float
    max: float
    bins: int = DEFAULT_BINS

    def bin_of(self, v: float) -> int:
        width = (self.max - self.min) / self.bins
        idx = math.ceil((v - self.min) / width) - 1
        return min(max(idx, 0), self.bins - 1)


def make_legend(surface: PredictionSurface, mode: str = "dynamic",
                fixed_min: Optional[float] = None, fixed_max: Optional[float] = None,
                bins: int = DEFAULT_BINS) -> Legend:
    """Equal-width binning over either the surface's own range or a fixed one.

    A degenerate range (all values equal, or no values at all) widens to
    [v - 1, v + 1] so the width stays positive.
    """
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    if mode == "fixed":
        if fixed_min is None or fixed_max is None:
            raise ValidationError("fixed legend requires min and max")
        if not (fixed_min < fixed_max):
            raise ValidationError(
                f"fixed legend needs min < max, got [{fixed_min}, {fixed_max}]"
            )
        return Legend(mode="fixed", min=float(fixed_min), max=float(fixed_max), bins=bins)
    if mode != "dynamic":
        raise ValidationError(f"unknown legend mode {mode!r}")
    present = surface.present_values()
    if not present:
        return Legend(mode="dynamic", min=-1.0, max=1.0, bins=bins)
    lo, hi = min(present), max(present)
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return Legend(mode="dynamic", min=lo, max=hi, bins=bins)


# ------------------------------------------------------------------- exports

def surface_to_geojson(surface: PredictionSurface, legend: Legend) -> dict:
    """FeatureCollection of the non-missing lattice points.

    Geometry coordinates are [lon, lat]; properties carry the predicted
    value and its color-bin index under the given legend.
    """
    features = []
    for lon, lat, v in zip(surface.lons, surface.lats, surface.values):
        if v is None:
            continue
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {"value": v, "bin": legend.bin_of(v)},
        })
    return {
        "type": "FeatureCollection",
        "features": features,
        "properties": {
            "scenario_id": surface.scenario_id,
            "pollutant": surface.pollutant,
            "unit": surface.unit,
            "spacing_m": surface.spacing_m,
            "legend": {
                "mode": legend.mode, "min": legend.min,
                "max": legend.max, "bins": legend.bins,
            },
        },
    }


def surface_to_csv(surface: PredictionSurface) -> str:
    """lon,lat,value rows for the full lattice; missing values stay empty."""
    lines = ["lon,lat,value"]
    for lon, lat, v in zip(surface.lons, surface.lats, surface.values):
        val = "" if v is None else repr(float(v))
        lines.append(f"{lon:.6f},{lat:.6f},{val}")
    return "\n".join(lines) + "\n"


def read_surface_csv(path):
    """(lon, lat, value|None) triples as written by surface_to_csv."""
    p = Path(path)
    out = []
    with open(p, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["lon", "lat", "value"]:
            raise DataError(f"{p}: unexpected surface header {header!r}")
        for row in reader:
            if not row:
                continue
            out.append((
                float(row[0]), float(row[1]),
                None if row[2] == "" else float(row[2]),
            ))
    return out


def export_surface(surface: PredictionSurface, path, format: str = "geojson",
                   legend: Optional[Legend] = None) -> None:
    """Write the surface atomically (temp file + rename)."""
    p = Path(path)
    if format == "geojson":
        doc = surface_to_geojson(surface, legend or make_legend(surface))
        text = canonical_dumps(doc) + "\n"
    elif format == "csv":
        text = surface_to_csv(surface)
    else:
        raise ValidationError(f"unknown surface format {format!r} (geojson or csv)")
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(text, encoding="ascii")
    tmp.replace(p)


# ----------------------------------------------------------------------- kde

def kde_smooth(surface: PredictionSurface, bandwidth_m: float) -> RasterLayer:
    """Gaussian-weighted mean of the surface's points on its own lattice.

    Batch-only smoothing (Nadaraya-Watson): each lattice point's output
    averages every non-missing input value with weight
    exp(-d^2 / (2 h^2)), distances in meters by the planar approximation.
    Outputs therefore stay within [min, max] of the inputs.
    """
    if bandwidth_m <= 0:
        raise ValidationError(f"bandwidth_m must be positive, got {bandwidth_m}")
    present = [(lon, lat, v) for lon, lat, v in
               zip(surface.lons, surface.lats, surface.values) if v is not None]
    if not present:
        raise DataError("surface has no values to smooth")

    mid_lat = 0.5 * (min(surface.lats) + max(surface.lats))
    m_per_deg_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid_lat))

    src = np.array([
        [lon * m_per_deg_lon, lat * METERS_PER_DEGREE_LAT] for lon, lat, _v in present
    ])
    vals = np.array([v for _lon, _lat, v in present])
    targets = np.array([
        [lon * m_per_deg_lon, lat * METERS_PER_DEGREE_LAT]
        for lon, lat in zip(surface.lons, surface.lats)
    ])

    d2 = ((targets[:, None, :] - src[None, :, :]) ** 2).sum(axis=2)
    # subtracting the per-row minimum keeps the exponentials from all
    # underflowing at small bandwidths; the ratio is unchanged
    d2 = d2 - d2.min(axis=1, keepdims=True)
    w = np.exp(-d2 / (2.0 * bandwidth_m * bandwidth_m))
    out = (w @ vals) / w.sum(axis=1)

    grid = _lattice_gridspec(surface)
    return RasterLayer(
        grid=grid, values=out.reshape(surface.ny, surface.nx),
        variable=surface.pollutant,
    )


def _lattice_gridspec(surface: PredictionSurface) -> GridSpec:
    """GridSpec whose cell centers coincide with the surface lattice."""
    spacing_lat_deg = surface.spacing_m / METERS_PER_DEGREE_LAT
    lat0 = max(surface.lats)  # northernmost row of centers
    lat1 = min(surface.lats)
    mid_lat = 0.5 * (lat0 + lat1)
    m_per_deg_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid_lat))
    spacing_lon_deg = surface.spacing_m / m_per_deg_lon
    bounds = GeoBounds(
        min_lon=min(surface.lons) - 0.5 * spacing_lon_deg,
        max_lon=max(surface.lons) + 0.5 * spacing_lon_deg,
        min_lat=lat1 - 0.5 * spacing_lat_deg,
        max_lat=lat0 + 0.5 * spacing_lat_deg,
    )
    return GridSpec(
        bounds=bounds, rows=surface.ny, cols=surface.nx,
        cell_size_m=bounds.lat_extent_m / surface.ny,
    )
