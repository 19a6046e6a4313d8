"""Plain-text raster codec (ESRI-ASCII-style header).

Header, in order: ncols, nrows, xllcorner, yllcorner, cellsize,
NODATA_value — whitespace-separated key/value lines, then the cell values
row-major north to south. One deliberate departure from the classic ESRI
dialect: xllcorner/yllcorner are degrees but cellsize is METERS, because
every grid here is defined by a metric cell size over geographic bounds.

The format assumes square metric cells; a grid whose east-west cell width
differs from its cell height beyond float noise cannot round-trip its
east bound exactly.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from aqgrid.errors import GeoreferencingError, UnreadableFileError
from aqgrid.raster.grid import METERS_PER_DEGREE_LAT, GeoBounds, GridSpec
from aqgrid.raster.layer import RasterLayer, Temporal

NODATA_SENTINEL = -9999.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


def write_ascii_grid(layer: RasterLayer, path) -> None:
    grid = layer.grid
    lines = [
        f"ncols {grid.cols}",
        f"nrows {grid.rows}",
        f"xllcorner {grid.bounds.min_lon!r}",
        f"yllcorner {grid.bounds.min_lat!r}",
        f"cellsize {grid.cell_size_m!r}",
        f"NODATA_value {NODATA_SENTINEL!r}",
    ]
    vals = np.where(layer.nodata_mask, NODATA_SENTINEL, layer.values)
    for row in vals:
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_ascii_grid(path, variable: str = "", temporal: Temporal = Temporal.static()) -> RasterLayer:
    p = Path(path)
    try:
        text = p.read_text(encoding="ascii")
    except OSError as exc:
        raise UnreadableFileError(str(p), f"cannot read file ({exc})") from exc
    except UnicodeDecodeError as exc:
        raise UnreadableFileError(str(p), "not ASCII text") from exc

    tokens = text.split()
    header = {}
    pos = 0
    for expected in _HEADER_KEYS:
        if pos + 1 >= len(tokens):
            raise GeoreferencingError(str(p), f"header truncated before {expected!r}")
        key = tokens[pos].lower()
        if key != expected:
            raise GeoreferencingError(
                str(p), f"expected header key {expected!r}, found {tokens[pos]!r}"
            )
        try:
            header[expected] = float(tokens[pos + 1])
        except ValueError:
            raise GeoreferencingError(
                str(p), f"unparsable value for {expected!r}: {tokens[pos + 1]!r}"
            ) from None
        pos += 2

    cols, rows = int(header["ncols"]), int(header["nrows"])
    if cols < 1 or rows < 1 or cols != header["ncols"] or rows != header["nrows"]:
        raise GeoreferencingError(str(p), f"bad grid shape {header['nrows']}x{header['ncols']}")
    cell_m = header["cellsize"]
    if cell_m <= 0:
        raise GeoreferencingError(str(p), f"cellsize must be positive, got {cell_m}")

    min_lon, min_lat = header["xllcorner"], header["yllcorner"]
    max_lat = min_lat + rows * cell_m / METERS_PER_DEGREE_LAT
    mid_lat = 0.5 * (min_lat + max_lat)
    m_per_deg_lon = METERS_PER_DEGREE_LAT * math.cos(math.radians(mid_lat))
    max_lon = min_lon + cols * cell_m / m_per_deg_lon
    try:
        bounds = GeoBounds(min_lon, max_lon, min_lat, max_lat)
        grid = GridSpec(bounds=bounds, rows=rows, cols=cols, cell_size_m=cell_m)
    except Exception as exc:
        raise GeoreferencingError(str(p), f"invalid georeferencing: {exc}") from exc

    body = tokens[pos:]
    if len(body) != rows * cols:
        raise UnreadableFileError(
            str(p), f"expected {rows * cols} cell values, found {len(body)}"
        )
    try:
        values = np.array([float(t) for t in body], dtype=np.float64).reshape(rows, cols)
    except ValueError as exc:
        raise UnreadableFileError(str(p), f"unparsable cell value ({exc})") from exc

    nodata = header["nodata_value"]
    values[values == nodata] = np.nan
    return RasterLayer(grid=grid, values=values, variable=variable, temporal=temporal)
