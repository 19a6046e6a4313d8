"""Format dispatch for raster reading and writing."""

from __future__ import annotations

from pathlib import Path

from aqgrid.errors import ValidationError
from aqgrid.raster.ascii_grid import read_ascii_grid, write_ascii_grid
from aqgrid.raster.geotiff import read_geotiff, write_geotiff
from aqgrid.raster.layer import RasterLayer, Temporal

FORMATS = ("geotiff", "ascii_grid")

_SUFFIXES = {
    ".tif": "geotiff",
    ".tiff": "geotiff",
    ".asc": "ascii_grid",
    ".txt": "ascii_grid",
}


def detect_format(path) -> str:
    fmt = _SUFFIXES.get(Path(path).suffix.lower())
    if fmt is None:
        raise ValidationError(
            f"cannot infer raster format from {path!r}; pass format explicitly"
        )
    return fmt


def read_raster(path, format: str = None, variable: str = "",
                temporal: Temporal = Temporal.static()) -> RasterLayer:
    fmt = format or detect_format(path)
    if fmt == "geotiff":
        return read_geotiff(path, variable=variable, temporal=temporal)
    if fmt == "ascii_grid":
        return read_ascii_grid(path, variable=variable, temporal=temporal)
    raise ValidationError(f"unknown raster format {fmt!r} (supported: {FORMATS})")


def write_raster(layer: RasterLayer, path, format: str = None) -> None:
    fmt = format or detect_format(path)
    if fmt == "geotiff":
        write_geotiff(layer, path)
    elif fmt == "ascii_grid":
        write_ascii_grid(layer, path)
    else:
        raise ValidationError(f"unknown raster format {fmt!r} (supported: {FORMATS})")
