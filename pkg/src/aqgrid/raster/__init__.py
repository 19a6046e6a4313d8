from aqgrid.raster.grid import GeoBounds, GridSpec, METERS_PER_DEGREE_LAT
from aqgrid.raster.layer import RasterLayer, Temporal
from aqgrid.raster.variables import (
    Cadence,
    GROUND_UNIT,
    INPUT_NAMES,
    INPUT_VARIABLES,
    STATIC_NAMES,
    Variable,
    get_variable,
)
from aqgrid.raster.io import read_raster, write_raster, detect_format, FORMATS
from aqgrid.raster.ops import resample_to_grid, temporal_composite

__all__ = [
    "GeoBounds",
    "GridSpec",
    "METERS_PER_DEGREE_LAT",
    "RasterLayer",
    "Temporal",
    "Cadence",
    "Variable",
    "INPUT_VARIABLES",
    "INPUT_NAMES",
    "STATIC_NAMES",
    "GROUND_UNIT",
    "get_variable",
    "read_raster",
    "write_raster",
    "detect_format",
    "FORMATS",
    "resample_to_grid",
    "temporal_composite",
]
