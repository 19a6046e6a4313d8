"""Air-quality surface modeling: rasters in, station-joined datasets,
four regression model families, and gridded pollution surfaces out."""

__version__ = "0.1.0"

from aqgrid.dataset import (
    GroundObservation,
    Station,
    TrainingTable,
    train_test_split,
)
from aqgrid.errors import (
    AqgridError,
    DataError,
    OutsideBoundsError,
    RasterReadError,
    TrainingError,
    ValidationError,
)
from aqgrid.models import MODEL_KINDS, ModelKind, evaluate, train
from aqgrid.raster import GeoBounds, GridSpec, RasterLayer, Temporal
from aqgrid.surface import (
    PredictionSurface,
    StudyArea,
    generate_grid,
    make_legend,
)

__all__ = [
    "AqgridError",
    "DataError",
    "GeoBounds",
    "GridSpec",
    "GroundObservation",
    "MODEL_KINDS",
    "ModelKind",
    "OutsideBoundsError",
    "PredictionSurface",
    "RasterLayer",
    "RasterReadError",
    "Station",
    "StudyArea",
    "Temporal",
    "TrainingError",
    "TrainingTable",
    "ValidationError",
    "evaluate",
    "generate_grid",
    "make_legend",
    "train",
    "train_test_split",
    "__version__",
]
