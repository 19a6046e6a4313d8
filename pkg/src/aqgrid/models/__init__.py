from aqgrid.models.metrics import MetricsReport, evaluate
from aqgrid.models.train import (
    MODEL_KINDS,
    ModelKind,
    TrainedModel,
    normalize_params,
    predict,
    train,
)
from aqgrid.models.tuning import (
    DEFAULT_GRIDS,
    GridSearchResult,
    expand_grid,
    grid_search,
    kfold_indices,
)
from aqgrid.models.serialize import load_model, model_from_dict, model_to_dict, save_model
from aqgrid.models.svr import svr_dual_check

__all__ = [
    "MetricsReport",
    "evaluate",
    "ModelKind",
    "MODEL_KINDS",
    "TrainedModel",
    "train",
    "predict",
    "normalize_params",
    "DEFAULT_GRIDS",
    "GridSearchResult",
    "grid_search",
    "kfold_indices",
    "expand_grid",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "svr_dual_check",
]
