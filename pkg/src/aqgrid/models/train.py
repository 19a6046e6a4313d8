"""Model kinds, hyperparameter validation, and the trained-model container.

All four kinds are fitted on z-scored features using train-set statistics
computed inside train(). Constant columns carry no information and would
divide by zero, so they are dropped before fitting and their names are
recorded on the model; prediction still expects the full input arity and
selects the kept columns itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from aqgrid.errors import TrainingError, ValidationError
from aqgrid.models.boosting import BoostingModel, fit_boosting
from aqgrid.models.forest import ForestModel, fit_forest
from aqgrid.models.linear import LinearModel, fit_linear
from aqgrid.models.svr import SvrModel, fit_svr


class ModelKind(enum.Enum):
    LINEAR = "linear"
    RANDOM_FOREST = "random_forest"
    SVR = "svr"
    GRADIENT_BOOSTING = "gradient_boosting"

    @classmethod
    def parse(cls, s) -> "ModelKind":
        if isinstance(s, cls):
            return s
        try:
            return cls(str(s))
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValidationError(f"unknown model kind {s!r} (valid: {valid})") from None


MODEL_KINDS = tuple(k.value for k in ModelKind)


def _require_positive_int(params, key, minimum=1):
    v = params[key]
    if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < minimum:
        raise ValidationError(f"{key} must be an integer >= {minimum}, got {v!r}")
    return int(v)


def _require_positive(params, key):
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
        raise ValidationError(f"{key} must be a positive number, got {v!r}")
    if not v > 0:
        raise ValidationError(f"{key} must be strictly positive, got {v!r}")
    return float(v)


def normalize_params(kind: ModelKind, params: Optional[dict]) -> dict:
    """Fill defaults and validate; unknown keys are rejected.

    svr's rbf_gamma may stay None here — train() resolves it to 1/p once
    the kept-feature count is known.
    """
    params = dict(params or {})

    def _reject_unknown(allowed):
        unknown = set(params) - set(allowed)
        if unknown:
            raise ValidationError(
                f"unknown hyperparameters for {kind.value}: {sorted(unknown)} "
                f"(allowed: {sorted(allowed)})"
            )

    if kind is ModelKind.LINEAR:
        _reject_unknown(())
        return {}

    if kind is ModelKind.RANDOM_FOREST:
        _reject_unknown({"n_trees", "max_depth", "min_samples_leaf", "bootstrap"})
        out = {
            "n_trees": 100, "max_depth": None,
            "min_samples_leaf": 1, "bootstrap": True,
        }
        out.update(params)
        _require_positive_int(out, "n_trees")
        if out["max_depth"] is not None:
            _require_positive_int(out, "max_depth")
        _require_positive_int(out, "min_samples_leaf")
        if not isinstance(out["bootstrap"], bool):
            raise ValidationError(f"bootstrap must be true/false, got {out['bootstrap']!r}")
        return out

    if kind is ModelKind.SVR:
        _reject_unknown({"C", "epsilon", "rbf_gamma"})
        out = {"C": 10.0, "epsilon": 0.5, "rbf_gamma": None}
        out.update(params)
        out["C"] = _require_positive(out, "C")
        out["epsilon"] = _require_positive(out, "epsilon")
        if out["rbf_gamma"] is not None:
            out["rbf_gamma"] = _require_positive(out, "rbf_gamma")
        return out

    if kind is ModelKind.GRADIENT_BOOSTING:
        _reject_unknown({"n_stages", "learning_rate", "max_depth"})
        out = {"n_stages": 100, "learning_rate": 0.1, "max_depth": 3}
        out.update(params)
        _require_positive_int(out, "n_stages")
        out["learning_rate"] = _require_positive(out, "learning_rate")
        _require_positive_int(out, "max_depth")
        return out

    raise ValidationError(f"unhandled model kind {kind}")


@dataclass(frozen=True)
class TrainedModel:
    kind: ModelKind
    feature_names: tuple
    kept_idx: tuple                      # columns used after the constant drop
    dropped_features: tuple
    mean: np.ndarray = field(repr=False)  # per kept feature
    std: np.ndarray = field(repr=False)
    seed: int = 0
    params: dict = field(default_factory=dict)
    inner: object = None

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.feature_names):
            raise ValidationError(
                f"model expects {len(self.feature_names)} features "
                f"({', '.join(self.feature_names)}), got {X.shape[1]}"
            )
        if not np.isfinite(X).all():
            raise ValidationError("prediction input contains non-finite values")
        Z = (X[:, list(self.kept_idx)] - self.mean) / self.std
        return np.asarray(self.inner.predict(Z), dtype=np.float64)

    def destandardized_linear(self):
        """(coef-by-name, intercept) in original feature units (linear only)."""
        if self.kind is not ModelKind.LINEAR:
            raise ValidationError("de-standardized coefficients exist for linear models only")
        w = self.inner.coef / self.std
        b = float(self.inner.intercept - np.sum(self.inner.coef * self.mean / self.std))
        names = [self.feature_names[i] for i in self.kept_idx]
        return dict(zip(names, w.tolist())), b


def train(kind, X, y, params: Optional[dict] = None, seed: int = 0,
          feature_names=None) -> TrainedModel:
    kind = ModelKind.parse(kind)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise TrainingError(f"X must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n < 2:
        raise TrainingError(f"training needs at least 2 rows, got {n}")
    if p < 1:
        raise TrainingError("training needs at least 1 feature")
    if y.shape[0] != n:
        raise TrainingError(f"X has {n} rows but y has {y.shape[0]}")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise TrainingError("training data contains missing or non-finite values")
    if feature_names is None:
        feature_names = tuple(f"x{i}" for i in range(p))
    feature_names = tuple(feature_names)
    if len(feature_names) != p:
        raise TrainingError(
            f"{len(feature_names)} feature names for {p} columns"
        )

    hp = normalize_params(kind, params)

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # a column of identical values can still show a few-ULP std (the mean
    # rounds), so constancy is judged by the range, not the moments
    constant = X.max(axis=0) == X.min(axis=0)
    kept = np.flatnonzero(~constant)
    if kept.size == 0:
        raise TrainingError("every feature is constant; nothing to fit")
    dropped = tuple(feature_names[i] for i in np.flatnonzero(constant))
    Z = (X[:, kept] - mean[kept]) / std[kept]

    if kind is ModelKind.LINEAR:
        inner = fit_linear(Z, y)
    elif kind is ModelKind.RANDOM_FOREST:
        inner = fit_forest(
            Z, y, n_trees=hp["n_trees"], max_depth=hp["max_depth"],
            min_samples_leaf=hp["min_samples_leaf"], bootstrap=hp["bootstrap"],
            seed=seed,
        )
    elif kind is ModelKind.SVR:
        gamma = hp["rbf_gamma"]
        if gamma is None:
            gamma = 1.0 / kept.size
            hp = {**hp, "rbf_gamma": gamma}
        inner = fit_svr(Z, y, C=hp["C"], epsilon=hp["epsilon"], gamma=gamma)
    else:
        inner = fit_boosting(
            Z, y, n_stages=hp["n_stages"], learning_rate=hp["learning_rate"],
            max_depth=hp["max_depth"],
        )

    return TrainedModel(
        kind=kind,
        feature_names=feature_names,
        kept_idx=tuple(int(i) for i in kept),
        dropped_features=dropped,
        mean=mean[kept],
        std=std[kept],
        seed=seed,
        params=hp,
        inner=inner,
    )


def predict(model: TrainedModel, X) -> np.ndarray:
    return model.predict(X)


_INNER_TYPES = {
    ModelKind.LINEAR: LinearModel,
    ModelKind.RANDOM_FOREST: ForestModel,
    ModelKind.SVR: SvrModel,
    ModelKind.GRADIENT_BOOSTING: BoostingModel,
}
