"""Seeded k-fold cross-validation and exhaustive grid search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from aqgrid.errors import ValidationError
from aqgrid.models.metrics import evaluate
from aqgrid.models.train import ModelKind, train

# Search spaces used when a scenario asks for tuning without supplying
# its own grid. Small on purpose: exhaustive CV over these stays
# desk-scale. SVR and linear default to fixed parameters instead.
DEFAULT_GRIDS = {
    ModelKind.RANDOM_FOREST: {
        "n_trees": [50, 100, 200],
        "max_depth": [None, 8, 16],
        "min_samples_leaf": [1, 3],
    },
    ModelKind.GRADIENT_BOOSTING: {
        "n_stages": [100, 300],
        "learning_rate": [0.05, 0.1],
        "max_depth": [2, 3],
    },
    ModelKind.SVR: {},
    ModelKind.LINEAR: {},
}


@dataclass(frozen=True)
class GridSearchResult:
    evaluated: tuple   # ((params, mean_cv_r2), ...) in enumeration order
    best: dict
    cv_folds: int

    def to_dict(self) -> dict:
        return {
            "evaluated": [{"params": p, "mean_cv_r2": s} for p, s in self.evaluated],
            "best": self.best,
            "cv_folds": self.cv_folds,
        }


def kfold_indices(n: int, k: int, seed: int):
    """k (train, test) index pairs from one seeded shuffle of range(n)."""
    if k < 2:
        raise ValidationError(f"need at least 2 folds, got {k}")
    if n < k:
        raise ValidationError(f"cannot make {k} folds from {n} rows")
    perm = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(perm, k)
    out = []
    for i in range(k):
        test = folds[i]
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        if len(train_idx) < 2:
            raise ValidationError(
                f"fold {i} leaves only {len(train_idx)} training rows"
            )
        out.append((train_idx, test))
    return out


def expand_grid(grid: Optional[dict]):
    """Cartesian product in key-insertion order; empty grid = one default combo."""
    if not grid:
        return [{}]
    keys = list(grid.keys())
    for k in keys:
        vals = grid[k]
        if not isinstance(vals, (list, tuple)) or len(vals) == 0:
            raise ValidationError(f"grid entry {k!r} must be a nonempty list")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def grid_search(kind, grid: Optional[dict], X, y, cv_folds: int = 5,
                seed: int = 0, feature_names=None) -> GridSearchResult:
    """Score every combination by mean test-fold R² over one shared k-fold split.

    Combination c trains with its own derived seed (seed ^ c) so parallel
    evaluation and sequential evaluation see identical random streams.
    The best combination is the first one attaining the maximal score.
    """
    kind = ModelKind.parse(kind)
    if kind in (ModelKind.RANDOM_FOREST, ModelKind.GRADIENT_BOOSTING) and not grid:
        raise ValidationError(f"{kind.value} grid search requires a nonempty grid")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()

    combos = expand_grid(grid)
    folds = kfold_indices(len(y), cv_folds, seed)

    evaluated = []
    best_params, best_score = None, -np.inf
    for c_idx, params in enumerate(combos):
        combo_seed = seed ^ c_idx
        scores = []
        for train_idx, test_idx in folds:
            model = train(
                kind, X[train_idx], y[train_idx], params=params,
                seed=combo_seed, feature_names=feature_names,
            )
            scores.append(evaluate(y[test_idx], model.predict(X[test_idx])).r2)
        mean_score = float(np.mean(scores))
        evaluated.append((params, mean_score))
        if mean_score > best_score:
            best_params, best_score = params, mean_score
    return GridSearchResult(
        evaluated=tuple(evaluated), best=best_params, cv_folds=cv_folds
    )
