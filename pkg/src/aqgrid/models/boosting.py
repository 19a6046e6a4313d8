"""Gradient boosting for squared loss: staged residual-fitting trees.

The ensemble starts at the target mean and each stage fits a shallow
tree to the current residuals, stepping by the learning rate. For
squared loss each leaf step shrinks that leaf's residual sum of squares
whenever learning_rate is in (0, 2), so the recorded training-MSE curve
is non-increasing — an invariant the tests assert stage by stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aqgrid.errors import TrainingError
from aqgrid.models.tree import RegressionTree, fit_tree


@dataclass(frozen=True)
class BoostingModel:
    init: float
    learning_rate: float
    stages: tuple = field(repr=False)      # of RegressionTree
    train_mse_curve: tuple = field(default=(), repr=False)
    max_depth: int = 3
    min_samples_leaf: int = 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.full(X.shape[0], self.init)
        for tree in self.stages:
            out += self.learning_rate * tree.predict(X)
        return out

    def to_dict(self) -> dict:
        return {
            "init": self.init,
            "learning_rate": self.learning_rate,
            "stages": [t.to_dict() for t in self.stages],
            "train_mse_curve": list(self.train_mse_curve),
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostingModel":
        return cls(
            init=float(d["init"]),
            learning_rate=float(d["learning_rate"]),
            stages=tuple(RegressionTree.from_dict(t) for t in d["stages"]),
            train_mse_curve=tuple(d.get("train_mse_curve", [])),
            max_depth=int(d["max_depth"]),
            min_samples_leaf=int(d["min_samples_leaf"]),
        )


def fit_boosting(X, y, n_stages: int = 200, learning_rate: float = 0.1,
                 max_depth: int = 3, min_samples_leaf: int = 1) -> BoostingModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if n_stages < 1:
        raise TrainingError(f"n_stages must be >= 1, got {n_stages}")
    if learning_rate <= 0:
        raise TrainingError(f"learning_rate must be positive, got {learning_rate}")
    if max_depth < 1:
        raise TrainingError(f"max_depth must be >= 1, got {max_depth}")

    current = np.full(len(y), float(y.mean()))
    stages = []
    curve = []
    for _ in range(n_stages):
        residual = y - current
        tree = fit_tree(X, residual, max_depth, min_samples_leaf)
        current = current + learning_rate * tree.predict(X)
        stages.append(tree)
        curve.append(float(np.mean((y - current) ** 2)))
    return BoostingModel(
        init=float(y.mean()), learning_rate=learning_rate,
        stages=tuple(stages), train_mse_curve=tuple(curve),
        max_depth=max_depth, min_samples_leaf=min_samples_leaf,
    )
