"""Random forest: an average of independently grown CART trees.

With bootstrap on, tree t resamples the rows with a generator seeded by
[seed, t], so the whole ensemble is bit-reproducible. With bootstrap off
every tree sees the full sample (and, having no feature subsampling,
grows identically) — useful as a memorization check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from aqgrid.errors import TrainingError
from aqgrid.models.tree import RegressionTree, fit_tree


@dataclass(frozen=True)
class ForestModel:
    trees: tuple = field(repr=False)  # of RegressionTree
    n_trees: int = 0
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    bootstrap: bool = True

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0])
        for t in self.trees:
            acc += t.predict(X)
        return acc / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "trees": [t.to_dict() for t in self.trees],
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=tuple(RegressionTree.from_dict(t) for t in d["trees"]),
            n_trees=int(d["n_trees"]),
            max_depth=None if d["max_depth"] is None else int(d["max_depth"]),
            min_samples_leaf=int(d["min_samples_leaf"]),
            bootstrap=bool(d["bootstrap"]),
        )


def fit_forest(X, y, n_trees: int = 100, max_depth: Optional[int] = None,
               min_samples_leaf: int = 1, bootstrap: bool = True,
               seed: int = 0) -> ForestModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if n_trees < 1:
        raise TrainingError(f"n_trees must be >= 1, got {n_trees}")
    n = len(y)
    trees = []
    for t in range(n_trees):
        if bootstrap:
            idx = np.random.default_rng([seed, t]).integers(0, n, size=n)
            trees.append(fit_tree(X[idx], y[idx], max_depth, min_samples_leaf))
        else:
            trees.append(fit_tree(X, y, max_depth, min_samples_leaf))
    return ForestModel(
        trees=tuple(trees), n_trees=n_trees, max_depth=max_depth,
        min_samples_leaf=min_samples_leaf, bootstrap=bootstrap,
    )
