import numpy as np
import pytest

from aqgrid.errors import ValidationError
from aqgrid.models.tuning import (
    DEFAULT_GRIDS,
    expand_grid,
    grid_search,
    kfold_indices,
)


def _problem(seed=0, n=50):
    g = np.random.default_rng(seed)
    X = g.normal(size=(n, 3))
    y = X @ np.array([2.0, -1.0, 0.5]) + g.normal(scale=0.3, size=n)
    return X, y


def test_folds_partition_the_data():
    folds = kfold_indices(23, 5, seed=0)
    test_idx = np.concatenate([test for _, test in folds])
    assert sorted(test_idx.tolist()) == list(range(23))
    sizes = [len(test) for _, test in folds]
    assert max(sizes) - min(sizes) <= 1
    for train_idx, test in folds:
        assert not set(train_idx.tolist()) & set(test.tolist())
        assert len(train_idx) + len(test) == 23


def test_folds_are_seed_stable():
    a = kfold_indices(40, 5, seed=7)
    b = kfold_indices(40, 5, seed=7)
    for (tra, tea), (trb, teb) in zip(a, b):
        assert np.array_equal(tra, trb)
        assert np.array_equal(tea, teb)


def test_too_few_rows_for_folds():
    with pytest.raises(ValidationError):
        kfold_indices(3, 5, seed=0)


def test_expand_grid_order_and_count():
    combos = expand_grid({"a": [1, 2], "b": ["x", "y", "z"]})
    assert len(combos) == 6
    # first key varies slowest, preserving insertion order
    assert combos[0] == {"a": 1, "b": "x"}
    assert combos[1] == {"a": 1, "b": "y"}
    assert combos[-1] == {"a": 2, "b": "z"}


def test_expand_empty_grid():
    assert expand_grid({}) == [{}]


def test_search_evaluates_full_product():
    X, y = _problem()
    grid = {"n_trees": [5, 10], "max_depth": [2, 4]}
    result = grid_search("random_forest", grid, X, y, cv_folds=3, seed=0)
    assert len(result.evaluated) == 4
    assert result.best in [params for params, _ in result.evaluated]


def test_search_is_deterministic():
    X, y = _problem(1)
    grid = {"n_trees": [5, 10]}
    a = grid_search("random_forest", grid, X, y, cv_folds=3, seed=4)
    b = grid_search("random_forest", grid, X, y, cv_folds=3, seed=4)
    assert a.best == b.best
    assert [s for _, s in a.evaluated] == [s for _, s in b.evaluated]


def test_argmax_keeps_first_of_tied_scores():
    # a singleton grid value duplicated gives identical scores; the
    # winner must be the earlier combination
    X, y = _problem(2)
    grid = {"n_stages": [20, 20]}
    result = grid_search("gradient_boosting", grid, X, y, cv_folds=3, seed=0)
    scores = [s for _, s in result.evaluated]
    assert scores[0] == scores[1]
    assert result.best == result.evaluated[0][0]


def test_default_grid_shapes():
    from aqgrid.models.train import ModelKind

    rf = DEFAULT_GRIDS[ModelKind.RANDOM_FOREST]
    assert rf["n_trees"] == [50, 100, 200]
    assert rf["max_depth"] == [None, 8, 16]
    gbr = DEFAULT_GRIDS[ModelKind.GRADIENT_BOOSTING]
    assert gbr["learning_rate"] == [0.05, 0.1]
    # fixed-parameter kinds search nothing
    assert DEFAULT_GRIDS.get(ModelKind.LINEAR) in (None, {})
    assert DEFAULT_GRIDS.get(ModelKind.SVR) in (None, {})


def test_best_actually_wins():
    X, y = _problem(3)
    grid = {"n_trees": [2, 40]}
    result = grid_search("random_forest", grid, X, y, cv_folds=3, seed=0)
    by_params = dict((tuple(sorted(p.items())), s) for p, s in result.evaluated)
    best_score = by_params[tuple(sorted(result.best.items()))]
    assert best_score == max(s for _, s in result.evaluated)
