"""CART regression tree with an exact midpoint split search.

Split selection maximizes variance reduction, scanning candidate
thresholds at midpoints between consecutive distinct sorted values.
Ties go to the lowest feature index, then the lowest threshold, so a
fitted tree is a deterministic function of (X, y, params).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from aqgrid.errors import TrainingError


@dataclass(frozen=True)
class RegressionTree:
    """Flat-array tree: node i is a leaf iff feature[i] < 0."""

    feature: np.ndarray = field(repr=False)    # int32
    threshold: np.ndarray = field(repr=False)  # float64
    left: np.ndarray = field(repr=False)       # int32 child ids
    right: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)      # float64, meaningful at leaves

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        cur = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            feats = self.feature[cur]
            internal = feats >= 0
            if not internal.any():
                break
            rows = np.flatnonzero(internal)
            sub = cur[rows]
            go_left = X[rows, feats[rows]] <= self.threshold[sub]
            cur[rows] = np.where(go_left, self.left[sub], self.right[sub])
        return self.value[cur]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(
            feature=np.array(d["feature"], dtype=np.int32),
            threshold=np.array(d["threshold"], dtype=np.float64),
            left=np.array(d["left"], dtype=np.int32),
            right=np.array(d["right"], dtype=np.int32),
            value=np.array(d["value"], dtype=np.float64),
        )


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """(feature, threshold, gain) of the best variance-reducing split, or None."""
    n = len(y)
    total = y.sum()
    base = total * total / n
    best = None  # (gain, feature, threshold)
    for j in range(X.shape[1]):
        xj = X[:, j]
        order = np.argsort(xj, kind="stable")
        xs = xj[order]
        ys = y[order]
        left_sum = np.cumsum(ys)[:-1]
        left_n = np.arange(1, n, dtype=np.float64)
        right_n = n - left_n
        valid = (xs[:-1] < xs[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
        if not valid.any():
            continue
        gain = left_sum * left_sum / left_n + (total - left_sum) ** 2 / right_n - base
        gain[~valid] = -np.inf
        pos = int(np.argmax(gain))  # first max -> lowest threshold
        if gain[pos] <= 0.0:
            continue
        if best is None or gain[pos] > best[0]:
            thr = 0.5 * (xs[pos] + xs[pos + 1])
            if thr >= xs[pos + 1]:  # midpoint rounded up to the next value
                thr = xs[pos]
            best = (float(gain[pos]), j, float(thr))
    if best is None:
        return None
    return best[1], best[2], best[0]


def fit_tree(X, y, max_depth: Optional[int] = None, min_samples_leaf: int = 1) -> RegressionTree:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise TrainingError(f"bad training shapes X={X.shape}, y={y.shape}")
    if min_samples_leaf < 1:
        raise TrainingError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
    if max_depth is not None and max_depth < 1:
        raise TrainingError(f"max_depth must be >= 1 or unlimited, got {max_depth}")

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def build(idx: np.ndarray, depth: int) -> int:
        node = new_node()
        ys = y[idx]
        # exact leaf value when the node is pure keeps memorized
        # predictions bit-identical to the targets
        if np.all(ys == ys[0]):
            value[node] = float(ys[0])
            return node
        value[node] = float(ys.mean())
        if max_depth is not None and depth >= max_depth:
            return node
        if len(idx) < 2 * min_samples_leaf or len(idx) < 2:
            return node
        found = _best_split(X[idx], ys, min_samples_leaf)
        if found is None:
            return node
        j, thr, _gain = found
        mask = X[idx, j] <= thr
        feature[node] = j
        threshold[node] = thr
        left[node] = build(idx[mask], depth + 1)
        right[node] = build(idx[~mask], depth + 1)
        return node

    build(np.arange(len(y)), 0)
    return RegressionTree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )
