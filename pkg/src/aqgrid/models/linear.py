"""Ordinary least squares on standardized features, with a ridge fallback.

The design matrix gains an intercept column and is solved by SVD. A
rank-deficient design (smallest singular value <= 1e-12 of the largest)
switches to a tiny ridge solve — lambda = 1e-10 * trace of the Gram
matrix — and the model records that the fallback fired, since collinear
driving factors must degrade gracefully rather than crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aqgrid.errors import TrainingError

_RANK_RTOL = 1e-12
_RIDGE_SCALE = 1e-10


@dataclass(frozen=True)
class LinearModel:
    coef: np.ndarray = field(repr=False)  # per standardized feature
    intercept: float
    ridge_fallback: bool = False

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.coef + self.intercept

    def to_dict(self) -> dict:
        return {
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "ridge_fallback": self.ridge_fallback,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        return cls(
            coef=np.array(d["coef"], dtype=np.float64),
            intercept=float(d["intercept"]),
            ridge_fallback=bool(d["ridge_fallback"]),
        )


def fit_linear(X, y) -> LinearModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 2:
        raise TrainingError(f"bad training shapes X={X.shape}, y={y.shape}")

    A = np.column_stack([X, np.ones(X.shape[0])])
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    fallback = bool(s[-1] <= s[0] * _RANK_RTOL)
    if not fallback:
        theta = vt.T @ ((u.T @ y) / s)
    else:
        gram = A.T @ A
        lam = _RIDGE_SCALE * float(np.trace(gram))
        theta = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), A.T @ y)
    return LinearModel(
        coef=theta[:-1], intercept=float(theta[-1]), ridge_fallback=fallback
    )
