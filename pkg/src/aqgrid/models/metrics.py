"""Regression quality metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from aqgrid.errors import ValidationError


@dataclass(frozen=True)
class MetricsReport:
    r2: float
    mae: float
    mse: float
    rmse: float
    mape: Optional[float]       # percent; None when every actual is zero
    mape_excluded: int          # zero-actual rows left out of the MAPE mean
    pairs: tuple                # ((actual, predicted), ...)

    def to_dict(self) -> dict:
        return {
            "r2": self.r2,
            "mae": self.mae,
            "mse": self.mse,
            "rmse": self.rmse,
            "mape": self.mape,
            "mape_excluded": self.mape_excluded,
            "pairs": [[a, p] for a, p in self.pairs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            r2=float(d["r2"]),
            mae=float(d["mae"]),
            mse=float(d["mse"]),
            rmse=float(d["rmse"]),
            mape=None if d.get("mape") is None else float(d["mape"]),
            mape_excluded=int(d.get("mape_excluded", 0)),
            pairs=tuple((float(a), float(p)) for a, p in d.get("pairs", [])),
        )


def evaluate(y_true, y_pred) -> MetricsReport:
    """Score predictions against actuals.

    MAPE averages |error|/|actual| over rows with a nonzero actual; the
    excluded-row count is reported, and MAPE itself is absent when every
    actual is zero. R² on a constant actual vector is 1 for a perfect fit
    and 0 otherwise (no variance to explain).
    """
    yt = np.asarray(y_true, dtype=np.float64).ravel()
    yp = np.asarray(y_pred, dtype=np.float64).ravel()
    if yt.size == 0 or yt.shape != yp.shape:
        raise ValidationError(
            f"evaluate needs equal nonzero lengths, got {yt.size} and {yp.size}"
        )

    err = yt - yp
    mae = float(np.mean(np.abs(err)))
    mse = float(np.mean(err * err))
    rmse = float(np.sqrt(mse))

    ss_res = float(np.sum(err * err))
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot

    nonzero = yt != 0.0
    excluded = int(np.count_nonzero(~nonzero))
    if nonzero.any():
        mape = float(np.mean(np.abs(err[nonzero]) / np.abs(yt[nonzero])) * 100.0)
    else:
        mape = None

    return MetricsReport(
        r2=r2, mae=mae, mse=mse, rmse=rmse,
        mape=mape, mape_excluded=excluded,
        pairs=tuple(zip(yt.tolist(), yp.tolist())),
    )
