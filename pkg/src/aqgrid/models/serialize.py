"""Self-describing JSON persistence for trained models."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from aqgrid.errors import DataError
from aqgrid.jsonutil import canonical_dumps
from aqgrid.models.train import _INNER_TYPES, ModelKind, TrainedModel

FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind.value,
        "feature_names": list(model.feature_names),
        "kept_idx": list(model.kept_idx),
        "dropped_features": list(model.dropped_features),
        "standardization": {
            "mean": model.mean.tolist(),
            "std": model.std.tolist(),
        },
        "seed": model.seed,
        "params": model.params,
        "model": model.inner.to_dict(),
    }


def model_from_dict(d: dict) -> TrainedModel:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version!r}")
    kind = ModelKind.parse(d["kind"])
    inner = _INNER_TYPES[kind].from_dict(d["model"])
    return TrainedModel(
        kind=kind,
        feature_names=tuple(d["feature_names"]),
        kept_idx=tuple(int(i) for i in d["kept_idx"]),
        dropped_features=tuple(d["dropped_features"]),
        mean=np.array(d["standardization"]["mean"], dtype=np.float64),
        std=np.array(d["standardization"]["std"], dtype=np.float64),
        seed=int(d["seed"]),
        params=dict(d["params"]),
        inner=inner,
    )


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(canonical_dumps(model_to_dict(model)) + "\n", encoding="ascii")


def load_model(path) -> TrainedModel:
    p = Path(path)
    try:
        d = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{p}: cannot read model ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{p}: not valid JSON ({exc})") from exc
    try:
        return model_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{p}: malformed model document ({exc})") from exc
