"""Model persistence: the round trip must predict bit-identically."""

import numpy as np
import pytest

from aqgrid.errors import DataError
from aqgrid.jsonutil import canonical_dumps
from aqgrid.models.serialize import (
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from aqgrid.models.train import MODEL_KINDS, train


def _problem(seed=0):
    g = np.random.default_rng(seed)
    X = g.normal(size=(50, 4))
    y = X @ np.array([1.0, -0.5, 2.0, 0.1]) + g.normal(scale=0.2, size=50)
    return X, y


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_roundtrip_predicts_identically(kind, tmp_path):
    X, y = _problem()
    model = train(kind, X, y, seed=3, feature_names=("a", "b", "c", "d"))
    path = tmp_path / "m.json"
    save_model(model, path)
    again = load_model(path)
    assert np.array_equal(model.predict(X), again.predict(X))  # bit-exact
    assert again.kind == model.kind
    assert again.feature_names == model.feature_names
    assert again.params == model.params


def test_document_is_canonical_json(tmp_path):
    X, y = _problem(1)
    model = train("linear", X, y, seed=0)
    path = tmp_path / "m.json"
    save_model(model, path)
    text = path.read_text()
    # canonical form: sorted keys, no whitespace, trailing newline
    import json
    assert text == canonical_dumps(json.loads(text)) + "\n"


def test_save_load_save_is_stable(tmp_path):
    X, y = _problem(2)
    model = train("random_forest", X, y, seed=1, params={"n_trees": 5})
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(model, p1)
    save_model(load_model(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_version_mismatch_rejected():
    X, y = _problem(3)
    doc = model_to_dict(train("linear", X, y, seed=0))
    doc["format_version"] = 99
    with pytest.raises(DataError):
        model_from_dict(doc)


def test_missing_file_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        load_model(tmp_path / "nope.json")


def test_corrupt_json_is_a_data_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(DataError):
        load_model(p)


def test_truncated_document_is_a_data_error(tmp_path):
    X, y = _problem(4)
    doc = model_to_dict(train("svr", X, y, seed=0))
    del doc["model"]
    p = tmp_path / "trunc.json"
    p.write_text(canonical_dumps(doc))
    with pytest.raises(DataError):
        load_model(p)
