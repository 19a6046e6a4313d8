import numpy as np
import pytest

from aqgrid.fixture import generate_fixture
from aqgrid.pipeline import build_dataset


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """One synthetic city, generated once for the whole run."""
    out = tmp_path_factory.mktemp("fixture") / "city"
    generate_fixture(out, seed=0)
    return out


@pytest.fixture(scope="session")
def fixture_manifest(fixture_dir):
    from aqgrid.jsonutil import load_json
    return load_json(fixture_dir / "manifest.json")


@pytest.fixture(scope="session")
def fixture_table(fixture_dir):
    table, _ = build_dataset(
        fixture_dir / "stations.csv",
        fixture_dir / "rasters",
        fixture_dir / "ground_truth.csv",
        year=2019,
        pollutant="no2",
    )
    return table


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
