"""City catalog: what data exists and where it lives on disk.

The catalog file is YAML; every referenced file must exist when the
catalog loads, so a misconfigured deployment fails at startup rather
than mid-job. Its version string is folded into scenario ids, so
replacing a city's data invalidates previously cached results.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from aqgrid.errors import DataError, ValidationError
from aqgrid.raster.variables import INPUT_NAMES
from aqgrid.models.train import MODEL_KINDS
from aqgrid.surface import StudyArea, load_study_area


@dataclass(frozen=True)
class CatalogEntry:
    city_id: str
    name: str
    years: tuple
    pollutants: tuple
    stations_file: Path
    ground_truth_file: Path
    rasters_dir: Path
    area: StudyArea


@dataclass(frozen=True)
class Catalog:
    version: str
    cities: dict  # city_id -> CatalogEntry

    def entry(self, city_id: str) -> CatalogEntry:
        if city_id not in self.cities:
            known = ", ".join(sorted(self.cities)) or "(none)"
            raise ValidationError(f"unknown city {city_id!r} (catalog has: {known})")
        return self.cities[city_id]

    def summary(self) -> dict:
        return {
            "version": self.version,
            "cities": [
                {
                    "id": e.city_id,
                    "name": e.name,
                    "years": list(e.years),
                    "pollutants": list(e.pollutants),
                }
                for e in self.cities.values()
            ],
            "variables": list(INPUT_NAMES),
            "model_kinds": list(MODEL_KINDS),
        }


def load_catalog(path) -> Catalog:
    p = Path(path)
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read catalog {p}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise DataError(f"{p}: invalid YAML ({exc})") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("cities"), dict):
        raise DataError(f"{p}: catalog must be a mapping with a 'cities' section")

    base = p.parent
    cities = {}
    for city_id, spec in raw["cities"].items():
        if not isinstance(spec, dict):
            raise DataError(f"{p}: city {city_id!r} must be a mapping")
        try:
            stations = (base / spec["stations_file"]).resolve()
            ground = (base / spec["ground_truth_file"]).resolve()
            rasters = (base / spec["rasters_dir"]).resolve()
            area_file = (base / spec["area_file"]).resolve()
            years = tuple(int(y) for y in spec["years"])
            pollutants = tuple(str(x) for x in spec["pollutants"])
        except KeyError as exc:
            raise DataError(f"{p}: city {city_id!r} missing field {exc}") from exc
        for f in (stations, ground, area_file):
            if not f.is_file():
                raise DataError(f"catalog references missing file: {f}")
        if not rasters.is_dir():
            raise DataError(f"catalog references missing raster directory: {rasters}")
        if not years:
            raise DataError(f"{p}: city {city_id!r} lists no years")
        if not pollutants:
            raise DataError(f"{p}: city {city_id!r} lists no pollutants")
        cities[str(city_id)] = CatalogEntry(
            city_id=str(city_id),
            name=str(spec.get("name", city_id)),
            years=years,
            pollutants=pollutants,
            stations_file=stations,
            ground_truth_file=ground,
            rasters_dir=rasters,
            area=load_study_area(area_file),
        )
    if not cities:
        raise DataError(f"{p}: catalog lists no cities")
    return Catalog(version=str(raw.get("version", "0")), cities=cities)
