"""Training-table construction: stations + rasters + ground truth.

Missing values (features the rasters could not provide, targets without a
matching observation) ride along as NaN until clean() drops their rows,
so the removed-row report reflects one explicit cleaning step.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from aqgrid.errors import DataError, OutsideBoundsError, ValidationError
from aqgrid.raster.layer import RasterLayer, Temporal
from aqgrid.raster.variables import INPUT_NAMES, STATIC_NAMES


@dataclass(frozen=True)
class Station:
    id: str
    name: str
    lon: float
    lat: float


@dataclass(frozen=True)
class GroundObservation:
    station_id: str
    year: int
    month: int
    pollutant: str
    concentration: float  # ug/m3

    def __post_init__(self):
        if not (1 <= self.month <= 12):
            raise ValidationError(
                f"observation {self.station_id} {self.year}: month {self.month} out of range"
            )
        if self.concentration < 0:
            raise ValidationError(
                f"observation {self.station_id} {self.year}-{self.month:02d}: "
                f"negative concentration {self.concentration}"
            )


@dataclass(frozen=True)
class TrainingTable:
    """Column-oriented training rows; NaN marks a missing feature/target."""

    feature_names: tuple
    station_ids: tuple
    years: np.ndarray = field(repr=False)
    months: np.ndarray = field(repr=False)
    features: np.ndarray = field(repr=False)  # (n, p) float64
    targets: np.ndarray = field(repr=False)   # (n,) float64

    def __post_init__(self):
        n = len(self.station_ids)
        feats = np.asarray(self.features, dtype=np.float64).reshape(n, len(self.feature_names))
        tgts = np.asarray(self.targets, dtype=np.float64).reshape(n)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "station_ids", tuple(self.station_ids))
        object.__setattr__(self, "years", np.asarray(self.years, dtype=np.int64).reshape(n))
        object.__setattr__(self, "months", np.asarray(self.months, dtype=np.int64).reshape(n))
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "targets", tgts)

    def __len__(self) -> int:
        return len(self.station_ids)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def subset(self, indices) -> "TrainingTable":
        idx = np.asarray(indices, dtype=np.int64)
        return TrainingTable(
            feature_names=self.feature_names,
            station_ids=tuple(self.station_ids[i] for i in idx),
            years=self.years[idx],
            months=self.months[idx],
            features=self.features[idx],
            targets=self.targets[idx],
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh)
            w.writerow(["station_id", "year", "month", *self.feature_names, "target"])
            for i in range(len(self)):
                row = [self.station_ids[i], int(self.years[i]), int(self.months[i])]
                row += [_cell(v) for v in self.features[i]]
                row.append(_cell(self.targets[i]))
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "TrainingTable":
        p = Path(path)
        try:
            with open(p, newline="", encoding="ascii") as fh:
                reader = csv.reader(fh)
                header = next(reader, None)
                if header is None:
                    raise DataError(f"{p}: empty dataset file")
                if header[:3] != ["station_id", "year", "month"] or header[-1] != "target":
                    raise DataError(f"{p}: unexpected dataset header {header!r}")
                names = tuple(header[3:-1])
                sids, years, months, feats, tgts = [], [], [], [], []
                for ln, row in enumerate(reader, start=2):
                    if not row:
                        continue
                    if len(row) != len(header):
                        raise DataError(f"{p}:{ln}: expected {len(header)} columns, got {len(row)}")
                    sids.append(row[0])
                    years.append(int(row[1]))
                    months.append(int(row[2]))
                    feats.append([_parse_cell(v, p, ln) for v in row[3:-1]])
                    tgts.append(_parse_cell(row[-1], p, ln))
        except OSError as exc:
            raise DataError(f"{p}: cannot read dataset ({exc})") from exc
        except ValueError as exc:
            raise DataError(f"{p}: bad numeric value ({exc})") from exc
        return cls(
            feature_names=names,
            station_ids=tuple(sids),
            years=np.array(years, dtype=np.int64),
            months=np.array(months, dtype=np.int64),
            features=np.array(feats, dtype=np.float64).reshape(len(sids), len(names)),
            targets=np.array(tgts, dtype=np.float64),
        )


def _cell(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def _parse_cell(s: str, path, ln: int) -> float:
    s = s.strip()
    if s == "":
        return math.nan
    return float(s)


def load_stations(path) -> list:
    p = Path(path)
    try:
        with open(p, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header] != ["id", "name", "lon", "lat"]:
                raise DataError(f"{p}: expected header id,name,lon,lat, got {header!r}")
            stations = []
            seen = set()
            for ln, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 4:
                    raise DataError(f"{p}:{ln}: expected 4 columns, got {len(row)}")
                sid = row[0].strip()
                if sid in seen:
                    raise DataError(f"{p}:{ln}: duplicate station id {sid!r}")
                seen.add(sid)
                try:
                    lon, lat = float(row[2]), float(row[3])
                except ValueError:
                    raise DataError(f"{p}:{ln}: unparsable coordinate {row[2]!r},{row[3]!r}") from None
                if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
                    raise DataError(f"{p}:{ln}: coordinate out of range ({lon}, {lat})")
                stations.append(Station(id=sid, name=row[1].strip(), lon=lon, lat=lat))
    except OSError as exc:
        raise DataError(f"{p}: cannot read stations ({exc})") from exc
    return stations


def load_ground_truth(path):
    """Parse observations; returns (observations, skipped_empty_count)."""
    p = Path(path)
    expected = ["station_id", "year", "month", "pollutant", "value"]
    try:
        with open(p, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header] != expected:
                raise DataError(f"{p}: expected header {','.join(expected)}, got {header!r}")
            obs, skipped, seen = [], 0, set()
            for ln, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 5:
                    raise DataError(f"{p}:{ln}: expected 5 columns, got {len(row)}")
                if row[4].strip() == "":
                    skipped += 1
                    continue
                try:
                    year, month, value = int(row[1]), int(row[2]), float(row[4])
                except ValueError:
                    raise DataError(f"{p}:{ln}: unparsable numeric field") from None
                try:
                    o = GroundObservation(
                        station_id=row[0].strip(), year=year, month=month,
                        pollutant=row[3].strip(), concentration=value,
                    )
                except ValidationError as exc:
                    raise DataError(f"{p}:{ln}: {exc}") from exc
                key = (o.station_id, o.year, o.month, o.pollutant)
                if key in seen:
                    raise DataError(f"{p}:{ln}: duplicate observation for {key}")
                seen.add(key)
                obs.append(o)
    except OSError as exc:
        raise DataError(f"{p}: cannot read ground truth ({exc})") from exc
    return obs, skipped


class LayerSet:
    """Lookup of raster layers keyed by (variable, time slice).

    Static variables are stored once under the static slice and answer
    for every requested month.
    """

    def __init__(self):
        self._layers = {}

    def add(self, layer: RasterLayer) -> None:
        if not layer.variable:
            raise ValidationError("layer must carry a variable name")
        key = (layer.variable, layer.temporal)
        if key in self._layers:
            raise ValidationError(f"duplicate layer for {key}")
        self._layers[key] = layer

    def get(self, variable: str, temporal: Temporal) -> Optional[RasterLayer]:
        if variable in STATIC_NAMES:
            temporal = Temporal.static()
        return self._layers.get((variable, temporal))

    def require(self, variable: str, temporal: Temporal) -> RasterLayer:
        layer = self.get(variable, temporal)
        if layer is None:
            raise ValidationError(f"no raster for {variable!r} at {temporal.key()}")
        return layer

    def variables(self) -> tuple:
        present = {v for v, _t in self._layers}
        catalog = [n for n in INPUT_NAMES if n in present]
        extra = sorted(present - set(INPUT_NAMES))
        return tuple(catalog + extra)

    def __len__(self) -> int:
        return len(self._layers)


def extract_features(stations, layers: LayerSet, months, variables=None) -> TrainingTable:
    """One row per (station, month), station-major, in input order.

    A station landing on a nodata cell or outside a layer's bounds gets a
    missing value for that feature; the row itself always exists.
    """
    names = tuple(variables) if variables is not None else layers.variables()
    months = [m if isinstance(m, Temporal) else Temporal.of_month(*m) for m in months]
    for m in months:
        if not (m.year > 0 and m.month > 0):
            raise ValidationError(f"extract_features needs monthly slices, got {m.key()}")
        for name in names:
            layers.require(name, m)

    n = len(stations) * len(months)
    sids, years, mons = [], [], []
    feats = np.full((n, len(names)), np.nan)
    i = 0
    for st in stations:
        for m in months:
            sids.append(st.id)
            years.append(m.year)
            mons.append(m.month)
            for j, name in enumerate(names):
                layer = layers.require(name, m)
                try:
                    feats[i, j] = layer.sample(st.lon, st.lat)
                except OutsideBoundsError:
                    pass  # row kept, feature stays missing
            i += 1
    return TrainingTable(
        feature_names=names,
        station_ids=tuple(sids),
        years=np.array(years, dtype=np.int64),
        months=np.array(mons, dtype=np.int64),
        features=feats,
        targets=np.full(n, np.nan),
    )


def join_targets(table: TrainingTable, observations, pollutant: Optional[str] = None) -> TrainingTable:
    """Attach observed concentrations by (station, year, month).

    Rows without a matching observation keep a missing target. Feature
    values are never touched.
    """
    lookup = {}
    for o in observations:
        if pollutant is not None and o.pollutant != pollutant:
            continue
        key = (o.station_id, o.year, o.month)
        if key in lookup:
            raise ValidationError(f"duplicate observation for {key}")
        lookup[key] = o.concentration

    targets = np.full(len(table), np.nan)
    for i in range(len(table)):
        key = (table.station_ids[i], int(table.years[i]), int(table.months[i]))
        if key in lookup:
            targets[i] = lookup[key]
    return replace(table, targets=targets)


def clean(table: TrainingTable):
    """Drop rows with any missing feature or target; returns (table, removed)."""
    bad = np.isnan(table.targets) | np.isnan(table.features).any(axis=1)
    removed = int(bad.sum())
    if removed == len(table):
        raise DataError("no complete rows remain after cleaning")
    kept = table.subset(np.flatnonzero(~bad))
    return kept, removed


def train_test_split(table: TrainingTable, train_fraction: float = 0.7, seed: int = 0):
    """Seeded uniform shuffle; train size = round-half-up(train_fraction * n)."""
    n = len(table)
    if n < 2:
        raise DataError(f"need at least 2 rows to split, have {n}")
    if not (0.0 < train_fraction < 1.0):
        raise ValidationError(f"train_fraction must be in (0, 1): {train_fraction}")
    n_train = train_size(n, train_fraction)
    perm = np.random.default_rng(seed).permutation(n)
    return table.subset(perm[:n_train]), table.subset(perm[n_train:])


def train_size(n: int, train_fraction: float = 0.7) -> int:
    # round-half-up with an epsilon so 0.7*15 (stored as 10.499999...)
    # still rounds to 11 like exact decimal arithmetic would
    return int(math.floor(train_fraction * n + 0.5 + 1e-9))
