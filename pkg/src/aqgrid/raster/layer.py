"""In-memory raster layer: one variable on one grid at one time slice."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from aqgrid.errors import ValidationError
from aqgrid.raster.grid import GridSpec


@dataclass(frozen=True, order=True)
class Temporal:
    """Time slice of a layer: a (year, month), a year composite, or static.

    Ordering sorts static first (year 0), then chronologically.
    """

    year: int = 0
    month: int = 0  # 0 = whole year or static

    def __post_init__(self):
        if self.year == 0 and self.month != 0:
            raise ValidationError("static slice cannot carry a month")
        if not (0 <= self.month <= 12):
            raise ValidationError(f"month out of range: {self.month}")

    @classmethod
    def static(cls) -> "Temporal":
        return cls(0, 0)

    @classmethod
    def of_month(cls, year: int, month: int) -> "Temporal":
        if not (1 <= month <= 12):
            raise ValidationError(f"month out of range: {month}")
        return cls(year, month)

    @classmethod
    def of_year(cls, year: int) -> "Temporal":
        if year <= 0:
            raise ValidationError(f"year must be positive: {year}")
        return cls(year, 0)

    @property
    def is_static(self) -> bool:
        return self.year == 0

    @property
    def is_yearly(self) -> bool:
        return self.year > 0 and self.month == 0

    def key(self) -> str:
        if self.is_static:
            return "static"
        if self.month == 0:
            return f"{self.year:04d}"
        return f"{self.year:04d}-{self.month:02d}"

    @classmethod
    def parse(cls, s: str) -> "Temporal":
        if s == "static":
            return cls.static()
        parts = s.split("-")
        try:
            if len(parts) == 1:
                return cls.of_year(int(parts[0]))
            if len(parts) == 2:
                return cls.of_month(int(parts[0]), int(parts[1]))
        except ValueError:
            pass
        raise ValidationError(f"cannot parse time slice {s!r}")


@dataclass(frozen=True)
class RasterLayer:
    """A 2-D float64 array of values on a grid. Missing cells are NaN.

    Values are made read-only so layers can be shared freely.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    variable: str = ""
    temporal: Temporal = Temporal.static()

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != self.grid.shape:
            raise ValidationError(
                f"values shape {arr.shape} does not match grid {self.grid.shape}"
            )
        arr = arr.copy() if arr is self.values and arr.flags.writeable else np.array(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def nodata_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def valid_count(self) -> int:
        return int(np.count_nonzero(~self.nodata_mask))

    def sample(self, lon: float, lat: float) -> float:
        """Value of the nearest cell; NaN when that cell holds nodata."""
        r, c = self.grid.index_of(lon, lat)
        return float(self.values[r, c])

    def with_values(self, values: np.ndarray, variable: Optional[str] = None,
                    temporal: Optional[Temporal] = None) -> "RasterLayer":
        return RasterLayer(
            grid=self.grid,
            values=values,
            variable=self.variable if variable is None else variable,
            temporal=self.temporal if temporal is None else temporal,
        )
