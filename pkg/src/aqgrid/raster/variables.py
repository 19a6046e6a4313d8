"""Catalog of the driving-factor variables and the pollutant target."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from aqgrid.errors import ValidationError


class Cadence(enum.Enum):
    STATIC = "static"
    MONTHLY = "monthly"
    DAILY = "daily"


@dataclass(frozen=True)
class Variable:
    name: str
    unit: str
    cadence: Cadence

    @property
    def is_static(self) -> bool:
        return self.cadence is Cadence.STATIC


# The seven driving factors feeding the regression models. The satellite
# column density arrives daily and is aggregated to monthly before it
# enters a dataset; "daily" only records the source product's cadence.
INPUT_VARIABLES = (
    Variable("no2_column", "mol/m2", Cadence.DAILY),
    Variable("precipitation", "mm/month", Cadence.MONTHLY),
    Variable("temperature", "K", Cadence.MONTHLY),
    Variable("wind_speed", "m/s", Cadence.MONTHLY),
    Variable("population", "persons/km2", Cadence.STATIC),
    Variable("elevation", "m", Cadence.STATIC),
    Variable("night_lights", "nW/cm2/sr", Cadence.MONTHLY),
)

# Targets are station measurements of a ground-level pollutant; the code
# (e.g. "no2") is data, but the unit is always mass per air volume.
GROUND_UNIT = "ug/m3"

INPUT_NAMES = tuple(v.name for v in INPUT_VARIABLES)
STATIC_NAMES = frozenset(v.name for v in INPUT_VARIABLES if v.is_static)

_BY_NAME = {v.name: v for v in INPUT_VARIABLES}


def get_variable(name: str) -> Variable:
    try:
        return _BY_NAME[name]
    except KeyError:
        known = ", ".join(sorted(_BY_NAME))
        raise ValidationError(f"unknown variable {name!r} (known: {known})") from None
