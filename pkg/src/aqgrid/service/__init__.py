from aqgrid.service.app import create_app
from aqgrid.service.catalog import Catalog, CatalogEntry, load_catalog
from aqgrid.service.config import ServiceConfig, load_config
from aqgrid.service.runner import (
    ScenarioConfig,
    ScenarioRunner,
    scenario_id,
    validate_config,
)

__all__ = [
    "Catalog",
    "CatalogEntry",
    "ScenarioConfig",
    "ScenarioRunner",
    "ServiceConfig",
    "create_app",
    "load_catalog",
    "load_config",
    "scenario_id",
    "validate_config",
]
