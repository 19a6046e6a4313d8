"""Service configuration: YAML file plus AQGRID_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml

from aqgrid.errors import ValidationError

ENV_PREFIX = "AQGRID_"


@dataclass(frozen=True)
class ServiceConfig:
    catalog_path: Path
    store_dir: Path
    port: int = 8765
    workers: int = 2
    spacing_m: float = 3000.0

    def __post_init__(self):
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if not (0 < self.port < 65536):
            raise ValidationError(f"port out of range: {self.port}")
        if self.spacing_m <= 0:
            raise ValidationError(f"spacing_m must be positive: {self.spacing_m}")


def load_config(path: Optional[str] = None, env: Optional[dict] = None) -> ServiceConfig:
    """Read the YAML config, then let AQGRID_CATALOG / AQGRID_STORE /
    AQGRID_PORT / AQGRID_WORKERS / AQGRID_SPACING_M override it.

    Relative paths in the file resolve against the file's directory;
    relative paths from the environment resolve against the working
    directory.
    """
    env = os.environ if env is None else env
    raw = {}
    base = Path.cwd()
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read config {p}: {exc}") from exc
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ValidationError(f"{p}: invalid YAML ({exc})") from exc
        if not isinstance(raw, dict):
            raise ValidationError(f"{p}: config must be a mapping")
        base = p.parent

    def _path_of(key: str, default=None) -> Optional[Path]:
        env_val = env.get(ENV_PREFIX + key.upper())
        if env_val:
            return Path(env_val)
        if key in raw and raw[key] is not None:
            return (base / str(raw[key])).resolve()
        return default

    catalog = _path_of("catalog")
    if catalog is None:
        raise ValidationError(
            "no catalog configured (set 'catalog' in the config file or AQGRID_CATALOG)"
        )
    store = _path_of("store", default=(base / "store").resolve())

    def _num(key: str, default, cast):
        env_val = env.get(ENV_PREFIX + key.upper())
        src = env_val if env_val not in (None, "") else raw.get(key, default)
        try:
            return cast(src)
        except (TypeError, ValueError):
            raise ValidationError(f"config {key} must be a number, got {src!r}") from None

    return ServiceConfig(
        catalog_path=catalog,
        store_dir=store,
        port=_num("port", 8765, int),
        workers=_num("workers", 2, int),
        spacing_m=_num("spacing_m", 3000.0, float),
    )
