"""Command-line front door for the pipeline.

Every subcommand supports --json for machine-readable output. Exit codes:
0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from aqgrid.dataset import TrainingTable
from aqgrid.errors import AqgridError, DataError, ValidationError
from aqgrid.fixture import generate_fixture
from aqgrid.jsonutil import canonical_dumps, dump_canonical, load_json
from aqgrid.models.metrics import MetricsReport
from aqgrid.models.serialize import load_model, save_model
from aqgrid.models.train import MODEL_KINDS, ModelKind
from aqgrid.pipeline import (
    build_dataset,
    load_raster_dir,
    run_surface,
    run_training,
    select_factors,
    yearly_composites,
)
from aqgrid.raster.io import read_raster, write_raster
from aqgrid.raster.layer import Temporal
from aqgrid.raster.variables import INPUT_NAMES, STATIC_NAMES
from aqgrid.surface import export_surface, load_study_area, make_legend

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_COMPOSITE_SUFFIXES = (".tif", ".tiff", ".asc", ".txt")


class UsageError(Exception):
    """Bad invocation: wrong flags, unknown enum values, malformed lists."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; route through our own code
    def error(self, message):
        raise UsageError(message)


def _emit(args, payload: dict, text_lines):
    if args.json:
        print(canonical_dumps(payload))
    else:
        for line in text_lines:
            print(line)


def _parse_factors(raw: str):
    names = [part.strip() for part in raw.split(",") if part.strip()]
    if not names:
        raise UsageError("--factors must name at least one variable")
    return names


# ----------------------------------------------------------------- commands

def cmd_make_fixture(args) -> int:
    manifest = generate_fixture(args.out, seed=args.seed)
    _emit(args, {
        "out": str(args.out),
        "seed": args.seed,
        "city": manifest["city"],
        "stations": manifest["stations"],
        "n_rows": manifest["n_rows"],
    }, [
        f"fixture written to {args.out}",
        f"  city: {manifest['city']}  stations: {len(manifest['stations'])}"
        f"  rows: {manifest['n_rows']}",
    ])
    return EXIT_OK


def cmd_build_dataset(args) -> int:
    table, report = build_dataset(
        args.stations, args.rasters, args.ground_truth,
        year=args.year, pollutant=args.pollutant,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out)
    payload = {"out": str(out), "city": args.city, **report}
    _emit(args, payload, [
        f"dataset written to {out}",
        f"  stations: {report['stations']}  rows written: {report['rows_written']}"
        f"  rows removed: {report['rows_removed']}",
    ])
    return EXIT_OK


def cmd_train(args) -> int:
    try:
        kind = ModelKind.parse(args.model)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None

    table = TrainingTable.from_csv(args.dataset)
    if args.factors:
        table = select_factors(table, _parse_factors(args.factors))

    grid = None
    use_default = False
    if args.grid == "default":
        use_default = True
    elif args.grid is not None:
        grid = load_json(args.grid)
        if not isinstance(grid, dict):
            raise DataError(f"{args.grid}: hyperparameter grid must be a JSON object")

    model, metrics, search, info = run_training(
        table, kind, seed=args.seed, grid=grid, use_default_grid=use_default,
        train_fraction=args.train_fraction,
    )
    save_model(model, args.model_out)
    dump_canonical(metrics.to_dict(), args.metrics_out)

    mape = "n/a" if metrics.mape is None else f"{metrics.mape:.4f}"
    payload = {
        "model_out": str(args.model_out),
        "metrics_out": str(args.metrics_out),
        "metrics": metrics.to_dict(),
        "grid_search": None if search is None else search.to_dict(),
        **info,
    }
    _emit(args, payload, [
        f"trained {info['kind']} on {info['train_rows']} rows"
        f" (test: {info['test_rows']} rows, seed {info['seed']})",
        f"  r2:   {metrics.r2:.4f}",
        f"  mae:  {metrics.mae:.4f}",
        f"  mse:  {metrics.mse:.4f}",
        f"  rmse: {metrics.rmse:.4f}",
        f"  mape: {mape}",
        f"model -> {args.model_out}",
        f"metrics -> {args.metrics_out}",
    ])
    return EXIT_OK


def cmd_composite(args) -> int:
    variables = _parse_factors(args.variables) if args.variables else list(INPUT_NAMES)
    months = [Temporal.of_month(args.year, m) for m in range(1, 13)]
    layers = load_raster_dir(args.rasters, variables, months)
    composites = yearly_composites(layers, variables, args.year)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = ".asc" if args.format == "ascii_grid" else ".tif"
    written = {}
    for name, layer in composites.items():
        path = out / f"{name}{ext}"
        write_raster(layer, path)
        written[name] = str(path)
    _emit(args, {"out": str(out), "year": args.year, "files": written}, [
        f"{len(written)} composites for {args.year} written to {out}",
    ])
    return EXIT_OK


def _load_composites(comp_dir: Path, feature_names):
    """One composite raster per model feature, <dir>/<variable>.<ext>."""
    if not comp_dir.is_dir():
        raise DataError(f"composites directory not found: {comp_dir}")
    composites = {}
    for name in feature_names:
        found = None
        for suffix in _COMPOSITE_SUFFIXES:
            candidate = comp_dir / f"{name}{suffix}"
            if candidate.is_file():
                found = candidate
                break
        if found is None:
            raise DataError(
                f"composite raster for model variable {name!r} not found in {comp_dir}"
            )
        composites[name] = read_raster(found, variable=name)
    return composites


def cmd_predict_grid(args) -> int:
    if args.format not in ("geojson", "csv"):
        raise UsageError(f"--format must be geojson or csv, got {args.format!r}")
    if args.legend not in ("dynamic", "fixed"):
        raise UsageError(f"--legend must be dynamic or fixed, got {args.legend!r}")

    model = load_model(args.model)
    area = load_study_area(args.area)
    composites = _load_composites(Path(args.composites), model.feature_names)
    try:
        surface = run_surface(
            model, area, composites, scenario_id=args.scenario_id,
            pollutant=args.pollutant, spacing_m=args.spacing_m,
        )
    except ValidationError as exc:
        # a model/composite mismatch is a data problem, not a usage problem
        raise DataError(str(exc)) from None
    legend = make_legend(surface, mode=args.legend,
                         fixed_min=args.min, fixed_max=args.max)
    export_surface(surface, args.out, format=args.format, legend=legend)
    n_present = len(surface.present_values())
    payload = {
        "out": str(args.out),
        "format": args.format,
        "points": len(surface.values),
        "predicted": n_present,
        "nx": surface.nx,
        "ny": surface.ny,
    }
    _emit(args, payload, [
        f"surface written to {args.out}",
        f"  lattice: {surface.nx} x {surface.ny} = {len(surface.values)} points"
        f" ({n_present} predicted)",
    ])
    return EXIT_OK


def cmd_serve(args) -> int:
    from aqgrid.service.app import create_app
    from aqgrid.service.config import load_config

    config_path = Path(args.config)
    if not config_path.is_file():
        raise UsageError(f"config file not found: {config_path}")
    config = load_config(config_path)
    app = create_app(config, static_dir=args.static)
    if args.json:
        print(canonical_dumps({
            "catalog": str(config.catalog_path),
            "store": str(config.store_dir),
            "port": config.port,
            "workers": config.workers,
        }))
    else:
        print(f"serving catalog {config.catalog_path} on port {config.port}")

    import uvicorn
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return EXIT_OK


# -------------------------------------------------------------------- wiring

def build_parser() -> _Parser:
    parser = _Parser(prog="aqgrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true",
                       help="print a machine-readable summary")
        return p

    p = add("make-fixture", cmd_make_fixture,
            "generate a small synthetic city dataset for testing")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)

    p = add("build-dataset", cmd_build_dataset,
            "join station observations with raster features into a training CSV")
    p.add_argument("--city", required=True, help="city id (labeling only)")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--pollutant", required=True)
    p.add_argument("--stations", required=True, help="stations CSV")
    p.add_argument("--rasters", required=True, help="raster directory")
    p.add_argument("--ground-truth", required=True, help="observations CSV")
    p.add_argument("--out", required=True, help="output dataset CSV")

    p = add("train", cmd_train, "train and evaluate one model on a dataset CSV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True,
                   help=f"one of: {', '.join(MODEL_KINDS)}")
    p.add_argument("--factors", default=None,
                   help="comma-separated feature subset (default: all columns)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default=None,
                   help="JSON file with a hyperparameter grid, or 'default'")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--model-out", default="model.json")
    p.add_argument("--metrics-out", default="metrics.json")

    p = add("composite", cmd_composite,
            "collapse monthly rasters to one yearly composite per variable")
    p.add_argument("--rasters", required=True, help="raster directory")
    p.add_argument("--variables", default=None,
                   help="comma-separated variables (default: all)")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("ascii_grid", "geotiff"),
                   default="ascii_grid")

    p = add("predict-grid", cmd_predict_grid,
            "predict a surface over a study area from composite rasters")
    p.add_argument("--model", required=True, help="trained model JSON")
    p.add_argument("--area", required=True, help="study-area JSON")
    p.add_argument("--composites", required=True,
                   help="directory of per-variable composite rasters")
    p.add_argument("--out", required=True)
    p.add_argument("--format", default="geojson", help="geojson or csv")
    p.add_argument("--legend", default="dynamic", help="dynamic or fixed")
    p.add_argument("--min", type=float, default=None, help="fixed legend minimum")
    p.add_argument("--max", type=float, default=None, help="fixed legend maximum")
    p.add_argument("--spacing-m", type=float, default=3000.0)
    p.add_argument("--pollutant", default="no2")
    p.add_argument("--scenario-id", default="cli")

    p = add("serve", cmd_serve, "launch the scenario service")
    p.add_argument("--config", required=True, help="service config YAML")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None,
                   help="directory of UI assets to serve at /")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:  # includes ValidationError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AqgridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
