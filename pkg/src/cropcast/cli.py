"""Command-line entry point.

Subcommands: ingest, eda, evaluate, forecast, optimize, run (full
pipeline), serve. Config comes from one JSON file; flags override config
values, and $CROPCAST_OUTPUT_DIR overrides the configured output dir.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import evaluate as ev
from .exceptions import CropcastError
from .ingest import (
    aggregate_weekly,
    build_price_series,
    parse_raw_csv,
    read_series_csv,
    write_series_csv,
)
from .pipeline import (
    PipelineConfig,
    analyze_crop,
    atomic_write_text,
    forecast_csv,
    load_series_for_crop,
    resolve_output_dir,
    run_pipeline,
    select_catalog,
)
from .portfolio import forecast_to_price, load_scenario, solve_portfolio
from .series import adf_stationarity


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline config JSON file")
    parser.add_argument("--data-dir", dest="data_dir")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--crops", help="comma-separated crop names")
    parser.add_argument("--year-start", type=int, dest="year_start")
    parser.add_argument("--year-end", type=int, dest="year_end")
    parser.add_argument("--test-fraction", type=float, dest="test_fraction")
    parser.add_argument("--cv-folds", type=int, dest="cv_folds")
    parser.add_argument("--seasonal-period", type=int, dest="seasonal_period")
    parser.add_argument("--horizon", type=int, dest="horizon_weeks")
    parser.add_argument("--scenario", help="portfolio scenario JSON file")
    parser.add_argument(
        "--synthetic",
        action="store_true",
        default=None,
        help="generate seeded synthetic series for crops with no data files",
    )
    parser.add_argument("--seed", type=int, help="seed for synthetic data generation")


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "data_dir",
            "output_dir",
            "test_fraction",
            "cv_folds",
            "seasonal_period",
            "horizon_weeks",
            "scenario",
            "synthetic",
            "seed",
        )
    }
    if getattr(args, "crops", None):
        overrides["crops"] = tuple(c.strip() for c in args.crops.split(",") if c.strip())
    if getattr(args, "year_start", None) is not None or getattr(args, "year_end", None) is not None:
        if args.year_start is None or args.year_end is None:
            raise CropcastError("--year-start and --year-end must be given together")
        overrides["year_range"] = (args.year_start, args.year_end)
    if args.config:
        config = PipelineConfig.load(args.config, overrides)
    else:
        config = PipelineConfig.from_dict({}, overrides)
    return resolve_output_dir(config, getattr(args, "output_dir", None))


def _column_map(value: str) -> dict:
    if value.startswith("@"):
        with open(value[1:]) as fh:
            return json.load(fh)
    return json.loads(value)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(Path(out), text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.raw) as fh:
        result = parse_raw_csv(fh, _column_map(args.column_map))
    for line, reason in result.skipped_rows:
        print(f"skipped line {line}: {reason}", file=sys.stderr)
    summaries = aggregate_weekly(result.records, args.crop)
    series = build_price_series(
        summaries, args.crop, (args.year_start, args.year_end), args.gap_policy
    )
    write_series_csv(series, args.out)
    print(
        f"{args.crop}: {len(series)} weeks "
        f"({series.dates[0]} .. {series.dates[-1]}), "
        f"{result.skip_count} rows skipped, {result.absent_prices} absent prices",
        file=sys.stderr,
    )
    return 0


def cmd_eda(args: argparse.Namespace) -> int:
    series = read_series_csv(args.series, args.crop)
    report = adf_stationarity(series.values, args.max_lag)
    _write_or_print(report.to_json(), args.out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    series, _ = load_series_for_crop(args.crop, config)
    catalog = select_catalog(series, config)
    board = ev.evaluate_all(series, catalog, config.test_fraction)
    _write_or_print(board.to_csv() if args.format == "csv" else board.to_json(), args.out)
    return 0


def cmd_forecast(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    series, _ = load_series_for_crop(args.crop, config)
    analysis = analyze_crop(series, config)
    if args.format == "json":
        doc = {
            "crop": args.crop,
            "champion": analysis.champion_spec.as_dict(),
            "points": [
                {"week_date": d.isoformat(), "price_inr": v}
                for d, v in analysis.forecast.points
            ],
        }
        _write_or_print(json.dumps(doc, indent=2), args.out)
    else:
        _write_or_print(forecast_csv(analysis.forecast), args.out)
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    scenario_path = args.scenario or config.scenario
    if not scenario_path:
        raise CropcastError("optimize requires --scenario (or scenario in the config)")
    with open(scenario_path) as fh:
        doc = json.load(fh)
    missing = [
        c["name"] for c in doc.get("crops", [])
        if c.get("forecast_price_per_kg_inr") is None
    ]
    prices: dict[str, float] = {}
    for crop in missing:
        series, _ = load_series_for_crop(crop, config)
        analysis = analyze_crop(series, config)
        prices[crop] = forecast_to_price(
            analysis.forecast.values, config.price_method, config.sale_week
        )
    scenario = load_scenario(scenario_path, prices)
    solution = solve_portfolio(scenario)
    _write_or_print(solution.to_json(), args.out)
    return 0 if solution.status == "optimal" else 1


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_pipeline(config)
    for path in result.artifacts:
        print(path)
    if result.errors:
        print("stage failures:", file=sys.stderr)
        for crop, stage, message in result.errors:
            print(f"  {crop}/{stage}: {message}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        data_dir=args.data_dir,
        economics_path=args.economics,
        seasonal_period=args.seasonal_period or 52,
        cv_folds=args.cv_folds or 4,
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cropcast",
        description="Forecast weekly crop prices and solve the planting portfolio LP.",
    )
    parser.add_argument("--version", action="version", version=f"cropcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="aggregate a raw export into a canonical series")
    p.add_argument("--raw", required=True, help="raw export CSV")
    p.add_argument("--crop", required=True)
    p.add_argument(
        "--column-map",
        required=True,
        help="JSON mapping of column name to role, or @file.json",
    )
    p.add_argument("--year-start", type=int, required=True)
    p.add_argument("--year-end", type=int, required=True)
    p.add_argument(
        "--gap-policy", choices=["interpolate", "drop_leading_trailing"],
        default="interpolate",
    )
    p.add_argument("--out", required=True, help="canonical series CSV to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eda", help="stationarity diagnostics for a series")
    p.add_argument("--series", required=True, help="canonical series CSV")
    p.add_argument("--crop", required=True)
    p.add_argument("--max-lag", type=int, dest="max_lag")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eda)

    p = sub.add_parser("evaluate", help="model leaderboard for one crop")
    _add_config_options(p)
    p.add_argument("--crop", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("forecast", help="champion-model forecast for one crop")
    _add_config_options(p)
    p.add_argument("--crop", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser(
        "optimize",
        help="solve a portfolio scenario "
        "(missing forecast prices are champion-filled)",
    )
    _add_config_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("run", help="full pipeline over all configured crops")
    _add_config_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--economics", help="economics defaults JSON")
    p.add_argument("--seasonal-period", type=int, dest="seasonal_period")
    p.add_argument("--cv-folds", type=int, dest="cv_folds")
    p.add_argument("--ui-dir", dest="ui_dir", help="static web UI directory to serve")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CropcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
