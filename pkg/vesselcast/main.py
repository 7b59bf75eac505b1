"""
Command-line frontend.

One ``vesselcast`` command with subcommands for every pipeline stage.
Exit codes: 0 success, 2 configuration, 3 I/O, 4 insufficient data,
5 model or schema.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from vesselcast.config import (
    ColumnMapping,
    GbdtParams,
    HorizonSet,
    PrepConfig,
    Settings,
    SplitConfig,
    load_config,
    resolve_columns,
)
from vesselcast.errors import ConfigError, VesselcastError
from vesselcast.monitoring import MetricsCollector, configure_logging
from vesselcast.synthetic import FleetSpec
from vesselcast.workflow import TrajectoryWorkflow, write_synthetic_fleet

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("preprocess", "train", "predict", "evaluate", "bench", "grid", "synth")


# ============================================================================
# Argument parsing
# ============================================================================

def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="Path to config.yaml")
    g.add_argument("--log-level", help="Override monitoring.log_level")
    g.add_argument("--json-logs", action="store_true", help="Structured JSON logs on stderr")

    g = p.add_argument_group("input columns")
    g.add_argument("--preset", help="Dataset column preset (e.g. brest, piraeus)")
    g.add_argument("--col-id")
    g.add_argument("--col-ts")
    g.add_argument("--col-lon")
    g.add_argument("--col-lat")
    g.add_argument("--col-type")
    g.add_argument("--start", type=int, help="Ignore reports before this unix time")
    g.add_argument("--end", type=int, help="Ignore reports at or after this unix time")
    g.add_argument("--pois", help="POI CSV (poi_id,lon,lat[,name])")
    g.add_argument("--vessel-types", help="Vessel-type CSV (vessel_id,vessel_type)")

    g = p.add_argument_group("preprocessing")
    g.add_argument("--rate", type=int, help="Resampling interval (s)")
    g.add_argument("--smin", type=float, help="Stationary speed threshold (kt)")
    g.add_argument("--smax", type=float, help="Outlier speed threshold (kt)")
    g.add_argument("--gap", type=int, help="Gap that splits a trip (s)")
    g.add_argument("--minlen", type=int, help="Minimum raw points per trip")
    g.add_argument("--dmin", type=float, help="Origin POI distance (m)")
    g.add_argument("--horizons", type=_int_list, help="Comma-separated minutes")

    g = p.add_argument_group("boosting")
    g.add_argument("--depth", type=int)
    g.add_argument("--lr", type=float)
    g.add_argument("--rounds", type=int)
    g.add_argument("--bins", type=int)
    g.add_argument("--lambda", dest="lambda_", type=float)
    g.add_argument("--train-fraction", type=float)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="vesselcast",
        description="AIS trajectory cleaning and vessel position prediction",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("preprocess", parents=[common], help="Clean raw AIS into a trips file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stats-json", help="Write the stage accounting as JSON")

    p = sub.add_parser("train", parents=[common], help="Fit a model on trips or raw AIS")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, help="Model file to write")
    p.add_argument("--dump-matrix", help="Write the training feature matrix as CSV")

    p = sub.add_parser("predict", parents=[common], help="Predict future positions")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="Per-horizon error report")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", help="Evaluate this model on the whole input")
    p.add_argument("--predictions", help="Score a predictions CSV against the input")
    p.add_argument("--dataset", default="", help="Dataset name for the report")

    p = sub.add_parser("bench", parents=[common], help="Throughput and latency benchmark")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-sizes", type=_int_list)
    p.add_argument("--dataset", default="")

    p = sub.add_parser("grid", parents=[common], help="One-axis hyperparameter sweep")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--axis", required=True, help="rate, lr, depth or rounds")
    p.add_argument("--values", type=_float_list, help="Comma-separated candidates")
    p.add_argument("--parallel", action="store_true", help="Run candidates concurrently (no timings)")

    p = sub.add_parser("synth", parents=[common], help="Generate a synthetic AIS fleet")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--vessels", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter", type=float, default=0.0, help="Relative speed jitter")
    p.add_argument("--faults", action="store_true", help="Inject duplicates, spikes, stops and gaps")
    return parser


# ============================================================================
# Flag overrides
# ============================================================================

def _override(section: BaseModel, values: Dict[str, Any]) -> BaseModel:
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return section
    try:
        return type(section).model_validate({**section.model_dump(), **values})
    except ValidationError as e:
        raise ConfigError(f"invalid flag value: {e}") from e


def apply_overrides(settings: Settings, args: argparse.Namespace) -> Settings:
    """Fold command-line flags into the settings and re-validate each section."""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    prep: PrepConfig = _override(settings.prep, {
        "rate": get("rate"), "s_min": get("smin"), "s_max": get("smax"),
        "gap_max": get("gap"), "length_min": get("minlen"), "d_min": get("dmin"),
    })
    gbdt: GbdtParams = _override(settings.gbdt, {
        "max_depth": get("depth"), "learning_rate": get("lr"), "n_estimators": get("rounds"),
        "n_bins": get("bins"), "lambda_": get("lambda_"),
    })
    horizons: HorizonSet = _override(settings.horizons, {"horizons": get("horizons")})
    split: SplitConfig = _override(settings.split, {"train_fraction": get("train_fraction")})
    bench = _override(settings.bench, {"batch_sizes": get("batch_sizes")})
    monitoring = settings.monitoring
    if get("log_level") or get("json_logs"):
        monitoring = monitoring.model_copy(update={
            "log_level": get("log_level") or monitoring.log_level,
            "structured_logging": bool(get("json_logs")) or monitoring.structured_logging,
        })
    return settings.model_copy(update={
        "prep": prep, "gbdt": gbdt, "horizons": horizons, "split": split,
        "bench": bench, "monitoring": monitoring,
    })


def resolve_column_flags(settings: Settings, args: argparse.Namespace) -> ColumnMapping:
    columns = resolve_columns(settings, args.preset)
    return _override(columns, {
        "vessel_id": args.col_id, "timestamp": args.col_ts,
        "lon": args.col_lon, "lat": args.col_lat, "vessel_type": args.col_type,
    })


# ============================================================================
# Subcommands
# ============================================================================

def _rule(title: str) -> None:
    print("=" * 60)
    print(f"  {title}")
    print("=" * 60)


def cmd_preprocess(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    outcome = wf.preprocess(args.input, args.out, args.start, args.end, args.stats_json)
    stats, ds = outcome.stats, outcome.dataset
    _rule("Preprocessing")
    print(f"  Records in:        {stats.records_in}")
    for stage, count in stats.dropped.items():
        print(f"  Dropped {stage + ':':<11}{count}")
    print(f"  Retained points:   {stats.retained_points}")
    print(f"  Vessels / trips:   {ds.vessels} / {ds.trips}")
    for h, n in ds.points_per_horizon.items():
        print(f"  Points @ {h:>3} min:  {n}")
    if ds.trips == 0:
        print("  WARNING: no trips survived preprocessing")
    return 0


def cmd_train(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    outcome = wf.train(args.input, args.model, args.start, args.end, args.dump_matrix)
    _rule("Training")
    print(f"  Examples:          {outcome.n_examples}")
    print(f"  Training (s):      {outcome.training_s:.2f}")
    if outcome.inference_us is not None:
        print(f"  Inference (us):    {outcome.inference_us:.2f} per record")
    print(f"  Model:             {args.model}")
    return 0


def cmd_predict(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    rows = wf.predict(args.model, args.input, args.out, args.horizons, args.start, args.end)
    print(f"Wrote {rows} predictions to {args.out}")
    return 0


def cmd_evaluate(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    report, baseline, holdout = wf.evaluate(
        args.input, args.out, args.model, args.predictions, args.dataset,
        args.horizons, args.start, args.end,
    )
    _rule("Evaluation")
    if holdout is not None:
        total = holdout.n_train + holdout.n_test
        print(
            f"  Split: {holdout.n_train} train ({holdout.n_train / total:.0%}) / "
            f"{holdout.n_test} test ({holdout.n_test / total:.0%})"
        )
        print(f"  Training (s): {holdout.training_s:.2f}")
    print(f"  {'horizon':>8} {'count':>8} {'mean_m':>10} {'std_m':>10} {'baseline_m':>11}")
    for row in report:
        base = baseline.row(row.horizon_min).mean_m
        fmt = lambda v: "" if v is None else f"{v:.1f}"  # noqa: E731
        print(f"  {row.horizon_min:>8} {row.count:>8} {fmt(row.mean_m):>10} {fmt(row.std_m):>10} {fmt(base):>11}")
    return 0


def cmd_bench(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    reports = wf.bench(args.input, args.model, args.out, args.dataset, args.start, args.end)
    _rule(f"Benchmark ({reports[0].hardware if reports else ''})")
    for r in reports:
        print(
            f"  batch {r.batch_size:>7}: preprocess {r.preprocess_us_per_record:8.2f} us, "
            f"inference {r.inference_us_per_record:8.2f} us, {r.throughput_s_per_batch:.3f} s/batch"
        )
    return 0


def cmd_grid(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    rows = wf.grid(args.input, args.out, args.axis, args.values, args.parallel or None, args.start, args.end)
    failed = [r for r in rows if not r.ok]
    print(f"Wrote {len(rows)} grid rows to {args.out} ({len(failed)} failed)")
    return 0


def cmd_synth(wf: TrajectoryWorkflow, args: argparse.Namespace) -> int:
    faults = dict(duplicate_rate=0.01, spike_rate=0.005, stop_probability=0.3, gap_probability=0.3) if args.faults else {}
    try:
        spec = FleetSpec(n_vessels=args.vessels, speed_jitter=args.jitter, **faults)
    except ValidationError as e:
        raise ConfigError(f"invalid fleet: {e}") from e
    paths = write_synthetic_fleet(args.out, spec, args.seed, wf.columns)
    for name, path in paths.items():
        print(f"Wrote {name}: {path}")
    return 0


HANDLERS = {
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "grid": cmd_grid,
    "synth": cmd_synth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = apply_overrides(load_config(args.config), args)
        configure_logging(settings.monitoring.log_level, settings.monitoring.structured_logging)
        columns = resolve_column_flags(settings, args)
        workflow = TrajectoryWorkflow(settings, columns)
        MetricsCollector().initialize(settings)
        if args.command != "synth":
            workflow.load_context(args.pois, args.vessel_types)
        return HANDLERS[args.command](workflow, args)
    except VesselcastError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130


if __name__ == "__main__":
    sys.exit(main())
