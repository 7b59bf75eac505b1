"""
Pipeline orchestrator.

Coordinates ingestion, preprocessing, training, prediction, evaluation,
benchmarking and sweeps for the command-line frontend.
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import orjson

from vesselcast.bench import BenchReport, measure_inference_us, run_bench, write_bench_csv
from vesselcast.config import ColumnMapping, Settings, validate_config
from vesselcast.errors import ConfigError, InsufficientDataError
from vesselcast.evaluation import (
    GridRow,
    GridSpec,
    HoldoutResult,
    HorizonReport,
    evaluate,
    grid_search,
    normalize_axis,
    persistence_baseline,
    predictions_frame,
    read_predictions,
    score_predictions,
    train_and_evaluate,
    write_grid_csv,
)
from vesselcast.features import TrainingSet, build_inference_matrix, build_training_set, write_matrix
from vesselcast.gbdt import GbdtModel, fit, load_model, predict_positions, save_model
from vesselcast.ingest import (
    AisRecord,
    IngestStats,
    PoiIndex,
    filter_window,
    group_by_vessel,
    parse_ais_csv,
    parse_poi_csv,
    parse_vessel_types_csv,
)
from vesselcast.io_utils import atomic_output, read_header
from vesselcast.monitoring import MetricsCollector
from vesselcast.prep import (
    TRIPS_HEADER,
    DatasetStatistics,
    PrepStats,
    Trip,
    dataset_statistics,
    preprocess_fleet,
    read_trips,
    write_trips,
)
from vesselcast.synthetic import (
    FleetSpec,
    generate_fleet,
    vessel_type_table,
    write_ais_csv,
    write_poi_csv,
    write_vessel_types_csv,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class PrepOutcome:
    trips: List[Trip]
    stats: Optional[PrepStats]
    dataset: DatasetStatistics
    ingest: Optional[IngestStats] = None


@dataclass
class TrainOutcome:
    model: GbdtModel
    n_examples: int
    training_s: float
    inference_us: Optional[float]


def infer_rate(trips: Sequence[Trip]) -> Optional[int]:
    """Grid spacing of prepared trips (None when no trip has two points)."""
    for trip in trips:
        if len(trip) >= 2:
            return int(trip.timestamps[1] - trip.timestamps[0])
    return None


class TrajectoryWorkflow:
    """Runs the prediction pipeline over files with one validated configuration."""

    def __init__(self, settings: Settings, columns: Optional[ColumnMapping] = None):
        self.settings = settings
        self.columns = columns or settings.columns

        errors = validate_config(self.settings)
        if errors:
            for error in errors:
                logger.error(f"Configuration error: {error}")
            raise ConfigError(f"configuration validation failed: {'; '.join(errors)}")

        self.metrics = MetricsCollector()
        self.workers = settings.runtime.worker_count()
        self.poi_index: Optional[PoiIndex] = None
        self.vessel_types: Dict[str, int] = {}

    @property
    def horizons(self) -> List[int]:
        return list(self.settings.horizons.horizons)

    # ------------------------------------------------------------------
    # Inputs
    # ------------------------------------------------------------------

    def load_context(self, pois: Optional[PathLike] = None, vessel_types: Optional[PathLike] = None) -> None:
        if pois:
            self.poi_index = parse_poi_csv(pois)
            logger.info(f"Loaded {len(self.poi_index)} POIs")
        if vessel_types:
            self.vessel_types = parse_vessel_types_csv(vessel_types)
            logger.info(f"Loaded {len(self.vessel_types)} vessel types")

    def load_records(
        self,
        path: PathLike,
        start: Optional[int] = None,
        end: Optional[int] = None,
    ) -> Tuple[List[AisRecord], IngestStats]:
        stream, stats = parse_ais_csv(path, self.columns)
        if start is not None or end is not None:
            stream = filter_window(stream, start, end)
        records = list(stream)
        logger.info(
            f"Ingested {len(records)} records from {path} "
            f"({stats.rows_malformed} malformed, {stats.rows_out_of_range} out of range)"
        )
        return records, stats

    @staticmethod
    def is_trips_file(path: PathLike) -> bool:
        return read_header(path).strip().lstrip("\ufeff") == TRIPS_HEADER

    def preprocess_records(self, records: Sequence[AisRecord], rate: Optional[int] = None) -> Tuple[List[Trip], PrepStats]:
        prep = self.settings.prep
        if rate is not None and rate != prep.rate:
            prep = prep.model_copy(update={"rate": rate})
        return preprocess_fleet(group_by_vessel(records), self.poi_index, self.vessel_types, prep, self.workers)

    def load_trips(
        self,
        path: PathLike,
        start: Optional[int] = None,
        end: Optional[int] = None,
        rate: Optional[int] = None,
    ) -> Tuple[List[Trip], Optional[int]]:
        """Read a trips file, or preprocess a raw AIS file on the fly; returns (trips, grid rate)."""
        if self.is_trips_file(path):
            trips = read_trips(path)
            logger.info(f"Read {len(trips)} trips from {path}")
            return trips, infer_rate(trips)
        records, _ = self.load_records(path, start, end)
        trips, _ = self.preprocess_records(records, rate)
        return trips, rate or self.settings.prep.rate

    # ------------------------------------------------------------------
    # Subcommands
    # ------------------------------------------------------------------

    def preprocess(
        self,
        input_path: PathLike,
        out: PathLike,
        start: Optional[int] = None,
        end: Optional[int] = None,
        stats_json: Optional[PathLike] = None,
    ) -> PrepOutcome:
        records, ingest = self.load_records(input_path, start, end)
        trips, stats = self.preprocess_records(records)
        write_trips(trips, out)
        outcome = PrepOutcome(trips, stats, dataset_statistics(trips, self.horizons), ingest)
        if stats_json:
            summary = {
                "ingest": {
                    "rows_read": ingest.rows_read,
                    "rows_malformed": ingest.rows_malformed,
                    "rows_out_of_range": ingest.rows_out_of_range,
                },
                "prep": stats.to_dict(),
                "dataset": outcome.dataset.to_dict(),
            }
            with atomic_output(stats_json, "wb") as f:
                f.write(orjson.dumps(summary, option=orjson.OPT_INDENT_2))
        return outcome

    def build_examples(self, trips: Sequence[Trip], rate: Optional[int]) -> TrainingSet:
        examples = build_training_set(trips, self.horizons, rate=rate)
        if len(examples) == 0:
            raise InsufficientDataError("no training examples: trips are too short for the horizons")
        return examples

    def train(
        self,
        input_path: PathLike,
        model_out: PathLike,
        start: Optional[int] = None,
        end: Optional[int] = None,
        dump_matrix: Optional[PathLike] = None,
    ) -> TrainOutcome:
        trips, rate = self.load_trips(input_path, start, end)
        examples = self.build_examples(trips, rate)
        if dump_matrix:
            write_matrix(examples, dump_matrix)

        params = self.settings.gbdt
        if params.n_estimators == 0:
            logger.warning("Training with 0 rounds: the model predicts the mean delta")
        started = time.monotonic()
        model = fit(examples, params, workers=self.workers)
        training_s = time.monotonic() - started
        save_model(model, model_out)
        return TrainOutcome(model, len(examples), training_s, measure_inference_us(model, examples.X))

    def _model_horizons(self, model: GbdtModel, horizons: Optional[Sequence[int]]) -> List[int]:
        if horizons:
            return list(horizons)
        return list(model.horizons) or self.horizons

    def _check_rate(self, model: GbdtModel, rate: Optional[int]) -> None:
        if model.rate is not None and rate is not None and model.rate != rate:
            logger.warning(f"Model was trained at rate {model.rate}s but the input is at {rate}s")

    def predict(
        self,
        model_path: PathLike,
        input_path: PathLike,
        out: PathLike,
        horizons: Optional[Sequence[int]] = None,
        start: Optional[int] = None,
        end: Optional[int] = None,
    ) -> int:
        model = load_model(model_path)
        trips, rate = self.load_trips(input_path, start, end, rate=model.rate)
        self._check_rate(model, rate)
        batch = build_inference_matrix(trips, self._model_horizons(model, horizons), model.encoders)
        if len(batch):
            lon, lat = predict_positions(model, batch.X)
        else:
            lon = lat = np.empty(0)
        frame = predictions_frame(batch.vessel_ids, batch.timestamps, batch.horizons, lon, lat)
        with atomic_output(out) as f:
            frame.to_csv(f, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} predictions to {out}")
        return len(frame)

    def evaluate(
        self,
        input_path: PathLike,
        out: PathLike,
        model_path: Optional[PathLike] = None,
        predictions: Optional[PathLike] = None,
        dataset: str = "",
        horizons: Optional[Sequence[int]] = None,
        start: Optional[int] = None,
        end: Optional[int] = None,
    ) -> Tuple[HorizonReport, HorizonReport, Optional[HoldoutResult]]:
        """
        Write a per-horizon report in one of three modes.

        With ``predictions``: score a predictions file (oracle mode). With
        ``model_path``: score the model on the whole input (held-out file).
        Otherwise: chronological split, train, score the later part.

        Returns:
            (report, persistence baseline, holdout details in split mode)
        """
        model = load_model(model_path) if model_path else None
        trips, rate = self.load_trips(input_path, start, end, rate=model.rate if model else None)
        holdout = None

        if model is not None:
            self._check_rate(model, rate)
            hs = self._model_horizons(model, horizons)
            examples = build_training_set(trips, hs, encoders=model.encoders, rate=rate)
        else:
            hs = list(horizons) if horizons else self.horizons
            examples = build_training_set(trips, hs, rate=rate)
        if len(examples) == 0:
            raise InsufficientDataError("no test examples in the input")

        if predictions:
            report = score_predictions(examples, read_predictions(predictions), hs)
            baseline = persistence_baseline(examples, hs)
        elif model is not None:
            report = evaluate(model, examples, hs)
            baseline = persistence_baseline(examples, hs)
        else:
            holdout = train_and_evaluate(examples, self.settings.gbdt, self.settings.split, hs, self.workers)
            report, baseline = holdout.report, holdout.baseline

        report.write_csv(out, dataset)
        return report, baseline, holdout

    def bench(
        self,
        input_path: PathLike,
        model_path: PathLike,
        out: PathLike,
        dataset: str = "",
        start: Optional[int] = None,
        end: Optional[int] = None,
    ) -> List[BenchReport]:
        model = load_model(model_path)
        records, _ = self.load_records(input_path, start, end)
        prep = self.settings.prep
        if model.rate is not None and model.rate != prep.rate:
            prep = prep.model_copy(update={"rate": model.rate})
        reports = run_bench(
            records,
            model,
            prep,
            self._model_horizons(model, None),
            self.settings.bench,
            self.poi_index,
            self.vessel_types,
            workers=self.workers,
            dataset=dataset or Path(input_path).stem,
        )
        write_bench_csv(reports, out)
        return reports

    def grid(
        self,
        input_path: PathLike,
        out: PathLike,
        axis: str,
        values: Optional[Sequence[float]] = None,
        parallel: Optional[bool] = None,
        start: Optional[int] = None,
        end: Optional[int] = None,
    ) -> List[GridRow]:
        spec = GridSpec(axis=axis, values=list(values or []) or self._grid_defaults(axis), base=self.settings.gbdt)
        parallel = self.settings.grid.parallel if parallel is None else parallel

        trips = vessels = None
        if self.is_trips_file(input_path):
            trips = read_trips(input_path)
        else:
            records, _ = self.load_records(input_path, start, end)
            vessels = group_by_vessel(records)
            if spec.axis != "rate":
                trips, _ = preprocess_fleet(vessels, self.poi_index, self.vessel_types, self.settings.prep, self.workers)

        rows = grid_search(
            spec,
            trips=trips,
            vessels=vessels,
            poi_index=self.poi_index,
            vessel_types=self.vessel_types,
            prep=self.settings.prep,
            horizons=self.horizons,
            split=self.settings.split,
            workers=self.workers,
            parallel=parallel,
        )
        write_grid_csv(rows, self.horizons, out)
        return rows

    def _grid_defaults(self, axis: str) -> List[float]:
        canonical = normalize_axis(axis)
        values = self.settings.grid.candidates.get(canonical)
        if not values:
            raise ConfigError(f"no candidate values configured for grid axis {canonical}")
        return list(values)


def write_synthetic_fleet(
    out_dir: PathLike,
    spec: Optional[FleetSpec] = None,
    seed: int = 0,
    columns: Optional[ColumnMapping] = None,
) -> Dict[str, Path]:
    """Generate a fleet and write ais.csv, pois.csv and vessel_types.csv into ``out_dir``."""
    records, pois = generate_fleet(spec, seed)
    out = Path(out_dir)
    paths = {
        "ais": out / "ais.csv",
        "pois": out / "pois.csv",
        "vessel_types": out / "vessel_types.csv",
    }
    write_ais_csv(records, paths["ais"], columns)
    write_poi_csv(pois, paths["pois"])
    write_vessel_types_csv(vessel_type_table(records), paths["vessel_types"])
    return paths
