"""
Throughput and latency benchmark.

The first part of the input is processed untimed to warm caches and code
paths. Each batch size then takes the next B records in file order and
times preprocessing (cleaning plus feature extraction) and inference
separately. Per-record figures are medians over the repetitions.
"""

import logging
import platform
import statistics
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from vesselcast.config import BenchConfig, PrepConfig
from vesselcast.errors import InsufficientDataError
from vesselcast.features import InferenceBatch, build_inference_matrix
from vesselcast.gbdt import GbdtModel, predict_positions
from vesselcast.ingest import AisRecord, PoiIndex, group_by_vessel
from vesselcast.io_utils import atomic_output
from vesselcast.monitoring.metrics import MetricsCollector
from vesselcast.prep import preprocess_fleet

logger = logging.getLogger(__name__)

BENCH_COLUMNS = [
    "dataset",
    "hardware",
    "batch_size",
    "preprocess_us_per_record",
    "inference_us_per_record",
    "throughput_s_per_batch",
]


@dataclass
class BenchReport:
    """Timing of one batch size; throughput = (pre + inf) * batch_size / 1e6."""
    dataset: str
    hardware: str
    batch_size: int
    preprocess_us_per_record: float
    inference_us_per_record: float
    throughput_s_per_batch: float
    rows_predicted: int = 0


def hardware_tag() -> str:
    return f"{platform.machine() or 'unknown'}/{platform.processor() or platform.system() or 'unknown'}"


def median_seconds(fn: Callable[[], object], repetitions: int) -> Tuple[float, object]:
    """Median wall time of ``fn`` over the repetitions, plus its last result."""
    times = []
    result = None
    for _ in range(repetitions):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), result


def measure_inference_us(model: GbdtModel, X: np.ndarray, repetitions: int = 3) -> Optional[float]:
    """Median per-row inference time in microseconds (None for an empty matrix)."""
    if len(X) == 0:
        return None
    seconds, _ = median_seconds(lambda: predict_positions(model, X), repetitions)
    return seconds / len(X) * 1e6


class BenchRunner:
    """Runs the warm-up and the timed batches over one record stream."""

    def __init__(
        self,
        model: GbdtModel,
        prep: PrepConfig,
        horizons: Sequence[int],
        bench: BenchConfig,
        poi_index: Optional[PoiIndex] = None,
        vessel_types: Optional[Mapping[str, int]] = None,
        workers: int = 1,
        dataset: str = "",
    ):
        self.model = model
        self.prep = prep
        self.horizons = list(horizons)
        self.bench = bench
        self.poi_index = poi_index
        self.vessel_types = vessel_types
        self.workers = 1 if bench.single_worker else workers
        self.dataset = dataset
        self.hardware = hardware_tag()
        self.metrics = MetricsCollector()

    def preprocess(self, records: Sequence[AisRecord]) -> InferenceBatch:
        trips, _ = preprocess_fleet(
            group_by_vessel(records), self.poi_index, self.vessel_types, self.prep, self.workers,
        )
        return build_inference_matrix(trips, self.horizons, self.model.encoders)

    def infer(self, batch: InferenceBatch):
        return predict_positions(self.model, batch.X) if len(batch) else None

    def run(self, records: Sequence[AisRecord]) -> List[BenchReport]:
        """
        Benchmark every configured batch size.

        Raises:
            InsufficientDataError: fewer than twice the largest batch size records.
        """
        sizes = list(self.bench.batch_sizes)
        n = len(records)
        if n < 2 * max(sizes):
            raise InsufficientDataError(
                f"benchmark needs at least {2 * max(sizes)} records, got {n}"
            )

        warm = int(n * self.bench.warmup_fraction)
        logger.info(f"Warm-up on {warm} records")
        self.infer(self.preprocess(records[:warm]))

        reports = []
        for size in sizes:
            batch_records = records[warm:warm + size]
            pre_s, batch = median_seconds(lambda: self.preprocess(batch_records), self.bench.repetitions)
            inf_s, _ = median_seconds(lambda: self.infer(batch), self.bench.repetitions)

            pre_us = pre_s / size * 1e6
            inf_us = inf_s / size * 1e6
            self.metrics.record_inference(inf_us)
            reports.append(BenchReport(
                dataset=self.dataset,
                hardware=self.hardware,
                batch_size=size,
                preprocess_us_per_record=pre_us,
                inference_us_per_record=inf_us,
                throughput_s_per_batch=(pre_us + inf_us) * size / 1e6,
                rows_predicted=len(batch),
            ))
            logger.info(
                f"Batch {size}: preprocess {pre_us:.2f} us/record, "
                f"inference {inf_us:.2f} us/record, {reports[-1].throughput_s_per_batch:.3f} s/batch"
            )
        return reports


def run_bench(
    records: Sequence[AisRecord],
    model: GbdtModel,
    prep: PrepConfig,
    horizons: Sequence[int],
    bench: BenchConfig,
    poi_index: Optional[PoiIndex] = None,
    vessel_types: Optional[Mapping[str, int]] = None,
    workers: int = 1,
    dataset: str = "",
) -> List[BenchReport]:
    """Benchmark a model over records in file order (see ``BenchRunner.run``)."""
    runner = BenchRunner(model, prep, horizons, bench, poi_index, vessel_types, workers, dataset)
    return runner.run(records)


def bench_frame(reports: Sequence[BenchReport]) -> pd.DataFrame:
    return pd.DataFrame([{k: asdict(r)[k] for k in BENCH_COLUMNS} for r in reports], columns=BENCH_COLUMNS)


def write_bench_csv(reports: Sequence[BenchReport], path: Union[str, Path]) -> None:
    with atomic_output(path) as f:
        bench_frame(reports).to_csv(f, index=False, lineterminator="\n")
