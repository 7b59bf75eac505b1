
from vesselcast.bench.harness import (
    BENCH_COLUMNS,
    BenchReport,
    BenchRunner,
    bench_frame,
    hardware_tag,
    measure_inference_us,
    run_bench,
    write_bench_csv,
)

__all__ = [
    "BENCH_COLUMNS",
    "BenchReport",
    "BenchRunner",
    "bench_frame",
    "hardware_tag",
    "measure_inference_us",
    "run_bench",
    "write_bench_csv",
]
