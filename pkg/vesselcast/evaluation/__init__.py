"""
Chronological evaluation, baselines and hyperparameter sweeps.
"""

from vesselcast.evaluation.grid_search import (
    GridRow,
    GridSpec,
    grid_frame,
    grid_search,
    normalize_axis,
    write_grid_csv,
)
from vesselcast.evaluation.report import (
    PREDICTION_COLUMNS,
    REPORT_COLUMNS,
    HoldoutResult,
    HorizonReport,
    HorizonRow,
    chronological_split,
    displacement_error_m,
    evaluate,
    persistence_baseline,
    prediction_errors,
    predictions_frame,
    read_predictions,
    report_from_errors,
    score_predictions,
    train_and_evaluate,
)

__all__ = [
    "PREDICTION_COLUMNS",
    "REPORT_COLUMNS",
    "GridRow",
    "GridSpec",
    "HoldoutResult",
    "HorizonReport",
    "HorizonRow",
    "chronological_split",
    "displacement_error_m",
    "evaluate",
    "grid_frame",
    "grid_search",
    "normalize_axis",
    "persistence_baseline",
    "prediction_errors",
    "predictions_frame",
    "read_predictions",
    "report_from_errors",
    "score_predictions",
    "train_and_evaluate",
    "write_grid_csv",
]
