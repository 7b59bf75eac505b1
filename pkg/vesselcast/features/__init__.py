
from vesselcast.features.encoding import MISSING, CategoryEncoder, CategoryEncoders, encode_categories
from vesselcast.features.feature_factory import (
    FEATURE_NAMES,
    N_FEATURES,
    FeatureVector,
    InferenceBatch,
    TrainingExample,
    TrainingSet,
    build_inference_matrix,
    build_training_set,
    extract_features,
    matrix_frame,
    position_at,
    positions_at,
    write_matrix,
)

__all__ = [
    "FEATURE_NAMES",
    "MISSING",
    "N_FEATURES",
    "CategoryEncoder",
    "CategoryEncoders",
    "FeatureVector",
    "InferenceBatch",
    "TrainingExample",
    "TrainingSet",
    "build_inference_matrix",
    "build_training_set",
    "encode_categories",
    "extract_features",
    "matrix_frame",
    "position_at",
    "positions_at",
    "write_matrix",
]
