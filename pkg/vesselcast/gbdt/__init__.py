"""
Histogram gradient-boosted regression trees.
"""

from vesselcast.gbdt.binning import BinSchema, build_bins
from vesselcast.gbdt.booster import (
    GbdtModel,
    clamp_positions,
    fit,
    fit_arrays,
    predict_delta,
    predict_position,
    predict_positions,
    squared_error_gradient,
    train_ensemble,
)
from vesselcast.gbdt.grower import grow_tree, leaf_value, split_gain
from vesselcast.gbdt.model_io import dumps, load_model, loads, model_size_bytes, save_model
from vesselcast.gbdt.tree import Tree, TreeEnsemble

__all__ = [
    "BinSchema",
    "GbdtModel",
    "Tree",
    "TreeEnsemble",
    "build_bins",
    "clamp_positions",
    "dumps",
    "fit",
    "fit_arrays",
    "grow_tree",
    "leaf_value",
    "load_model",
    "loads",
    "model_size_bytes",
    "predict_delta",
    "predict_position",
    "predict_positions",
    "save_model",
    "split_gain",
    "squared_error_gradient",
    "train_ensemble",
]
