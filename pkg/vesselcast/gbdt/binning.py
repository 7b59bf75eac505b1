"""
Feature binning for histogram split finding.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from vesselcast.errors import InvalidInputError

BIN_DTYPE = np.uint16


@dataclass(frozen=True)
class BinSchema:
    """
    Per-feature split thresholds.

    A value x falls in bin ``searchsorted(thresholds, x, 'right')``, so bin
    k <= j exactly when x < thresholds[j]. Missing values (NaN) go to the
    dedicated bin ``n_bins``.
    """
    thresholds: Tuple[np.ndarray, ...]
    n_bins: int

    @property
    def n_features(self) -> int:
        return len(self.thresholds)

    @property
    def missing_bin(self) -> int:
        return self.n_bins

    @property
    def n_slots(self) -> int:
        """Histogram slots per feature: the value bins plus the missing bin."""
        return self.n_bins + 1

    def threshold_counts(self) -> np.ndarray:
        return np.array([len(t) for t in self.thresholds], dtype=np.int64)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Bin a raw feature matrix into an (n, F) uint16 code matrix."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise InvalidInputError(
                f"expected a matrix with {self.n_features} columns, got shape {X.shape}"
            )
        codes = np.empty(X.shape, dtype=BIN_DTYPE)
        for f, t in enumerate(self.thresholds):
            col = X[:, f]
            binned = np.searchsorted(t, col, side="right")
            codes[:, f] = np.where(np.isnan(col), self.missing_bin, binned)
        return codes


def _feature_thresholds(values: np.ndarray, n_bins: int) -> np.ndarray:
    values = values[~np.isnan(values)]
    if len(values) == 0:
        return np.empty(0)
    uniq = np.unique(values)
    if len(uniq) <= n_bins:
        # lossless: one threshold between each adjacent pair of values
        lo, hi = uniq[:-1], uniq[1:]
        mid = lo + (hi - lo) / 2.0
        return np.where(mid > lo, mid, hi)
    qs = np.quantile(values, np.arange(1, n_bins) / n_bins)
    qs = np.unique(qs)
    return qs[qs > uniq[0]]


def build_bins(X: np.ndarray, n_bins: int = 256) -> BinSchema:
    """
    Derive thresholds for every column of a training matrix.

    Columns with at most ``n_bins`` distinct non-missing values get a
    threshold between each adjacent pair (binning is lossless there); wider
    columns get thresholds at the evenly spaced quantiles j / n_bins.

    Raises:
        InvalidInputError: the matrix has no rows or ``n_bins`` is outside [2, 256].
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInputError("cannot bin an empty matrix")
    if not 2 <= n_bins <= 256:
        raise InvalidInputError(f"n_bins must be within [2, 256], got {n_bins}")
    return BinSchema(
        thresholds=tuple(_feature_thresholds(X[:, f], n_bins) for f in range(X.shape[1])),
        n_bins=n_bins,
    )
