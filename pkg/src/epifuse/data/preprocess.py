"""Gap filling, normalization, windowing, splits and feature correlation."""

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError, DataFormatError, ShapeError
from .io import FEATURE_NAMES, TemporalRecord


class DegenerateColumnWarning(UserWarning):
    """A constant column appeared where a correlation was requested."""


def records_to_matrix(records):
    """(dates, (N, 13) matrix) with NaN where values are missing."""
    dates = [r.date for r in records]
    return dates, np.array([r.values for r in records], dtype=np.float64)


def interpolate_missing(records):
    """Nearest-neighbour fill per feature; equidistant ties use the earlier day.

    Distances are measured in calendar days, so gaps in the date sequence
    are handled correctly.
    """
    if not records:
        return []
    dates, matrix = records_to_matrix(records)
    day0 = dates[0]
    offsets = np.array([(d - day0).days for d in dates], dtype=np.float64)

    filled = matrix.copy()
    for col in range(matrix.shape[1]):
        present = np.isfinite(matrix[:, col])
        if not present.any():
            raise DataFormatError(f"feature {FEATURE_NAMES[col]!r} has no values at all")
        if present.all():
            continue
        src_off = offsets[present]
        src_val = matrix[present, col]
        for row in np.nonzero(~present)[0]:
            dist = np.abs(src_off - offsets[row])
            # argmin returns the first (earlier) index on ties
            filled[row, col] = src_val[np.argmin(dist)]
    return [TemporalRecord(d, filled[k]) for k, d in enumerate(dates)]


@dataclass(frozen=True)
class Normalizer:
    """Per-column mean/population-std scaler, fitted on training rows only."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0:
            raise ShapeError("normalizer needs a nonempty (rows, columns) matrix")
        if not np.all(np.isfinite(matrix)):
            raise ShapeError("normalizer input still has missing values")
        mean = matrix.mean(axis=0)
        std = np.maximum(matrix.std(axis=0), 1e-12)
        mean.setflags(write=False)
        std.setflags(write=False)
        return cls(mean, std)

    def transform(self, matrix):
        return (np.asarray(matrix, dtype=np.float64) - self.mean) / self.std

    def inverse_transform(self, matrix):
        return np.asarray(matrix, dtype=np.float64) * self.std + self.mean

    def transform_columns(self, matrix, columns):
        cols = np.asarray(columns)
        return (np.asarray(matrix, dtype=np.float64) - self.mean[cols]) / self.std[cols]

    def inverse_transform_columns(self, matrix, columns):
        cols = np.asarray(columns)
        return np.asarray(matrix, dtype=np.float64) * self.std[cols] + self.mean[cols]

    def fingerprint(self):
        h = hashlib.sha256()
        h.update(self.mean.tobytes())
        h.update(self.std.tobytes())
        return h.hexdigest()


def sliding_windows(matrix, window_size):
    """All length-W windows, one per start day: (N - W + 1, W, F)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    if window_size < 1:
        raise ConfigError(f"window size must be >= 1, got {window_size}")
    if n < window_size:
        raise ShapeError(f"series of {n} days is shorter than window {window_size}")
    wins = sliding_window_view(matrix, window_size, axis=0)  # (N-W+1, F, W)
    return np.ascontiguousarray(np.moveaxis(wins, 2, 1))


def window_sequences(matrix, targets, window_size):
    """Supervised pairs: window over days k..k+W-1 paired with the day-(k+W)
    target. Emits exactly N - W pairs."""
    targets = np.asarray(targets, dtype=np.float64)
    matrix = np.asarray(matrix, dtype=np.float64)
    if targets.shape[0] != matrix.shape[0]:
        raise ShapeError(
            f"features cover {matrix.shape[0]} days but targets cover {targets.shape[0]}"
        )
    wins = sliding_windows(matrix, window_size)
    n_pairs = matrix.shape[0] - window_size
    return wins[:n_pairs], targets[window_size:]


@dataclass(frozen=True)
class DatasetSplit:
    """Chronologically contiguous train -> test -> validation day ranges."""

    train: range
    test: range
    validation: range


def split_dataset(n_days, window_size=None):
    """80/23/12-proportioned contiguous split (exact at the canonical 115)."""
    if n_days < 3:
        raise ConfigError(f"cannot split {n_days} days into three ranges")
    n_test = (n_days * 23) // 115
    n_val = (n_days * 12) // 115
    n_train = n_days - n_test - n_val
    if min(n_train, n_test, n_val) < 1:
        raise ConfigError(f"{n_days} days leave an empty split")
    if window_size is not None:
        need = window_size + 1
        if min(n_train, n_test, n_val) < need:
            raise ConfigError(
                f"each split needs >= {need} days for window {window_size}; "
                f"got {n_train}/{n_test}/{n_val}"
            )
    return DatasetSplit(
        train=range(0, n_train),
        test=range(n_train, n_train + n_test),
        validation=range(n_train + n_test, n_days),
    )


def correlation_matrix(matrix):
    """Pearson correlations of all column pairs; unit diagonal.

    A constant column yields zero correlations (with a warning) instead of
    NaNs, so downstream feature ranking stays well-defined.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise ShapeError("correlation needs at least two rows")
    if not np.all(np.isfinite(matrix)):
        raise ShapeError("correlation input has missing values")
    centred = matrix - matrix.mean(axis=0)
    std = matrix.std(axis=0)
    degenerate = std < 1e-12
    if degenerate.any():
        warnings.warn(
            f"constant column(s) at indices {np.nonzero(degenerate)[0].tolist()}",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    safe = np.where(degenerate, 1.0, std)
    corr = (centred / safe).T @ (centred / safe) / matrix.shape[0]
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)
