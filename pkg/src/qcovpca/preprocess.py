"""Feature standardization, partial mean centering, and per-row L2 normalization.

The three maps compose in a fixed order (standardize, then center, then
normalize); statistics are always fitted on training data and reapplied to
held-out data. All reductions use numpy's pairwise summation, so results do
not depend on row partitioning.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .validation import as_float_matrix, check_feature_dim

# features with a standard deviation below this are treated as constant
CONSTANT_FEATURE_TOL = 1e-12
# rows with a norm below this have no direction and cannot be normalized
ZERO_ROW_TOL = 1e-12


@dataclass
class FeatureStats:
    """Per-feature means and population standard deviations of a training split."""

    means: np.ndarray
    stds: np.ndarray
    fitted_on: int

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=np.float64)
        self.stds = np.asarray(self.stds, dtype=np.float64)
        if self.means.shape != self.stds.shape or self.means.ndim != 1:
            raise ValueError("means and stds must be 1-d vectors of equal length")
        if np.any(self.stds < 0):
            raise ValueError("standard deviations must be non-negative")


@dataclass
class PipelineConfig:
    """Switches for the standardize -> partial-center -> normalize pipeline."""

    standardize: bool = True
    gamma: float = 1.0
    l2_normalize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


def fit_stats(samples):
    """Population (divide-by-m) means and standard deviations per feature."""
    x = as_float_matrix(samples, "samples")
    if x.shape[0] < 1:
        raise ValueError("cannot fit statistics on an empty matrix")
    means = x.mean(axis=0)
    stds = np.sqrt(np.mean((x - means) ** 2, axis=0))
    return FeatureStats(means, stds, x.shape[0])


def standardize(samples, stats):
    """Divide each feature by its training standard deviation.

    Near-constant features (std below ``CONSTANT_FEATURE_TOL``) pass through
    unscaled; a warning reports them.
    """
    x = as_float_matrix(samples, "samples")
    check_feature_dim(x, stats.means.shape[0], "samples")
    constant = stats.stds < CONSTANT_FEATURE_TOL
    if constant.any():
        warnings.warn(
            f"{int(constant.sum())} constant feature(s) left unscaled: "
            f"columns {np.where(constant)[0].tolist()}",
            UserWarning,
            stacklevel=2,
        )
    scale = np.where(constant, 1.0, stats.stds)
    return x / scale


def partial_center(samples, stats, gamma):
    """Subtract ``gamma`` times the training feature means from each row."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    x = as_float_matrix(samples, "samples")
    check_feature_dim(x, stats.means.shape[0], "samples")
    return x - gamma * stats.means


def l2_normalize(samples):
    """Scale every row to unit Euclidean norm.

    A row with norm below ``ZERO_ROW_TOL`` has no direction (and no amplitude
    encoding), so it raises instead of being silently skipped.
    """
    x = as_float_matrix(samples, "samples")
    norms = np.linalg.norm(x, axis=1)
    bad = np.where(norms < ZERO_ROW_TOL)[0]
    if bad.size:
        raise ValueError(f"row {int(bad[0])} has no L2 direction")
    return x / norms[:, None]


class PartialCenteringScaler(BaseEstimator, TransformerMixin):
    """Standardize features, partially center, and L2-normalize rows.

    The centering strength ``gamma`` interpolates between the raw data
    (``gamma=0``) and fully mean-centered data (``gamma=1``). Centering is
    applied in the standardized feature space when ``standardize`` is on.

    Parameters
    ----------
    standardize : bool, default=True
        Divide each feature by its training standard deviation.
    gamma : float, default=1.0
        Centering strength in [0, 1].
    l2_normalize : bool, default=True
        Rescale every row to unit norm after centering.

    Attributes
    ----------
    stats_ : FeatureStats
        Raw means/stds of the training split (feature units).
    scale_ : ndarray of shape (n_features,)
        Effective per-feature divisor (ones when not standardizing).
    center_means_ : ndarray of shape (n_features,)
        Feature means of the (possibly standardized) training data; the
        transform subtracts ``gamma * center_means_``.
    """

    def __init__(self, standardize=True, gamma=1.0, l2_normalize=True):
        self.standardize = standardize
        self.gamma = gamma
        self.l2_normalize = l2_normalize

    def fit(self, X, y=None):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        X = as_float_matrix(X, "X")
        self.stats_ = fit_stats(X)
        if self.standardize:
            constant = self.stats_.stds < CONSTANT_FEATURE_TOL
            if constant.any():
                warnings.warn(
                    f"{int(constant.sum())} constant feature(s) left unscaled: "
                    f"columns {np.where(constant)[0].tolist()}",
                    UserWarning,
                    stacklevel=2,
                )
            self.scale_ = np.where(constant, 1.0, self.stats_.stds)
        else:
            self.scale_ = np.ones(X.shape[1])
        self.center_means_ = (X / self.scale_).mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = as_float_matrix(X, "X")
        check_feature_dim(X, self.n_features_in_, "X")
        out = X / self.scale_
        out = out - self.gamma * self.center_means_
        if self.l2_normalize:
            out = l2_normalize(out)
        return out


def run_pipeline(train, test, cfg):
    """Fit the pipeline on ``train`` and transform both splits.

    Returns ``(train', test', stats)`` where ``stats`` are the raw per-feature
    training statistics. The step order is fixed and not configurable.
    """
    scaler = PartialCenteringScaler(
        standardize=cfg.standardize, gamma=cfg.gamma, l2_normalize=cfg.l2_normalize
    )
    scaler.fit(train)
    return scaler.transform(train), scaler.transform(test), scaler.stats_
