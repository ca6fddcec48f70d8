"""Principal component projection under five covariance preprocessing schemes.

Scheme summary (all standardize features first):

====  =========  ============  ===============  ====================
name  centering  L2 normalize  covariance       eigenvectors kept
====  =========  ============  ===============  ====================
CL    full       no            classical Q      0 .. k-1
UC    none       yes           quantum rho_bar  0 .. k-1
UC-skip  none    yes           quantum rho_bar  1 .. k
C     full       yes           quantum rho_bar  0 .. k-1
HC    partial    yes           quantum rho_bar  0 .. k-1
====  =========  ============  ===============  ====================

UC-skip drops the leading eigenvector of the uncentered quantum covariance,
which encodes the mean direction of the normalized data rather than any
feature-to-feature structure. ``k`` always counts retained components.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .covariance import classical_covariance, quantum_covariance
from .eigen import eigendecompose
from .preprocess import PartialCenteringScaler
from .validation import as_float_matrix

SCHEMES = ("CL", "UC", "UC-skip", "C", "HC")

_ALIASES = {
    "CL": "CL",
    "UC": "UC",
    "UC-SKIP": "UC-skip",
    "UC_SKIP": "UC-skip",
    "UCSKIP": "UC-skip",
    "C": "C",
    "HC": "HC",
}


def canonical_scheme(name):
    """Normalize a scheme name; raises with the list of valid names."""
    key = str(name).upper()
    if key not in _ALIASES:
        raise ValueError(f"unknown scheme {name!r}; valid schemes: {', '.join(SCHEMES)}")
    return _ALIASES[key]


def _scheme_recipe(scheme, gamma_hc):
    if scheme == "CL":
        return dict(gamma=1.0, l2_normalize=False, matrix="q", skip_first=False)
    if scheme == "UC":
        return dict(gamma=0.0, l2_normalize=True, matrix="rho_bar", skip_first=False)
    if scheme == "UC-skip":
        return dict(gamma=0.0, l2_normalize=True, matrix="rho_bar", skip_first=True)
    if scheme == "C":
        return dict(gamma=1.0, l2_normalize=True, matrix="rho_bar", skip_first=False)
    return dict(gamma=gamma_hc, l2_normalize=True, matrix="rho_bar", skip_first=False)


def scheme_decomposition(train, scheme, gamma_hc=0.95):
    """Fit the scheme's preprocessing on ``train`` and eigendecompose its
    covariance matrix. Returns ``(fitted scaler, EigenDecomposition)``."""
    scheme = canonical_scheme(scheme)
    recipe = _scheme_recipe(scheme, gamma_hc)
    scaler = PartialCenteringScaler(
        standardize=True, gamma=recipe["gamma"], l2_normalize=recipe["l2_normalize"]
    )
    transformed = scaler.fit(train).transform(train)
    if recipe["matrix"] == "q":
        matrix = classical_covariance(transformed)
    else:
        matrix = quantum_covariance(transformed)
    return scaler, eigendecompose(matrix, source=recipe["matrix"])


class SchemePca(BaseEstimator, TransformerMixin):
    """PCA projection whose covariance matrix and component selection follow
    one of the five preprocessing schemes.

    Parameters
    ----------
    scheme : str, default="CL"
        One of CL, UC, UC-skip, C, HC (case-insensitive; ``UC_SKIP`` accepted).
    n_components : int, default=2
        Number of retained components ``k``. For UC-skip this keeps
        eigenvectors 1..k, so ``k <= n_features - 1`` there.
    gamma_hc : float, default=0.95
        Centering strength used only by the HC scheme.

    Attributes
    ----------
    scaler_ : PartialCenteringScaler
        Preprocessing fitted on the training split.
    stats_ : FeatureStats
        Raw training feature statistics (from ``scaler_``).
    basis_ : ndarray of shape (n_features, n_components)
        Selected eigenvector columns.
    eigenvalues_ : ndarray of shape (n_features,)
        Full descending spectrum of the scheme's covariance matrix.
    skip_first_ : bool
        Whether the leading eigenvector was dropped (UC-skip only).
    """

    def __init__(self, scheme="CL", n_components=2, gamma_hc=0.95):
        self.scheme = scheme
        self.n_components = n_components
        self.gamma_hc = gamma_hc

    def fit(self, X, y=None):
        X = as_float_matrix(X, "X")
        scheme = canonical_scheme(self.scheme)
        if not 0.0 <= self.gamma_hc <= 1.0:
            raise ValueError(f"gamma_hc must lie in [0, 1], got {self.gamma_hc}")
        scaler, decomposition = scheme_decomposition(X, scheme, self.gamma_hc)
        self._adopt(scheme, scaler, decomposition, X.shape[1])
        return self

    def _adopt(self, scheme, scaler, decomposition, n_features):
        skip = scheme == "UC-skip"
        k = self.n_components
        limit = n_features - (1 if skip else 0)
        if not 1 <= k <= limit:
            raise ValueError(
                f"n_components must lie in [1, {limit}] for scheme {scheme}, got {k}"
            )
        first = 1 if skip else 0
        self.scheme_ = scheme
        self.scaler_ = scaler
        self.stats_ = scaler.stats_
        self.eigenvalues_ = decomposition.eigenvalues
        self.basis_ = decomposition.eigenvectors[:, first : first + k]
        self.skip_first_ = skip
        self.n_features_in_ = n_features
        return self

    @classmethod
    def _from_decomposition(cls, scheme, n_components, gamma_hc, scaler, decomposition):
        # build a fitted model from a precomputed decomposition (harness reuse)
        model = cls(scheme=scheme, n_components=n_components, gamma_hc=gamma_hc)
        model._adopt(
            canonical_scheme(scheme), scaler, decomposition, decomposition.eigenvectors.shape[0]
        )
        return model

    def transform(self, X):
        """Apply the scheme's preprocessing with training statistics, then
        project onto the retained eigenvectors. Rows are independent."""
        X = as_float_matrix(X, "X")
        return self.scaler_.transform(X) @ self.basis_


def export_model_csv(model, path):
    """Write a fitted model's basis as CSV, preceded by '#' metadata lines
    (scheme, component count, centering strength, training statistics)."""
    stats = model.stats_
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# scheme={model.scheme_}\n")
        fh.write(f"# n_components={model.basis_.shape[1]}\n")
        fh.write(f"# gamma={model.scaler_.gamma!r}\n")
        fh.write(f"# skip_first={model.skip_first_}\n")
        fh.write("# means=" + ",".join(format(v, ".17g") for v in stats.means) + "\n")
        fh.write("# stds=" + ",".join(format(v, ".17g") for v in stats.stds) + "\n")
        for row in model.basis_:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
