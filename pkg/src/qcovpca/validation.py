"""Input validation helpers shared across the package."""

import numpy as np


def as_float_matrix(x, name="x"):
    """Coerce to a 2-d float64 array with finite entries."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return a


def as_float_vector(x, name="x"):
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return a


def as_label_vector(x, name="labels"):
    """Coerce to a 1-d int64 label vector."""
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got ndim={a.ndim}")
    if a.dtype.kind == "f":
        if not np.all(np.isfinite(a)) or np.any(a != np.round(a)):
            raise ValueError(f"{name} must hold integer values")
    elif a.dtype.kind not in "iub":
        raise ValueError(f"{name} has non-integer dtype {a.dtype}")
    return a.astype(np.int64)


def check_feature_dim(x, n_features, name="x"):
    if x.shape[1] != n_features:
        raise ValueError(
            f"{name} has {x.shape[1]} features, expected {n_features}"
        )


def check_symmetric(a, tol=1e-9, name="matrix"):
    a = as_float_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"{name} is not symmetric (max |A - A^T| = {dev:.3e})")
    return a


def check_unit_rows(x, tol=1e-9, name="samples"):
    """Require every row of ``x`` to have Euclidean norm 1 within ``tol``."""
    norms = np.linalg.norm(x, axis=1)
    bad = np.where(np.abs(norms - 1.0) > tol)[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"{name} row {i} has norm {norms[i]:.12g}, expected 1 within {tol:g}"
        )
