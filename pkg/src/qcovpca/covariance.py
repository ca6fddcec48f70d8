"""Classical and quantum covariance matrices of a point cloud.

For L2-normalized rows, the average outer product rho_bar is the mean
amplitude-encoded density matrix; it splits exactly into the classical
population covariance plus the rank-one outer product of the mean vector:
``rho_bar = Q + outer(mu, mu)``. Everything here uses population (divide-by-m)
normalization so that split is an identity rather than an asymptotic limit.
"""

from dataclasses import dataclass

import numpy as np

from .validation import as_float_matrix, check_unit_rows

UNIT_ROW_TOL = 1e-9


@dataclass
class CovariancePair:
    """Classical covariance ``q``, quantum covariance ``rho_bar``, mean ``mu``,
    and ``m_outer = outer(mu, mu)`` for one normalized dataset."""

    q: np.ndarray
    rho_bar: np.ndarray
    mu: np.ndarray
    m_outer: np.ndarray
    sample_count: int


def _mirror_upper(a):
    # copy the upper triangle onto the lower one: symmetric by construction
    return np.triu(a) + np.triu(a, 1).T


def mean_vector(samples):
    """Componentwise average over rows."""
    x = as_float_matrix(samples, "samples")
    if x.shape[0] < 1:
        raise ValueError("cannot average an empty matrix")
    return x.mean(axis=0)


def quantum_covariance(normalized_samples):
    """Average outer product ``(1/m) sum_i x_i x_i^T`` of unit-norm rows.

    Rows must be L2-normalized already (checked); renormalizing silently here
    would hide upstream mistakes and break the unit-trace contract.
    """
    x = as_float_matrix(normalized_samples, "normalized_samples")
    if x.shape[0] < 1:
        raise ValueError("cannot average an empty matrix")
    check_unit_rows(x, UNIT_ROW_TOL, "normalized_samples")
    return _mirror_upper(x.T @ x / x.shape[0])


def classical_covariance(samples):
    """Population covariance ``E[x x^T] - mu mu^T`` via the centered two-pass form."""
    x = as_float_matrix(samples, "samples")
    if x.shape[0] < 1:
        raise ValueError("cannot average an empty matrix")
    centered = x - x.mean(axis=0)
    return _mirror_upper(centered.T @ centered / x.shape[0])


def build_pair(normalized_samples):
    """Assemble the CovariancePair of an L2-normalized dataset and verify its
    structural contracts (unit trace and the exact covariance split)."""
    x = as_float_matrix(normalized_samples, "normalized_samples")
    check_unit_rows(x, UNIT_ROW_TOL, "normalized_samples")
    m = x.shape[0]
    mu = mean_vector(x)
    rho_bar = quantum_covariance(x)
    q = classical_covariance(x)
    m_outer = np.outer(mu, mu)
    trace = float(np.trace(rho_bar))
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"trace(rho_bar) = {trace:.12g}, expected 1 within 1e-10")
    residual = float(np.max(np.abs(q - (rho_bar - m_outer))))
    if residual > 1e-10:
        raise ValueError(
            f"covariance split violated: max |q - (rho_bar - mu mu^T)| = {residual:.3e}"
        )
    return CovariancePair(q=q, rho_bar=rho_bar, mu=mu, m_outer=m_outer, sample_count=m)


def export_matrix_csv(a, path):
    """Write a matrix as CSV, row-major, 17 significant digits in scientific notation."""
    a = as_float_matrix(a, "matrix")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for row in a:
            fh.write(",".join(format(v, ".16e") for v in row) + "\n")
