"""Symmetric eigendecomposition by cyclic Jacobi rotations, with a deterministic
ordering and sign convention, plus spectrum and eigenvector comparison helpers.

Jacobi is robust and simple, and fully adequate for the matrix sizes this
package works with (a few hundred rows). The deterministic conventions make
regression tests and cross-run comparisons stable: eigenvalues descend,
each eigenvector's largest-magnitude entry is positive, and exact eigenvalue
ties are broken by lexicographic eigenvector order.
"""

from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .validation import check_symmetric

SYMMETRY_TOL = 1e-9
# sweep convergence: off-diagonal Frobenius norm relative to the full norm
OFFDIAG_REL_TOL = 1e-12
MAX_SWEEPS = 100


@dataclass
class EigenDecomposition:
    """Descending eigenvalues with orthonormal, sign-fixed eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str = ""


@dataclass
class SpectrumComparison:
    """Relative agreement of two descending spectra after an index shift."""

    lambda_q: np.ndarray
    lambda_rho: np.ndarray
    shift: int
    max_rel_diff: float
    compared_indices: np.ndarray = field(default=None)


@njit(cache=True)
def _jacobi_core(a, rel_tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    fro = np.sqrt(np.sum(a * a))
    if fro == 0.0:
        return np.diag(a).copy(), v, 0, True
    thresh = rel_tol * fro
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if np.sqrt(off) <= thresh:
            return np.diag(a).copy(), v, sweep, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    off = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            off += 2.0 * a[p, q] * a[p, q]
    return np.diag(a).copy(), v, max_sweeps, np.sqrt(off) <= thresh


def _fix_signs(vectors):
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = int(np.argmax(np.abs(col)))  # first index on ties
        if col[lead] < 0.0:
            vectors[:, j] = -col
    return vectors


def _order_columns(values, vectors):
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    vectors = _fix_signs(vectors)
    # break exact eigenvalue ties by lexicographic eigenvector order
    start = 0
    n = values.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and values[stop] == values[start]:
            stop += 1
        if stop - start > 1:
            cols = sorted(range(start, stop), key=lambda j: tuple(vectors[:, j]))
            vectors[:, start:stop] = vectors[:, cols]
        start = stop
    return values, vectors


def eigendecompose(a, source=""):
    """Full eigendecomposition of a symmetric matrix.

    Raises on asymmetric input and on failure to converge within the sweep cap
    (which does not happen for genuinely symmetric input at these sizes).
    """
    a = check_symmetric(a, SYMMETRY_TOL, "matrix")
    work = np.ascontiguousarray((a + a.T) / 2.0)
    values, vectors, sweeps, converged = _jacobi_core(
        work.copy(), OFFDIAG_REL_TOL, MAX_SWEEPS
    )
    if not converged:
        raise RuntimeError(f"Jacobi iteration did not converge within {MAX_SWEEPS} sweeps")
    values, vectors = _order_columns(values, vectors)
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors, source=source)


def fidelity(v, w):
    """Squared inner product of two real unit vectors; 1 for parallel, 0 for
    orthogonal, invariant under sign flips of either argument."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape != w.shape or v.ndim != 1:
        raise ValueError("fidelity needs two vectors of equal length")
    for name, u in (("v", v), ("w", w)):
        norm = float(np.linalg.norm(u))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"{name} is not unit norm (|{name}| = {norm:.12g})")
    return float(np.dot(v, w) ** 2)


def overlap(v, w):
    """Absolute inner product |v . w| of two real unit vectors."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape != w.shape or v.ndim != 1:
        raise ValueError("overlap needs two vectors of equal length")
    for name, u in (("v", v), ("w", w)):
        norm = float(np.linalg.norm(u))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"{name} is not unit norm (|{name}| = {norm:.12g})")
    return float(abs(np.dot(v, w)))


# eigenvalues this far below the leading one are noise; relative differences
# against them are meaningless
SPECTRUM_FLOOR = 1e-8


def compare_spectra(dq, drho, shift):
    """Largest relative eigenvalue mismatch between the classical spectrum and
    the quantum spectrum shifted down by ``shift`` positions.

    ``max_rel_diff = max_k |lambda_rho[k + shift] - lambda_q[k]| / lambda_q[0]``
    over indices where ``lambda_q[k] >= SPECTRUM_FLOOR * lambda_q[0]``.
    """
    if shift not in (0, 1):
        raise ValueError(f"shift must be 0 or 1, got {shift}")
    lq = np.asarray(dq.eigenvalues, dtype=np.float64)
    lr = np.asarray(drho.eigenvalues, dtype=np.float64)
    if lq.shape != lr.shape:
        raise ValueError(
            f"spectra have different sizes: {lq.shape[0]} vs {lr.shape[0]}"
        )
    n = lq.shape[0]
    head = max(lq[0], 1e-30)
    ks = np.arange(0, n - shift)
    ks = ks[lq[ks] >= SPECTRUM_FLOOR * lq[0]]
    if ks.size == 0:
        max_rel = 0.0
    else:
        max_rel = float(np.max(np.abs(lr[ks + shift] - lq[ks]) / head))
    return SpectrumComparison(
        lambda_q=lq, lambda_rho=lr, shift=shift, max_rel_diff=max_rel, compared_indices=ks
    )


def export_spectrum_csv(dq, drho, path):
    """Write the paired spectra as CSV with columns index,lambda_q,lambda_rho."""
    lq = np.asarray(dq.eigenvalues)
    lr = np.asarray(drho.eigenvalues)
    if lq.shape != lr.shape:
        raise ValueError("spectra have different sizes")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("index,lambda_q,lambda_rho\n")
        for i, (a, b) in enumerate(zip(lq, lr)):
            fh.write(f"{i},{format(a, '.17g')},{format(b, '.17g')}\n")
