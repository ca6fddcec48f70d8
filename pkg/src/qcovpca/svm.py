"""Binary soft-margin SVM with an RBF kernel, trained by sequential minimal
optimization (pairwise coordinate ascent on the dual with Platt-style working
pair selection and an error cache). Deterministic for a fixed random_state."""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ._jit import njit
from .validation import as_float_matrix, as_label_vector, check_feature_dim


def rbf_kernel(x, y, gamma_rbf):
    """exp(-gamma_rbf * ||x - y||^2) for two vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("rbf_kernel needs two vectors of equal length")
    if gamma_rbf <= 0:
        raise ValueError(f"gamma_rbf must be positive, got {gamma_rbf}")
    d = x - y
    return float(np.exp(-gamma_rbf * np.dot(d, d)))


def rbf_kernel_matrix(a, b, gamma_rbf):
    """Pairwise RBF kernel values between the rows of ``a`` and ``b``."""
    a = as_float_matrix(a, "a")
    b = as_float_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError("kernel inputs must share their feature dimension")
    if gamma_rbf <= 0:
        raise ValueError(f"gamma_rbf must be positive, got {gamma_rbf}")
    sq_a = np.sum(a * a, axis=1)
    sq_b = np.sum(b * b, axis=1)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma_rbf * d2)


@njit(cache=True)
def _take_step(k, y, alpha, err, i1, i2, c):
    if i1 == i2:
        return 0.0, False
    a1 = alpha[i1]
    a2 = alpha[i2]
    y1 = y[i1]
    y2 = y[i2]
    e1 = err[i1]
    e2 = err[i2]
    s = y1 * y2
    if s > 0.0:
        lo = max(0.0, a1 + a2 - c)
        hi = min(c, a1 + a2)
    else:
        lo = max(0.0, a2 - a1)
        hi = min(c, c + a2 - a1)
    if lo >= hi:
        return 0.0, False
    eta = k[i1, i1] + k[i2, i2] - 2.0 * k[i1, i2]
    if eta > 0.0:
        a2new = a2 + y2 * (e1 - e2) / eta
        if a2new < lo:
            a2new = lo
        elif a2new > hi:
            a2new = hi
    else:
        # flat or concave direction (duplicate points): compare the dual gain
        # dW(d2) = y2 (e1 - e2) d2 - 0.5 eta d2^2 at both interval endpoints
        g = y2 * (e1 - e2)
        d_lo = lo - a2
        d_hi = hi - a2
        w_lo = g * d_lo - 0.5 * eta * d_lo * d_lo
        w_hi = g * d_hi - 0.5 * eta * d_hi * d_hi
        if w_lo > w_hi + 1e-12:
            a2new = lo
        elif w_hi > w_lo + 1e-12:
            a2new = hi
        else:
            return 0.0, False
    if abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12):
        return 0.0, False
    # snap round-off residue onto the box bounds so bound/interior
    # classification (and the KKT stopping test) stays exact
    snap = 1e-10 * c
    if a2new < snap:
        a2new = 0.0
    elif a2new > c - snap:
        a2new = c
    if a2new == a2:  # snapping cancelled the whole move
        return 0.0, False
    a1new = a1 + s * (a2 - a2new)
    if a1new < snap:
        a1new = 0.0
    elif a1new > c - snap:
        a1new = c
    d1 = y1 * (a1new - a1)
    d2 = y2 * (a2new - a2)
    m = y.shape[0]
    for j in range(m):
        err[j] += d1 * k[i1, j] + d2 * k[i2, j]
    alpha[i1] = a1new
    alpha[i2] = a2new
    # re-anchor the bias so a freshly updated non-bound point sits on its margin
    if 0.0 < a1new < c:
        db = -err[i1]
    elif 0.0 < a2new < c:
        db = -err[i2]
    else:
        db = -(err[i1] + err[i2]) / 2.0
    for j in range(m):
        err[j] += db
    return db, True


@njit(cache=True)
def _smo_core(k, y, c, tol, max_passes, state0):
    m = y.shape[0]
    alpha = np.zeros(m)
    err = -y.copy()  # err_i = f(x_i) - y_i, with f = 0 at the start
    b = 0.0
    state = state0
    passes = 0
    examine_all = True
    num_changed = 1
    while (num_changed > 0 or examine_all) and passes < max_passes:
        num_changed = 0
        for i2 in range(m):
            if not examine_all and not (0.0 < alpha[i2] < c):
                continue
            r2 = err[i2] * y[i2]
            if not ((r2 < -tol and alpha[i2] < c) or (r2 > tol and alpha[i2] > 0.0)):
                continue
            e2 = err[i2]
            # first choice: non-bound point with the largest |e1 - e2|
            i1 = -1
            best = -1.0
            for j in range(m):
                if 0.0 < alpha[j] < c:
                    d = abs(err[j] - e2)
                    if d > best:
                        best = d
                        i1 = j
            took = False
            if i1 >= 0:
                db, took = _take_step(k, y, alpha, err, i1, i2, c)
                if took:
                    b += db
            if not took:
                # fall back to a seeded-random scan over non-bound points
                state ^= state << np.uint64(13)
                state ^= state >> np.uint64(7)
                state ^= state << np.uint64(17)
                start = int(state % np.uint64(m))
                for jj in range(m):
                    j = (start + jj) % m
                    if 0.0 < alpha[j] < c:
                        db, took = _take_step(k, y, alpha, err, j, i2, c)
                        if took:
                            b += db
                            break
            if not took:
                # last resort: scan every point
                state ^= state << np.uint64(13)
                state ^= state >> np.uint64(7)
                state ^= state << np.uint64(17)
                start = int(state % np.uint64(m))
                for jj in range(m):
                    j = (start + jj) % m
                    db, took = _take_step(k, y, alpha, err, j, i2, c)
                    if took:
                        b += db
                        break
            if took:
                num_changed += 1
        passes += 1
        if examine_all:
            examine_all = False
        elif num_changed == 0:
            examine_all = True
    converged = passes < max_passes
    return alpha, b, passes, converged


def accuracy(labels_true, labels_pred):
    """Fraction of exact label matches."""
    t = as_label_vector(labels_true, "labels_true")
    p = as_label_vector(labels_pred, "labels_pred")
    if t.shape[0] != p.shape[0]:
        raise ValueError(
            f"label vectors have different lengths: {t.shape[0]} vs {p.shape[0]}"
        )
    if t.shape[0] == 0:
        raise ValueError("cannot score empty label vectors")
    return float(np.mean(t == p))


class SmoSvc(BaseEstimator, ClassifierMixin):
    """RBF-kernel soft-margin SVM trained by sequential minimal optimization.

    Parameters
    ----------
    C : float, default=1.0
        Box constraint on the dual coefficients.
    gamma : "scale" or float, default="scale"
        RBF width. "scale" resolves to ``1 / (n_features * Var(X_train))``
        with the population variance of all training entries.
    tol : float, default=1e-3
        KKT violation tolerance used by the stopping test.
    max_passes : int, default=1000
        Cap on optimization passes; hitting it returns the best iterate with
        ``converged_ = False`` and a warning instead of raising.
    random_state : int, default=0
        Seed for the tie-breaking scans of the working-pair selection.

    Attributes
    ----------
    support_vectors_ : ndarray of shape (n_sv, n_features)
    dual_coef_ : ndarray of shape (n_sv,)
        ``alpha_i * y_i`` with ``y in {-1, +1}``.
    intercept_ : float
    gamma_ : float
        Resolved RBF width.
    dual_objective_ : float
        Final value of the dual objective.
    converged_ : bool
    """

    def __init__(self, C=1.0, gamma="scale", tol=1e-3, max_passes=1000, random_state=0):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes
        self.random_state = random_state

    def _resolve_gamma(self, X):
        if self.gamma == "scale":
            var = float(X.var())
            return 1.0 / (X.shape[1] * var) if var > 1e-12 else 1.0
        g = float(self.gamma)
        if g <= 0:
            raise ValueError(f"gamma must be positive or 'scale', got {self.gamma}")
        return g

    def fit(self, X, y):
        X = as_float_matrix(X, "X")
        y = as_label_vector(y, "y")
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y have different sample counts")
        if X.shape[0] < 2:
            raise ValueError("need at least two training samples")
        classes = np.unique(y)
        if not np.array_equal(classes, [0, 1]):
            raise ValueError(f"labels must contain both classes 0 and 1, got {classes.tolist()}")
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")

        gamma = self._resolve_gamma(X)
        t = np.where(y == 1, 1.0, -1.0)
        kernel = rbf_kernel_matrix(X, X, gamma)
        state0 = np.uint64((int(self.random_state) * 2654435761 + 97531) % (2**64) or 1)
        alpha, b, passes, converged = _smo_core(
            kernel, t, float(self.C), float(self.tol), int(self.max_passes), state0
        )
        if not converged:
            warnings.warn(
                f"SMO did not satisfy the KKT conditions within {self.max_passes} passes; "
                "returning the best iterate",
                UserWarning,
                stacklevel=2,
            )
        coef = alpha * t
        q = kernel @ coef
        self.dual_objective_ = float(alpha.sum() - 0.5 * coef @ q)
        b = self._final_bias(alpha, t, q, float(self.C), b)
        sv = alpha > 0.0
        self.support_vectors_ = X[sv]
        self.dual_coef_ = coef[sv]
        self.intercept_ = float(b)
        self.gamma_ = gamma
        self.converged_ = bool(converged)
        self.n_passes_ = int(passes)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        X = as_float_matrix(X, "X")
        check_feature_dim(X, self.n_features_in_, "X")
        if self.support_vectors_.shape[0] == 0:
            return np.full(X.shape[0], self.intercept_)
        kernel = rbf_kernel_matrix(X, self.support_vectors_, self.gamma_)
        return kernel @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        """Label 1 where the decision value is strictly positive, else 0."""
        return (self.decision_function(X) > 0.0).astype(np.int64)
