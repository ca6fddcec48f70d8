import numpy as np
import pytest
from sklearn.base import clone

from oracles import grid_dual_maximum, pg_dual_solve, svm_dual_objective
from qcovpca import SmoSvc, accuracy, rbf_kernel, rbf_kernel_matrix


def random_problem(rng, max_points=8, n_features=2):
    m = int(rng.integers(2, max_points + 1))
    x = rng.standard_normal((m, n_features))
    y = (rng.random(m) > 0.5).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return x, y


class TestRbfKernel:
    def test_same_point_is_one(self):
        assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 0.5) == 1.0

    def test_unit_distance_analytic(self):
        gamma = 2.0
        x = np.zeros(3)
        y = np.array([1.0 / np.sqrt(gamma), 0.0, 0.0])  # ||x-y||^2 = 1/gamma
        assert rbf_kernel(x, y, gamma) == pytest.approx(np.exp(-1.0), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="vectors"):
            rbf_kernel([1.0, 2.0], [1.0, 2.0, 3.0], 1.0)

    def test_gamma_positive(self):
        with pytest.raises(ValueError, match="positive"):
            rbf_kernel([1.0], [2.0], 0.0)

    def test_kernel_matrix_is_psd(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((10, 4))
        k = rbf_kernel_matrix(x, x, 0.7)
        assert np.min(np.linalg.eigvalsh((k + k.T) / 2)) >= -1e-10
        np.testing.assert_allclose(k, k.T, atol=1e-15)

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((4, 3))
        b = rng.standard_normal((5, 3))
        k = rbf_kernel_matrix(a, b, 1.3)
        for i in range(4):
            for j in range(5):
                assert k[i, j] == pytest.approx(rbf_kernel(a[i], b[j], 1.3), abs=1e-12)


class TestTraining:
    def test_two_point_problem(self):
        x = np.array([[0.0, 1.0], [0.0, -1.0]])
        y = np.array([1, 0])
        clf = SmoSvc(C=1.0, gamma=1.0).fit(x, y)
        assert clf.support_vectors_.shape[0] == 2
        assert accuracy(y, clf.predict(x)) == 1.0
        # symmetric geometry: zero bias, antisymmetric decisions
        assert abs(clf.intercept_) <= 1e-9
        f = clf.decision_function(x)
        assert abs(f[0] + f[1]) <= 1e-9

    def test_xor_pattern(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        y = np.array([0, 0, 1, 1])
        clf = SmoSvc(C=10.0, gamma=1.0).fit(x, y)
        assert accuracy(y, clf.predict(x)) == 1.0
        # the coarse exhaustive grid can only find a worse-or-equal dual value
        kernel = rbf_kernel_matrix(x, x, 1.0)
        y_pm = np.where(y == 1, 1.0, -1.0)
        assert clf.dual_objective_ >= grid_dual_maximum(kernel, y_pm, 10.0, steps=41) - 1e-6

    def test_dual_matches_projected_gradient_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            x, y = random_problem(rng)
            c = float(rng.choice([0.5, 1.0, 10.0]))
            clf = SmoSvc(C=c, gamma=0.8, tol=1e-3).fit(x, y)
            kernel = rbf_kernel_matrix(x, x, 0.8)
            y_pm = np.where(y == 1, 1.0, -1.0)
            alpha = pg_dual_solve(kernel, y_pm, c)
            reference = svm_dual_objective(kernel, y_pm, alpha)
            assert abs(clf.dual_objective_ - reference) <= 1e-3

    def test_kkt_residuals(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = int(rng.integers(10, 40))
            x = rng.standard_normal((m, 3))
            y = (x[:, 0] + 0.3 * rng.standard_normal(m) > 0).astype(int)
            if y.min() == y.max():
                y[0] = 1 - y[0]
            c, tol = 1.0, 1e-3
            clf = SmoSvc(C=c, gamma="scale", tol=tol).fit(x, y)
            if not clf.converged_:
                continue
            f = clf.decision_function(x)
            y_pm = np.where(y == 1, 1.0, -1.0)
            alpha = np.zeros(m)
            # recover alpha for the kept support vectors
            sv_rows = {tuple(row): i for i, row in enumerate(map(tuple, x))}
            for coef, sv in zip(clf.dual_coef_, clf.support_vectors_):
                alpha[sv_rows[tuple(sv)]] = abs(coef)
            margin = y_pm * f
            drift = 1e-9
            for i in range(m):
                if alpha[i] <= 0.0:
                    assert margin[i] >= 1.0 - tol - drift
                elif alpha[i] >= c:
                    assert margin[i] <= 1.0 + tol + drift
                else:
                    assert abs(margin[i] - 1.0) <= tol + drift

    def test_dual_feasibility(self):
        rng = np.random.default_rng(4)
        x, y = random_problem(rng, max_points=30)
        c = 2.0
        clf = SmoSvc(C=c, gamma=1.0).fit(x, y)
        assert np.all(np.abs(clf.dual_coef_) <= c + 1e-12)
        assert abs(clf.dual_coef_.sum()) <= 1e-6

    def test_interior_support_vectors_sit_on_margin(self):
        rng = np.random.default_rng(5)
        x = np.vstack([rng.standard_normal((25, 2)) - 2.0, rng.standard_normal((25, 2)) + 2.0])
        y = np.array([0] * 25 + [1] * 25)
        c, tol = 1.0, 1e-3
        clf = SmoSvc(C=c, gamma=0.5, tol=tol).fit(x, y)
        interior = np.abs(clf.dual_coef_) < c - 1e-9
        assert interior.any()
        f = clf.decision_function(clf.support_vectors_[interior])
        np.testing.assert_allclose(np.abs(f), 1.0, atol=tol + 1e-9)

    def test_label_swap_flips_decisions(self):
        rng = np.random.default_rng(6)
        x, y = random_problem(rng, max_points=25)
        a = SmoSvc(C=1.0, gamma=1.0, random_state=7).fit(x, y)
        b = SmoSvc(C=1.0, gamma=1.0, random_state=7).fit(x, 1 - y)
        np.testing.assert_allclose(a.decision_function(x), -b.decision_function(x), atol=1e-9)
        assert accuracy(y, a.predict(x)) == accuracy(1 - y, b.predict(x))

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(8)
        x, y = random_problem(rng, max_points=40)
        a = SmoSvc(C=1.0, gamma=0.4, random_state=3).fit(x, y)
        b = SmoSvc(C=1.0, gamma=0.4, random_state=3).fit(x, y)
        assert np.array_equal(a.dual_coef_, b.dual_coef_)
        assert a.intercept_ == b.intercept_

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            SmoSvc().fit(np.ones((3, 2)), [1, 1, 1])

    def test_non_convergence_warns_and_flags(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((60, 2))
        y = (rng.random(60) > 0.5).astype(int)  # pure noise, slow to settle
        with pytest.warns(UserWarning, match="did not satisfy"):
            clf = SmoSvc(C=10.0, gamma=5.0, max_passes=1).fit(x, y)
        assert clf.converged_ is False
        clf.predict(x)  # best-effort model still usable

    def test_duplicate_points_handled(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        y = np.array([0, 0, 1, 1])
        clf = SmoSvc(C=1.0, gamma=1.0).fit(x, y)
        assert accuracy(y, clf.predict(x)) == 1.0


class TestGammaResolution:
    def test_scale_matches_definition(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((30, 4)) * 2.0
        y = (rng.random(30) > 0.5).astype(int)
        y[:2] = [0, 1]
        clf = SmoSvc(gamma="scale").fit(x, y)
        assert clf.gamma_ == pytest.approx(1.0 / (4 * x.var()), rel=1e-12)

    def test_explicit_gamma(self):
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        clf = SmoSvc(gamma=2.5).fit(x, [0, 1])
        assert clf.gamma_ == 2.5

    def test_invalid_gamma(self):
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="gamma"):
            SmoSvc(gamma=-1.0).fit(x, [0, 1])


class TestPredict:
    def test_tie_maps_to_class_zero(self):
        clf = SmoSvc()
        clf.support_vectors_ = np.array([[1.0, 0.0]])
        clf.dual_coef_ = np.array([0.0])
        clf.intercept_ = 0.0
        clf.gamma_ = 1.0
        clf.n_features_in_ = 2
        assert clf.predict(np.array([[5.0, 5.0]]))[0] == 0

    def test_separable_training_predictions(self):
        rng = np.random.default_rng(11)
        x = np.vstack([rng.standard_normal((20, 2)) - 3.0, rng.standard_normal((20, 2)) + 3.0])
        y = np.array([0] * 20 + [1] * 20)
        clf = SmoSvc(C=1.0, gamma=0.5).fit(x, y)
        assert accuracy(y, clf.predict(x)) == 1.0
        kernel = rbf_kernel_matrix(x, x, 0.5)
        y_pm = np.where(y == 1, 1.0, -1.0)
        alpha = pg_dual_solve(kernel, y_pm, 1.0)
        assert abs(clf.dual_objective_ - svm_dual_objective(kernel, y_pm, alpha)) <= 1e-3


class TestAccuracy:
    def test_identical(self):
        assert accuracy([1, 0, 1], [1, 0, 1]) == 1.0

    def test_complementary(self):
        assert accuracy([1, 0, 1], [0, 1, 0]) == 0.0

    def test_three_quarters(self):
        assert accuracy([0, 1, 1, 0], [0, 1, 0, 0]) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="lengths"):
            accuracy([0, 1], [0, 1, 1])

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            accuracy([], [])


class TestEstimatorApi:
    def test_params_and_clone(self):
        clf = SmoSvc(C=2.0, gamma=0.1, tol=1e-4, max_passes=50, random_state=9)
        assert clone(clf).get_params() == clf.get_params()
