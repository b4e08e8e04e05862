"""SMO solver against closed forms and a projected-gradient QP oracle."""
import numpy as np
import pytest

from oracles import qp_bias, qp_objective, qp_solve, random_svm_problem
from qkbench import svm
from qkbench.datapipe import make_synthetic
from qkbench.kernels import gram_rbf
from qkbench.svm import accuracy, decision_function, fit_binary, fit_predict_multiclass


def test_two_point_closed_form():
    # max a1 + a2 - (a1^2 + a2^2)/2 with a1 = a2 gives alpha = [1, 1], b = 0
    model = fit_binary(np.eye(2), np.array([1.0, -1.0]), C=10.0, tol=1e-8)
    np.testing.assert_allclose(np.abs(model.dual_coefs), [1.0, 1.0], atol=1e-8)
    assert abs(model.bias) < 1e-8
    assert abs(model.objective - 1.0) < 1e-9
    assert set(model.support_idx.tolist()) == {0, 1}


def test_dual_constraints_and_kkt_hold():
    from oracles import kkt_violation

    rng = np.random.default_rng(0)
    for _ in range(10):
        K, y, C, _ = random_svm_problem(rng)
        model = fit_binary(K, y, C)  # default tol 1e-3
        alpha = np.zeros(len(y))
        alpha[model.support_idx] = model.dual_coefs * y[model.support_idx]
        assert alpha.min() >= -1e-12 and alpha.max() <= C + 1e-12
        assert abs(model.dual_coefs.sum()) < 1e-8  # sum alpha_i y_i = 0
        assert kkt_violation(K, y, alpha, C) < 1e-3 + 1e-12


def test_oracle_equivalence_objective_and_predictions():
    # acceptance runs the full 50-problem criterion; this is a fast regression slice
    rng = np.random.default_rng(77)
    for _ in range(15):
        K, y, C, K_test = random_svm_problem(rng)
        model = fit_binary(K, y, C, tol=1e-6)
        alpha = qp_solve(K, y, C)
        assert abs(model.objective - qp_objective(K, y, alpha)) < 1e-6
        f_smo = decision_function(model, K_test)
        f_oracle = K_test @ (alpha * y) + qp_bias(K, y, C, alpha)
        np.testing.assert_array_equal(np.sign(f_smo), np.sign(f_oracle))


def test_objective_monotone_in_iteration_budget():
    rng = np.random.default_rng(2)
    K, y, C, _ = random_svm_problem(rng, max_m=12)
    objectives = [
        fit_binary(K, y, C, tol=1e-10, max_iter=cap).objective for cap in (1, 2, 4, 8, 16, 64)
    ]
    assert all(b >= a - 1e-12 for a, b in zip(objectives, objectives[1:]))


def test_duplicating_a_free_support_vector_keeps_predictions():
    # separable data with generous C: every support vector stays strictly
    # inside the box, so an added duplicate cannot change the optimum
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(loc=-2.0, size=(6, 2)), rng.normal(loc=2.0, size=(6, 2))])
    y = np.array([-1.0] * 6 + [1.0] * 6)
    K = gram_rbf(X, gamma=0.5).values
    X_test = rng.normal(size=(8, 2))
    Kt = gram_rbf(X_test, X, gamma=0.5).values
    model = fit_binary(K, y, C=100.0, tol=1e-8)
    assert np.all(model.dual_coefs * y[model.support_idx] < 100.0)
    base_pred = np.sign(decision_function(model, Kt))

    dup = model.support_idx[0]
    X_dup = np.vstack([X, X[dup]])
    y_dup = np.append(y, y[dup])
    K_dup = gram_rbf(X_dup, gamma=0.5).values
    Kt_dup = gram_rbf(X_test, X_dup, gamma=0.5).values
    model_dup = fit_binary(K_dup, y_dup, C=100.0, tol=1e-8)
    np.testing.assert_array_equal(np.sign(decision_function(model_dup, Kt_dup)), base_pred)


def test_fit_binary_validation():
    with pytest.raises(ValueError):
        fit_binary(np.eye(2), np.array([1.0, 1.0]), C=1.0)
    with pytest.raises(ValueError):
        fit_binary(np.eye(3), np.array([1.0, -1.0]), C=1.0)
    with pytest.raises(ValueError):
        fit_binary(np.eye(2), np.array([1.0, -1.0]), C=-1.0)


def test_decision_function_linearity_and_empty():
    model = fit_binary(np.eye(2), np.array([1.0, -1.0]), C=10.0)
    K_test = np.array([[0.2, 0.1]])
    f1 = decision_function(model, K_test)
    f2 = decision_function(model, 0.5 * K_test)
    assert abs((f2[0] - model.bias) - 0.5 * (f1[0] - model.bias)) < 1e-12
    assert decision_function(model, np.zeros((0, 2))).shape == (0,)


def test_decision_function_reproduces_training_labels_when_separable():
    rng = np.random.default_rng(4)
    X = np.vstack([rng.normal(-3.0, 0.3, (8, 2)), rng.normal(3.0, 0.3, (8, 2))])
    y = np.array([-1.0] * 8 + [1.0] * 8)
    K = gram_rbf(X, gamma=0.2).values
    model = fit_binary(K, y, C=50.0)
    np.testing.assert_array_equal(np.sign(decision_function(model, K)), y)


def test_multiclass_blobs():
    ds = make_synthetic("blobs", 60, noise=0.3, seed=5, n_classes=3)
    K = gram_rbf(ds.X, gamma=1.0).values
    pred = fit_predict_multiclass(K, ds.y, 10.0, K)
    assert accuracy(pred, ds.y) >= 0.95


def test_multiclass_two_classes_reduces_to_binary():
    rng = np.random.default_rng(6)
    K, y, C, K_test = random_svm_problem(rng)
    model = fit_binary(K, y, C)
    binary_pred = np.where(decision_function(model, K_test) > 0, 1.0, -1.0)
    np.testing.assert_array_equal(fit_predict_multiclass(K, y, C, K_test), binary_pred)


def test_multiclass_label_permutation_consistency():
    ds = make_synthetic("blobs", 45, noise=0.3, seed=7, n_classes=3)
    K = gram_rbf(ds.X, gamma=1.0).values
    pred = fit_predict_multiclass(K, ds.y, 10.0, K)
    relabel = {0: 5, 1: 3, 2: 9}
    y2 = np.array([relabel[v] for v in ds.y])
    pred2 = fit_predict_multiclass(K, y2, 10.0, K)
    np.testing.assert_array_equal(pred2, np.array([relabel[v] for v in pred]))


def test_accuracy_examples():
    assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy([1, 1], [0, 0]) == 0.0
    assert accuracy([1, 1, 0, 0], [1, 0, 0, 0]) == 0.75
    with pytest.raises(ValueError):
        accuracy([1, 2], [1, 2, 3])


def test_model_json_roundtrip(tmp_path):
    model = fit_binary(np.eye(2), np.array([1.0, -1.0]), C=10.0)
    path = svm.model_to_json(model, tmp_path / "model.json")
    back = svm.model_from_json(path)
    np.testing.assert_array_equal(back.dual_coefs, model.dual_coefs)
    np.testing.assert_array_equal(back.support_idx, model.support_idx)
    assert back.bias == model.bias and back.C == model.C
    assert back.n_train == model.n_train


def test_id_alignment_check():
    from qkbench.kernels import KernelMatrix

    model = fit_binary(
        KernelMatrix(np.eye(2), [0, 1], [0, 1], {}), np.array([1.0, -1.0]), C=1.0
    )
    good = KernelMatrix(np.array([[0.1, 0.2]]), [0], [0, 1], {})
    decision_function(model, good)
    bad = KernelMatrix(np.array([[0.1, 0.2]]), [0], [7, 8], {})
    with pytest.raises(ValueError):
        decision_function(model, bad)
