"""Gram builders against brute-force oracles, plus matrix invariants."""
import numpy as np
import pytest

from oracles import gram_bruteforce
from qkbench import statevec as sv
from qkbench.errors import NumericalError
from qkbench.featuremap import AnsatzParams, EncoderSpec
from qkbench.kernels import (
    _clamp_unit,
    fidelity,
    gram_linear,
    gram_qamp,
    gram_qrbf,
    gram_rbf,
    load_kernel,
    resolve_gamma,
    save_kernel,
)


def rand_params(rng, n_layers, n_qubits):
    return AnsatzParams(
        rng.uniform(0, 2 * np.pi, (n_layers, n_qubits)),
        rng.uniform(0, 2 * np.pi, (n_layers, n_qubits)),
    )


def test_fidelity_examples():
    zero = sv.zero_state(1)
    one = sv.StateVector(1, np.array([0, 1], dtype=complex))
    plus = sv.prepare_state([1.0, 1.0])
    assert fidelity(zero, zero) == 1.0
    assert fidelity(zero, one) == 0.0
    assert abs(fidelity(zero, plus) - 0.5) < 1e-15


def test_gram_qamp_single_sample_and_orthogonal():
    rng = np.random.default_rng(1)
    params = rand_params(rng, 2, 2)
    K = gram_qamp(np.array([[0.4, 0.7]]), None, EncoderSpec("qamp", 2), params, 0.3)
    np.testing.assert_allclose(K.values, [[1.0]], atol=1e-12)
    # one qubit, zero angles: the chain is empty, so one-hot samples stay orthogonal
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    zero = AnsatzParams(np.zeros((1, 1)), np.zeros((1, 1)))
    K = gram_qamp(X, None, EncoderSpec("qamp", 1), zero, 1.0)
    assert abs(K.values[0, 1]) < 1e-15


def test_gram_qamp_matches_bruteforce_oracle():
    rng = np.random.default_rng(2)
    params = rand_params(rng, 3, 2)
    spec = EncoderSpec("qamp", 2)
    X = rng.uniform(0, 1, (5, 3))
    K = gram_qamp(X, None, spec, params, 0.7).values
    np.testing.assert_allclose(K, gram_bruteforce(X, X, spec, params, 0.7), atol=1e-12)
    X2 = rng.uniform(0, 1, (3, 3))
    K12 = gram_qamp(X, X2, spec, params, 0.7).values
    np.testing.assert_allclose(K12, gram_bruteforce(X, X2, spec, params, 0.7), atol=1e-12)


def test_gram_qrbf_matches_bruteforce_oracle():
    rng = np.random.default_rng(3)
    params = rand_params(rng, 2, 2)
    spec = EncoderSpec("qrbf", 2, 0.9)
    X = rng.uniform(0, 1, (4, 3))
    K = gram_qrbf(X, None, spec, params, 0.5).values
    np.testing.assert_allclose(K, gram_bruteforce(X, X, spec, params, 0.5), atol=1e-12)


def test_gram_qrbf_identical_samples_and_single_feature():
    rng = np.random.default_rng(4)
    params = rand_params(rng, 2, 2)
    spec = EncoderSpec("qrbf", 2, 1.0)
    X = np.array([[0.3], [0.3]])
    K = gram_qrbf(X, None, spec, params, 0.8).values
    np.testing.assert_allclose(K, np.ones((2, 2)), atol=1e-12)


def test_gram_qrbf_untrained_matches_analytic_rbf():
    # zero angles and s=0 leave only the encoding; at dim 64 that is the RBF kernel
    zero = AnsatzParams(np.zeros((1, 6)), np.zeros((1, 6)))
    spec = EncoderSpec("qrbf", 6, 1.0)
    rng = np.random.default_rng(5)
    X = rng.uniform(0, 1, (6, 3))
    K = gram_qrbf(X, None, spec, zero, 0.0).values
    gamma = 1.0 / (2 * 1.0**2)
    expected = np.mean(
        [
            np.exp(-gamma * np.subtract.outer(X[:, f], X[:, f]) ** 2)
            for f in range(X.shape[1])
        ],
        axis=0,
    )
    np.testing.assert_allclose(K, expected, atol=1e-6)


def test_adjoint_method_matches_direct():
    rng = np.random.default_rng(6)
    params = rand_params(rng, 2, 2)
    X = rng.uniform(0, 1, (4, 2))
    qamp = EncoderSpec("qamp", 2)
    np.testing.assert_allclose(
        gram_qamp(X, None, qamp, params, 0.6, method="adjoint").values,
        gram_qamp(X, None, qamp, params, 0.6).values,
        atol=1e-12,
    )
    qrbf = EncoderSpec("qrbf", 2, 1.1)
    np.testing.assert_allclose(
        gram_qrbf(X, None, qrbf, params, 0.6, method="adjoint").values,
        gram_qrbf(X, None, qrbf, params, 0.6).values,
        atol=1e-12,
    )


def test_classical_kernel_examples():
    np.testing.assert_array_equal(gram_linear([[1.0, 0.0]], [[0.0, 1.0]]).values, [[0.0]])
    K = gram_rbf(np.array([[0.1, 0.2], [0.5, 0.9]]), gamma=2.0)
    np.testing.assert_allclose(np.diag(K.values), 1.0, atol=1e-15)
    K01 = gram_rbf(np.array([[0.0]]), np.array([[1.0]]), gamma=1.0)
    np.testing.assert_allclose(K01.values, [[np.exp(-1.0)]], atol=1e-15)


def test_gamma_conventions():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(10, 4))
    assert resolve_gamma("auto", X) == 0.25
    assert abs(resolve_gamma("scale", X) - 1.0 / (4 * X.var())) < 1e-15
    assert resolve_gamma(0.3, X) == 0.3
    with pytest.raises(ValueError):
        resolve_gamma(-1.0, X)


def test_symmetry_psd_range_invariants():
    rng = np.random.default_rng(8)
    X = rng.uniform(0, 1, (30, 4))
    params = rand_params(rng, 2, 2)
    grams = {
        "linear": gram_linear(X).values,
        "rbf": gram_rbf(X, gamma="scale").values,
        "qamp": gram_qamp(X, None, EncoderSpec("qamp", 2), params, 0.5).values,
        "qrbf": gram_qrbf(X, None, EncoderSpec("qrbf", 2, 1.0), params, 0.5).values,
    }
    for name, K in grams.items():
        assert np.abs(K - K.T).max() < 1e-10, name
        assert np.linalg.eigvalsh(K).min() >= -1e-8, name
        if name != "linear":
            assert np.abs(np.diag(K) - 1.0).max() < 1e-10, name
            assert K.min() >= 0.0 and K.max() <= 1.0 + 1e-10, name


def test_permutation_equivariance():
    rng = np.random.default_rng(9)
    X = rng.uniform(0, 1, (6, 3))
    params = rand_params(rng, 2, 2)
    spec = EncoderSpec("qamp", 2)
    K = gram_qamp(X, None, spec, params, 0.4).values
    perm = rng.permutation(6)
    K_perm = gram_qamp(X[perm], None, spec, params, 0.4).values
    np.testing.assert_allclose(K_perm, K[np.ix_(perm, perm)], atol=1e-14)


def test_clamp_policy():
    nudged = np.array([[1.0 + 5e-10, 0.2], [0.2, -3e-10]])
    out = _clamp_unit(nudged)
    assert out.max() == 1.0 and out.min() == 0.0
    with pytest.raises(NumericalError):
        _clamp_unit(np.array([[1.1]]))


def test_kernel_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(10)
    X = rng.uniform(0, 1, (4, 3))
    km = gram_rbf(X, gamma=0.5)
    save_kernel(km, tmp_path / "gram")
    back = load_kernel(tmp_path / "gram")
    np.testing.assert_allclose(back.values, km.values, atol=1e-15)
    assert back.meta == km.meta
    assert back.row_ids == km.row_ids
