"""Gram matrices for the quantum and classical kernels.

Quantum kernel entries are exact squared overlaps |<psi(x_i)|psi(x_j)>|^2
computed directly from statevectors (the infinite-shot limit). The explicit
invert-and-measure composition U(x2)^dag V(x2)^dag V(x1) U(x1) is kept behind
``method="adjoint"`` for equivalence checks only.

Symmetric (train) matrices mirror the computed upper triangle so K == K.T
holds exactly. Quantum/RBF entries are clamped into [0, 1] when within
CLAMP_SLACK of a bound; larger violations raise NumericalError.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import statevec
from .errors import NumericalError
from .featuremap import (
    AnsatzParams,
    EncoderSpec,
    _apply_ansatz_arr,
    _encoded_batch,
    _feature_states_batch,
)
from .statevec import StateVector

CLAMP_SLACK = 1e-9


@dataclass
class KernelMatrix:
    """Gram matrix plus provenance: kernel kind, hyperparameters, sample ids."""

    values: np.ndarray
    row_ids: list
    col_ids: list
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<a|b>|^2."""
    ov = statevec.overlap(a, b)
    return float(ov.real * ov.real + ov.imag * ov.imag)


def _clamp_unit(values: np.ndarray) -> np.ndarray:
    low, high = float(values.min()), float(values.max())
    if low < -CLAMP_SLACK or high > 1.0 + CLAMP_SLACK:
        raise NumericalError(
            f"kernel entries outside [0,1] beyond slack: min={low!r}, max={high!r}"
        )
    return np.clip(values, 0.0, 1.0)


def _mirror_upper(K: np.ndarray) -> np.ndarray:
    return np.triu(K) + np.triu(K, 1).T


def _make_km(values, kind, hyper, symmetric) -> KernelMatrix:
    m, n = values.shape
    meta = {"kind": kind, "hyperparameters": hyper, "symmetric": symmetric}
    return KernelMatrix(values, list(range(m)), list(range(n)), meta)


def _quantum_hyper(spec: EncoderSpec, params: AnsatzParams, s: float) -> dict:
    hyper = {"s": s, "n_qubits": spec.n_qubits, "n_layers": params.n_layers}
    if spec.kind == "qrbf":
        hyper["c"] = spec.length_scale
    if spec.entangler != "ring":
        hyper["entangler"] = spec.entangler
    return hyper


def gram_qamp(
    X1: np.ndarray,
    X2: np.ndarray | None,
    spec: EncoderSpec,
    params: AnsatzParams,
    s: float,
    method: str = "direct",
) -> KernelMatrix:
    """Amplitude-encoded fidelity kernel; X2=None computes the symmetric train Gram."""
    if spec.kind != "qamp":
        raise ValueError("gram_qamp needs a qamp encoder spec")
    if method == "adjoint":
        return _gram_adjoint(X1, X2, spec, params, s)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    X1 = np.asarray(X1, dtype=np.float64)
    symmetric = X2 is None or X2 is X1
    A1 = _feature_states_batch(X1, spec, params, s)
    A2 = A1 if symmetric else _feature_states_batch(np.asarray(X2, np.float64), spec, params, s)
    K = _clamp_unit(np.abs(A1.conj() @ A2.T) ** 2)
    if symmetric:
        K = _mirror_upper(K)
    return _make_km(K, "qamp", _quantum_hyper(spec, params, s), symmetric)


def gram_qrbf(
    X1: np.ndarray,
    X2: np.ndarray | None,
    spec: EncoderSpec,
    params: AnsatzParams,
    s: float,
    c: float | None = None,
    method: str = "direct",
) -> KernelMatrix:
    """Feature-wise coherent-state kernel, averaged over the d features."""
    if spec.kind != "qrbf":
        raise ValueError("gram_qrbf needs a qrbf encoder spec")
    if c is not None:
        spec = EncoderSpec("qrbf", spec.n_qubits, c, spec.entangler)
    if method == "adjoint":
        return _gram_adjoint(X1, X2, spec, params, s)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    X1 = np.asarray(X1, dtype=np.float64)
    symmetric = X2 is None or X2 is X1
    A1 = _feature_states_batch(X1, spec, params, s)
    A2 = A1 if symmetric else _feature_states_batch(np.asarray(X2, np.float64), spec, params, s)
    if A1.shape[1] != A2.shape[1]:
        raise ValueError("feature dimensions differ between X1 and X2")
    G = np.einsum("imk,jmk->ijm", A1.conj(), A2)
    K = _clamp_unit((np.abs(G) ** 2).mean(axis=2))
    if symmetric:
        K = _mirror_upper(K)
    return _make_km(K, "qrbf", _quantum_hyper(spec, params, s), symmetric)


def gram_quantum(
    X1: np.ndarray,
    X2: np.ndarray | None,
    spec: EncoderSpec,
    params: AnsatzParams,
    s: float,
) -> KernelMatrix:
    """Dispatch on the encoder kind."""
    if spec.kind == "qamp":
        return gram_qamp(X1, X2, spec, params, s)
    return gram_qrbf(X1, X2, spec, params, s)


def _gram_adjoint(X1, X2, spec, params, s) -> KernelMatrix:
    # Verification path: each entry is |<enc(x2)| V(x2)^dag V(x1) |enc(x1)>|^2,
    # the survival probability of the invert-and-measure circuit. Slow loops
    # on purpose; equivalence tests compare it against the direct path.
    X1 = np.asarray(X1, dtype=np.float64)
    symmetric = X2 is None or X2 is X1
    X2a = X1 if symmetric else np.asarray(X2, dtype=np.float64)
    enc1, reup1 = _encoded_batch(X1, spec)
    enc2, reup2 = (enc1, reup1) if symmetric else _encoded_batch(X2a, spec)
    n = spec.n_qubits
    per_feature = spec.kind == "qrbf"
    m1, m2 = enc1.shape[0], enc2.shape[0]
    K = np.empty((m1, m2))

    def entry(e1, r1, e2, r2) -> float:
        st = _apply_ansatz_arr(e1, n, params.theta, s * params.phi * r1, spec.entangler)
        st = _apply_ansatz_arr(st, n, params.theta, s * params.phi * r2, spec.entangler, adjoint=True)
        ov = np.vdot(e2, st)
        return float(ov.real**2 + ov.imag**2)

    for i in range(m1):
        start = i if symmetric else 0
        for j in range(start, m2):
            if per_feature:
                K[i, j] = float(
                    np.mean(
                        [
                            entry(enc1[i, f], reup1[i, f], enc2[j, f], reup2[j, f])
                            for f in range(enc1.shape[1])
                        ]
                    )
                )
            else:
                K[i, j] = entry(enc1[i], reup1[i], enc2[j], reup2[j])
            if symmetric and j != i:
                K[j, i] = K[i, j]
    K = _clamp_unit(K)
    return _make_km(K, spec.kind, _quantum_hyper(spec, params, s), symmetric)


def resolve_gamma(gamma: float | str, X: np.ndarray) -> float:
    """Resolve the RBF width: "scale" = 1/(d*var(X)), "auto" = 1/d, or a number."""
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[1]
    if gamma == "scale":
        var = float(X.var())
        if var == 0.0:
            raise NumericalError("gamma='scale' undefined for constant data")
        return 1.0 / (d * var)
    if gamma == "auto":
        return 1.0 / d
    g = float(gamma)
    if not g > 0:
        raise ValueError(f"gamma must be positive, got {g}")
    return g


def gram_linear(X1: np.ndarray, X2: np.ndarray | None = None) -> KernelMatrix:
    """Plain inner products <x_i, x_j>."""
    X1 = np.asarray(X1, dtype=np.float64)
    symmetric = X2 is None or X2 is X1
    X2a = X1 if symmetric else np.asarray(X2, dtype=np.float64)
    K = X1 @ X2a.T
    if symmetric:
        K = _mirror_upper(K)
    return _make_km(K, "linear", {}, symmetric)


def gram_rbf(X1: np.ndarray, X2: np.ndarray | None = None, gamma: float | str = "scale") -> KernelMatrix:
    """Gaussian kernel exp(-gamma * ||x_i - x_j||^2); named gammas resolve on X1."""
    X1 = np.asarray(X1, dtype=np.float64)
    g = resolve_gamma(gamma, X1)
    symmetric = X2 is None or X2 is X1
    X2a = X1 if symmetric else np.asarray(X2, dtype=np.float64)
    sq1 = (X1 * X1).sum(axis=1)
    sq2 = (X2a * X2a).sum(axis=1)
    d2 = np.maximum(sq1[:, None] + sq2[None, :] - 2.0 * (X1 @ X2a.T), 0.0)
    K = np.exp(-g * d2)
    if symmetric:
        np.fill_diagonal(K, 1.0)
        K = _mirror_upper(K)
    return _make_km(K, "rbf", {"gamma": g}, symmetric)


def save_kernel(km: KernelMatrix, base_path: str | Path) -> tuple[Path, Path]:
    """Write values to <base>.csv and ids/meta to <base>.meta.json."""
    base = Path(base_path)
    csv_path = base.with_suffix(".csv")
    meta_path = base.with_suffix(".meta.json")
    np.savetxt(csv_path, km.values, delimiter=",", fmt="%.17g")
    sidecar = {"row_ids": km.row_ids, "col_ids": km.col_ids, "meta": km.meta}
    meta_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def load_kernel(base_path: str | Path) -> KernelMatrix:
    """Inverse of save_kernel."""
    base = Path(base_path)
    values = np.atleast_2d(np.loadtxt(base.with_suffix(".csv"), delimiter=","))
    sidecar = json.loads(base.with_suffix(".meta.json").read_text())
    return KernelMatrix(values, sidecar["row_ids"], sidecar["col_ids"], sidecar["meta"])
