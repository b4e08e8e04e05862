"""Data-encoding states and the layered trainable ansatz.

Two encoders are provided: amplitude encoding of a whole feature vector
(kind "qamp", cyclically padded to 2^n) and a truncated coherent-state
encoding of a single scalar feature (kind "qrbf", Fock amplitudes
alpha^k / sqrt(k!) on a 2^n-dimensional space with alpha = x / (sqrt(2)*c)).

The ansatz applies, per layer: Ry(theta) on every qubit, then
Rz(s * phi * x) on every qubit (x re-uploaded data scalar), then a circular
CNOT chain. Layer gate order is fixed: all Ry first, then all Rz, then
CNOTs with ascending control index.
"""
from __future__ import annotations

import dataclasses
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import statevec
from .errors import EncodingError
from .statevec import StateVector, _apply_cnot_arr, _apply_ry_arr, _apply_rz_arr

log = logging.getLogger(__name__)

# Substituted for exactly-zero padded vectors (the MinMax minimum-sample edge case).
ZERO_INPUT_EPS = 1e-12


class CoherentTruncationWarning(UserWarning):
    """alpha^2 exceeds the truncated dimension; the encoding loses meaning."""


@dataclass(frozen=True)
class AnsatzParams:
    """Trainable angles: theta (Ry) and phi (Rz data couplings), each (L, N)."""

    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=np.float64)
        phi = np.asarray(self.phi, dtype=np.float64)
        if theta.ndim != 2 or theta.shape != phi.shape:
            raise ValueError(f"theta/phi must share an (L, N) shape, got {theta.shape} vs {phi.shape}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def n_layers(self) -> int:
        return self.theta.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.theta.shape[1]

    @property
    def n_params(self) -> int:
        return 2 * self.theta.size


@dataclass(frozen=True)
class EncoderSpec:
    """Which encoder to use and on how many qubits.

    length_scale is the QRBF hyperparameter c (relates to an RBF gamma via
    c = sqrt(1/(2*gamma))); it is ignored for qamp. The entangler is "ring"
    (control i -> i+1 mod N) or "two_neighbor" (i -> i+1 and i -> i+2, the
    extended QRBF variant; needs N >= 3).
    """

    kind: str
    n_qubits: int
    length_scale: float | None = None
    entangler: str = "ring"

    def __post_init__(self) -> None:
        if self.kind not in ("qamp", "qrbf"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.entangler not in ("ring", "two_neighbor"):
            raise ValueError(f"unknown entangler {self.entangler!r}")
        if self.entangler == "two_neighbor" and self.n_qubits < 3:
            raise ValueError("two_neighbor entangler needs at least 3 qubits")
        if self.kind == "qrbf":
            if self.length_scale is None or not self.length_scale > 0:
                raise ValueError("qrbf needs a positive length_scale")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


@dataclass(frozen=True)
class ResourceCount:
    cnots: int
    single_qubit_gates: int
    depth: int
    full_depth: int


def _entangler_pairs(n_qubits: int, entangler: str) -> list[tuple[int, int]]:
    if n_qubits == 1:
        return []
    if entangler == "ring":
        return [(i, (i + 1) % n_qubits) for i in range(n_qubits)]
    pairs = []
    for i in range(n_qubits):
        pairs.append((i, (i + 1) % n_qubits))
        pairs.append((i, (i + 2) % n_qubits))
    return pairs


def cyclic_pad(x: np.ndarray, target_len: int) -> np.ndarray:
    """Extend x to target_len (a power of two) by repeating its elements."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("input must be a nonempty 1-D vector")
    if target_len < x.size:
        raise ValueError(f"target length {target_len} shorter than input {x.size}")
    if target_len & (target_len - 1) != 0:
        raise ValueError(f"target length {target_len} is not a power of two")
    return x[np.arange(target_len) % x.size]


def encode_amplitude(x: np.ndarray, n_qubits: int) -> StateVector:
    """Cyclically pad, L2-normalise, and embed x as basis amplitudes."""
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise EncodingError("cannot amplitude-encode an all-zero vector")
    padded = cyclic_pad(x, 1 << n_qubits)
    return statevec.prepare_state(padded)


def encode_coherent(x: float, c: float, dim: int) -> StateVector:
    """Truncated coherent state for scalar x with length scale c on dim levels."""
    if not c > 0:
        raise ValueError("length scale c must be positive")
    if dim < 2 or dim & (dim - 1) != 0:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    alpha = float(x) / (np.sqrt(2.0) * c)
    if alpha * alpha > dim:
        warnings.warn(
            f"alpha^2 = {alpha * alpha:.3g} exceeds the truncated dimension {dim}",
            CoherentTruncationWarning,
            stacklevel=2,
        )
    amps = _coherent_rows(np.array([alpha]), dim)[0]
    n_qubits = dim.bit_length() - 1
    return StateVector(n_qubits, amps.astype(np.complex128))


def apply_ansatz(
    state: StateVector,
    params: AnsatzParams,
    s: float,
    x_reupload: float,
    adjoint: bool = False,
) -> StateVector:
    """Apply the L-layer ansatz (or its exact inverse) with re-uploaded scalar."""
    if params.n_qubits != state.n_qubits:
        raise ValueError(
            f"ansatz is on {params.n_qubits} qubits, state on {state.n_qubits}"
        )
    _check_scale(s)
    rz_angles = s * params.phi * float(x_reupload)
    amps = _apply_ansatz_arr(
        state.amps, state.n_qubits, params.theta, rz_angles, "ring", adjoint
    )
    return StateVector(state.n_qubits, amps)


def feature_state(
    x: np.ndarray,
    spec: EncoderSpec,
    params: AnsatzParams,
    s: float,
) -> StateVector | list[StateVector]:
    """Encoder + ansatz. qamp gives one state; qrbf one state per feature."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if params.n_qubits != spec.n_qubits:
        raise ValueError("ansatz and encoder qubit counts differ")
    _check_scale(s)
    if spec.kind == "qamp":
        padded = cyclic_pad(x, spec.dim)
        if not np.any(padded):
            log.warning("all-zero feature vector; substituting eps=%g amplitudes", ZERO_INPUT_EPS)
            padded = padded + ZERO_INPUT_EPS
        base = statevec.prepare_state(padded)
        return _ansatz_scalar(base, params, s, float(np.mean(x)), spec.entangler)
    states = []
    for xm in x:
        enc = encode_coherent(float(xm), spec.length_scale, spec.dim)
        states.append(_ansatz_scalar(enc, params, s, float(xm), spec.entangler))
    return states


def _ansatz_scalar(
    state: StateVector, params: AnsatzParams, s: float, x: float, entangler: str
) -> StateVector:
    amps = _apply_ansatz_arr(
        state.amps, state.n_qubits, params.theta, s * params.phi * x, entangler
    )
    return StateVector(state.n_qubits, amps)


def resource_count(spec: EncoderSpec, n_layers: int, n_qubits: int | None = None) -> ResourceCount:
    """Gate counts and depth of the L-layer ansatz (full_depth pairs it with its adjoint)."""
    if n_layers < 1:
        raise ValueError("n_layers must be >= 1")
    n = spec.n_qubits if n_qubits is None else n_qubits
    cnots_per_layer = len(_entangler_pairs(n, spec.entangler))
    depth = n_layers * (2 + cnots_per_layer)
    return ResourceCount(
        cnots=n_layers * cnots_per_layer,
        single_qubit_gates=2 * n_layers * n,
        depth=depth,
        full_depth=2 * depth,
    )


def extended_variant(spec: EncoderSpec, extra_qubits: int) -> EncoderSpec:
    """Grow the encoder by extra qubits (qamp: wider re-upload register;
    qrbf: larger Fock space plus the denser two-neighbor entangler)."""
    if extra_qubits < 0:
        raise ValueError("extra_qubits must be >= 0")
    if extra_qubits == 0:
        return spec
    if spec.kind == "qamp":
        return dataclasses.replace(spec, n_qubits=spec.n_qubits + extra_qubits)
    return dataclasses.replace(
        spec, n_qubits=spec.n_qubits + extra_qubits, entangler="two_neighbor"
    )


def _check_scale(s: float) -> None:
    if not np.isfinite(s) or s < 0:
        raise ValueError(f"scaling parameter must be finite and >= 0, got {s}")


# --- batched internals ---

def _apply_ansatz_arr(
    amps: np.ndarray,
    n: int,
    ry_angles: np.ndarray,
    rz_angles: np.ndarray,
    entangler: str,
    adjoint: bool = False,
) -> np.ndarray:
    """Run the layered circuit on (..., 2^n) amplitudes.

    Angle arrays have shape (..., L, N) with leading axes broadcastable
    against the amplitude batch axes.
    """
    ry = np.asarray(ry_angles, dtype=np.float64)
    rz = np.asarray(rz_angles, dtype=np.float64)
    n_layers = ry.shape[-2]
    pairs = _entangler_pairs(n, entangler)
    if not adjoint:
        for l in range(n_layers):
            for i in range(n):
                amps = _apply_ry_arr(amps, n, i, ry[..., l, i])
            for i in range(n):
                amps = _apply_rz_arr(amps, n, i, rz[..., l, i])
            for ctrl, tgt in pairs:
                amps = _apply_cnot_arr(amps, n, ctrl, tgt)
        return amps
    for l in reversed(range(n_layers)):
        for ctrl, tgt in reversed(pairs):
            amps = _apply_cnot_arr(amps, n, ctrl, tgt)
        for i in reversed(range(n)):
            amps = _apply_rz_arr(amps, n, i, -rz[..., l, i])
        for i in reversed(range(n)):
            amps = _apply_ry_arr(amps, n, i, -ry[..., l, i])
    return amps


def _pad_unit_rows(X: np.ndarray, dim: int) -> np.ndarray:
    """Cyclic-pad each row to dim and L2-normalise; eps-substitute zero rows."""
    X = np.asarray(X, dtype=np.float64)
    padded = X[:, np.arange(dim) % X.shape[1]]
    norms = np.linalg.norm(padded, axis=1)
    zero = norms == 0.0
    if np.any(zero):
        log.warning(
            "%d all-zero feature vector(s); substituting eps=%g amplitudes",
            int(zero.sum()),
            ZERO_INPUT_EPS,
        )
        padded[zero] += ZERO_INPUT_EPS
        norms = np.linalg.norm(padded, axis=1)
    return padded / norms[:, None]


def _coherent_rows(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Normalised truncated coherent amplitudes, one row per alpha.

    Uses a_{k+1} = a_k * alpha / sqrt(k+1) to avoid factorial overflow.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    amps = np.empty((alphas.size, dim), dtype=np.float64)
    amps[:, 0] = 1.0
    for k in range(1, dim):
        amps[:, k] = amps[:, k - 1] * alphas / np.sqrt(k)
    return amps / np.linalg.norm(amps, axis=1)[:, None]


def _encoded_batch(X: np.ndarray, spec: EncoderSpec) -> tuple[np.ndarray, np.ndarray]:
    """Pure encoding states plus per-state re-upload scalars.

    qamp: ((m, dim) states, (m,) feature means). qrbf: ((m, d, dim) states,
    (m, d) feature scalars).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-D sample matrix")
    if spec.kind == "qamp":
        return _pad_unit_rows(X, spec.dim).astype(np.complex128), X.mean(axis=1)
    m, d = X.shape
    alphas = (X / (np.sqrt(2.0) * spec.length_scale)).ravel()
    if np.any(alphas * alphas > spec.dim):
        warnings.warn(
            f"alpha^2 exceeds the truncated dimension {spec.dim} for some samples",
            CoherentTruncationWarning,
            stacklevel=2,
        )
    enc = _coherent_rows(alphas, spec.dim).astype(np.complex128)
    return enc.reshape(m, d, spec.dim), X


def _feature_states_batch(
    X: np.ndarray, spec: EncoderSpec, params: AnsatzParams, s: float
) -> np.ndarray:
    """Vectorised feature states: (m, dim) for qamp, (m, d, dim) for qrbf."""
    _check_scale(s)
    if params.n_qubits != spec.n_qubits:
        raise ValueError("ansatz and encoder qubit counts differ")
    enc, reup = _encoded_batch(X, spec)
    flat = enc.reshape(-1, spec.dim)
    rz = s * params.phi[None, :, :] * reup.reshape(-1)[:, None, None]
    ry = np.broadcast_to(params.theta, (flat.shape[0],) + params.theta.shape)
    out = _apply_ansatz_arr(flat, spec.n_qubits, ry, rz, spec.entangler)
    return out.reshape(enc.shape)
