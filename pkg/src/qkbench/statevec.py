"""Dense statevector engine for small circuits.

Convention: qubit 0 is the *most significant* bit of the basis-state index,
so for n qubits the basis label |q0 q1 ... q_{n-1}> maps to the integer
q0*2^(n-1) + ... + q_{n-1}. Amplitudes are complex128 and every public
operation returns a fresh StateVector; inputs are never modified.

The private ``_apply_*`` helpers accept amplitude arrays with arbitrary
leading batch axes and per-entry angle arrays; they back the vectorised
feature-map and gradient paths elsewhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeError

# 2^24 complex128 amplitudes = 256 MiB; anything larger is a config mistake here.
MAX_QUBITS = 24


@dataclass(frozen=True)
class StateVector:
    """Pure n-qubit state: unit-norm complex amplitudes of length 2^n_qubits."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude length {self.amps.shape} does not match "
                f"2^{self.n_qubits} for {self.n_qubits} qubits"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _check_qubit_count(n_qubits: int) -> None:
    if n_qubits < 1:
        raise SizeError(f"need at least 1 qubit, got {n_qubits}")
    if n_qubits > MAX_QUBITS:
        raise SizeError(f"{n_qubits} qubits exceed the cap of {MAX_QUBITS}")


def zero_state(n_qubits: int) -> StateVector:
    """|0...0> on the given number of qubits."""
    _check_qubit_count(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def prepare_state(amps: np.ndarray) -> StateVector:
    """Normalise an arbitrary amplitude vector into a state (length 2^n)."""
    amps = np.asarray(amps, dtype=np.complex128)
    if amps.ndim != 1 or amps.size < 2 or (amps.size & (amps.size - 1)) != 0:
        raise ValueError(f"amplitude length {amps.size} is not a power of two >= 2")
    n_qubits = amps.size.bit_length() - 1
    _check_qubit_count(n_qubits)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("cannot prepare a state from the all-zero vector")
    return StateVector(n_qubits, amps / norm)


def _check_wire(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.n_qubits} qubits")


# --- array kernels (support (..., 2^n) batches and broadcastable angles) ---

def _apply_ry_arr(amps: np.ndarray, n: int, qubit: int, theta) -> np.ndarray:
    a = amps.reshape(amps.shape[:-1] + (1 << qubit, 2, -1))
    half = 0.5 * np.asarray(theta, dtype=np.float64)
    c = np.cos(half)[..., None, None]
    s = np.sin(half)[..., None, None]
    out = np.empty_like(a)
    out[..., 0, :] = c * a[..., 0, :] - s * a[..., 1, :]
    out[..., 1, :] = s * a[..., 0, :] + c * a[..., 1, :]
    return out.reshape(amps.shape)


def _apply_rz_arr(amps: np.ndarray, n: int, qubit: int, phi) -> np.ndarray:
    a = amps.reshape(amps.shape[:-1] + (1 << qubit, 2, -1))
    half = 0.5 * np.asarray(phi, dtype=np.float64)
    phase = np.exp(1j * half)[..., None, None]
    out = np.empty_like(a)
    out[..., 0, :] = np.conj(phase) * a[..., 0, :]
    out[..., 1, :] = phase * a[..., 1, :]
    return out.reshape(amps.shape)


def _apply_cnot_arr(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    lo, hi = (control, target) if control < target else (target, control)
    a = amps.reshape(
        amps.shape[:-1] + (1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (n - hi - 1))
    )
    out = a.copy()
    if control < target:
        out[..., 1, :, 0, :] = a[..., 1, :, 1, :]
        out[..., 1, :, 1, :] = a[..., 1, :, 0, :]
    else:
        out[..., 0, :, 1, :] = a[..., 1, :, 1, :]
        out[..., 1, :, 1, :] = a[..., 0, :, 1, :]
    return out.reshape(amps.shape)


# --- public single-state gates ---

def apply_ry(state: StateVector, qubit: int, theta: float) -> StateVector:
    """Rotation about Y: [[cos t/2, -sin t/2], [sin t/2, cos t/2]]."""
    _check_wire(state, qubit)
    return StateVector(state.n_qubits, _apply_ry_arr(state.amps, state.n_qubits, qubit, theta))


def apply_rz(state: StateVector, qubit: int, phi: float) -> StateVector:
    """Rotation about Z: diag(e^{-i phi/2}, e^{+i phi/2})."""
    _check_wire(state, qubit)
    return StateVector(state.n_qubits, _apply_rz_arr(state.amps, state.n_qubits, qubit, phi))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip the target bit on basis states whose control bit is 1."""
    _check_wire(state, control)
    _check_wire(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    return StateVector(
        state.n_qubits, _apply_cnot_arr(state.amps, state.n_qubits, control, target)
    )


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b> = sum conj(a_i) * b_i."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amps, b.amps))
