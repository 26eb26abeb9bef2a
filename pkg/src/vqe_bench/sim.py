"""Dense state-vector simulation.

Basis index bit ``q`` holds qubit ``q``. Multi-qubit gate matrices are written
with the first listed qubit as the most significant bit of the matrix index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vqe_bench.pauli import CapacityError, PauliSum

MAX_QUBITS = 24
NORM_TOL = 1e-10
RESIDUE_TOL = 1e-8


class GateKind(str, enum.Enum):
    PAULI_X = "PauliX"
    RX = "RX"
    RZ = "RZ"
    CNOT = "CNOT"
    CRX = "CRX"
    SINGLE_EXCITATION = "SingleExcitation"
    DOUBLE_EXCITATION = "DoubleExcitation"


ARITY = {
    GateKind.PAULI_X: 1,
    GateKind.RX: 1,
    GateKind.RZ: 1,
    GateKind.CNOT: 2,
    GateKind.CRX: 2,
    GateKind.SINGLE_EXCITATION: 2,
    GateKind.DOUBLE_EXCITATION: 4,
}
PARAMETRIC = frozenset({GateKind.RX, GateKind.RZ, GateKind.CRX, GateKind.SINGLE_EXCITATION, GateKind.DOUBLE_EXCITATION})


@dataclass(frozen=True)
class GateOp:
    """One gate; controlled gates list the control first."""

    kind: GateKind
    qubits: tuple[int, ...]
    param_index: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} acts on {ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if (self.kind in PARAMETRIC) != (self.param_index is not None):
            raise ValueError(f"{self.kind.value}: param_index must be given exactly for parameterized gates")

    def matrix(self, theta: float = 0.0) -> np.ndarray:
        return gate_matrix(self.kind, theta)


@dataclass
class Circuit:
    n_qubits: int
    ops: list[GateOp] = field(default_factory=list)
    n_params: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits > MAX_QUBITS:
            raise CapacityError(f"{self.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit state-vector limit")
        used = set()
        for op in self.ops:
            if max(op.qubits) >= self.n_qubits:
                raise ValueError(f"gate {op} addresses a qubit beyond {self.n_qubits}")
            if op.param_index is not None:
                if not 0 <= op.param_index < self.n_params:
                    raise ValueError(f"param_index {op.param_index} outside 0..{self.n_params - 1}")
                used.add(op.param_index)
        if len(used) != self.n_params:
            raise ValueError(f"parameters {sorted(set(range(self.n_params)) - used)} are never used")

    def __add__(self, other: "Circuit") -> "Circuit":
        """Concatenate; the parameters of ``other`` are renumbered after ours."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("circuits act on different numbers of qubits")
        shifted = [
            GateOp(op.kind, op.qubits, None if op.param_index is None else op.param_index + self.n_params)
            for op in other.ops
        ]
        return Circuit(self.n_qubits, self.ops + shifted, self.n_params + other.n_params)

    def without_parametric(self) -> "Circuit":
        return Circuit(self.n_qubits, [op for op in self.ops if op.param_index is None], 0)


# ----------------------------------------------------------------- gate matrices

def gate_matrix(kind: GateKind | str, theta: float = 0.0) -> np.ndarray:
    kind = GateKind(kind)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind is GateKind.PAULI_X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if kind is GateKind.CNOT:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m
    if kind is GateKind.CRX:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = gate_matrix(GateKind.RX, theta)
        return m
    if kind is GateKind.SINGLE_EXCITATION:
        m = np.eye(4, dtype=complex)
        # |01> = 1, |10> = 2
        m[1, 1], m[2, 1] = c, -s
        m[1, 2], m[2, 2] = s, c
        return m
    if kind is GateKind.DOUBLE_EXCITATION:
        m = np.eye(16, dtype=complex)
        # |0011> = 3, |1100> = 12
        m[12, 12], m[3, 12] = c, s
        m[3, 3], m[12, 3] = c, -s
        return m
    raise ValueError(f"unknown gate kind {kind}")


# ---------------------------------------------------------------- state vectors

@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits > MAX_QUBITS:
            raise CapacityError(f"{self.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit state-vector limit")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}")

    @classmethod
    def zeros(cls, n_qubits: int) -> "StateVector":
        if n_qubits > MAX_QUBITS:
            raise CapacityError(f"{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit state-vector limit")
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def apply_matrix(amps: np.ndarray, n_qubits: int, mat: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a ``2^k x 2^k`` matrix to ``qubits`` (first listed = most significant)."""
    k = len(qubits)
    psi = amps.reshape((2,) * n_qubits)
    # Tensor axis a holds qubit n-1-a.
    axes = [n_qubits - 1 - q for q in qubits]
    out = np.tensordot(mat.reshape((2,) * (2 * k)), psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


def apply_gate(state: StateVector, gate: GateOp, params: Sequence[float] | np.ndarray = ()) -> StateVector:
    """Return ``gate`` applied to ``state``; the input is left untouched.

    Raises:
        ValueError: a qubit index is out of range or ``params`` lacks the gate's entry.
    """
    if max(gate.qubits) >= state.n_qubits:
        raise ValueError(f"gate on qubits {gate.qubits} does not fit a {state.n_qubits}-qubit state")
    theta = 0.0
    if gate.param_index is not None:
        if gate.param_index >= len(params):
            raise ValueError(f"param_index {gate.param_index} but only {len(params)} parameters")
        theta = float(params[gate.param_index])
    amps = _apply(state.amplitudes, state.n_qubits, gate, theta)
    return StateVector(state.n_qubits, amps)


def _apply(amps: np.ndarray, n: int, gate: GateOp, theta: float) -> np.ndarray:
    kind = gate.kind
    if kind is GateKind.PAULI_X:
        idx = np.arange(amps.size) ^ (1 << gate.qubits[0])
        return amps[idx]
    if kind is GateKind.CNOT:
        ctrl, tgt = gate.qubits
        idx = np.arange(amps.size)
        idx = np.where((idx >> ctrl) & 1, idx ^ (1 << tgt), idx)
        return amps[idx]
    return apply_matrix(amps, n, gate_matrix(kind, theta), gate.qubits)


def run_circuit(c: Circuit, params: Sequence[float] | np.ndarray = ()) -> StateVector:
    """Apply ``c`` to ``|0...0>``."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != c.n_params:
        raise ValueError(f"circuit takes {c.n_params} parameters, got {params.size}")
    amps = StateVector.zeros(c.n_qubits).amplitudes
    for op in c.ops:
        theta = 0.0 if op.param_index is None else float(params[op.param_index])
        amps = _apply(amps, c.n_qubits, op, theta)
    return StateVector(c.n_qubits, amps)


# ------------------------------------------------------------------ expectation

def apply_pauli_sum(h: PauliSum, amps: np.ndarray) -> np.ndarray:
    """Matrix-free ``H|psi>``."""
    idx = np.arange(1 << h.n_qubits, dtype=np.int64)
    out = np.zeros(amps.shape, dtype=complex)
    for x, d in h.grouped_phases():
        if x == 0:
            out += d * amps
        else:
            out += (d * amps)[idx ^ x]
    return out


def _check_observable(state: StateVector, h: PauliSum) -> None:
    if h.n_qubits != state.n_qubits:
        raise ValueError(f"{h.n_qubits}-qubit observable on a {state.n_qubits}-qubit state")
    if not h.is_hermitian():
        raise ValueError("observable is not Hermitian")


def expectation_exact(state: StateVector, h: PauliSum) -> float:
    """``<psi|H|psi>`` for a Hermitian Pauli sum.

    Raises:
        ValueError: ``h`` is not Hermitian or has the wrong size.
        ArithmeticError: the imaginary part of the result is not negligible.
    """
    _check_observable(state, h)
    psi = state.amplitudes
    val = np.vdot(psi, apply_pauli_sum(h, psi))
    if abs(val.imag) >= RESIDUE_TOL:
        raise ArithmeticError(f"expectation value has imaginary residue {val.imag:.3e}")
    return float(val.real)


def sample_bitstrings(state: StateVector, shots: int, rng_seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Draw basis indices from ``|amplitude|^2`` by inverse-CDF lookup."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    cdf = np.cumsum(state.probabilities())
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(draws, cdf.size - 1)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1, -1j])
_Y_TO_Z = _H @ _SDG


def _rotate_to_z_basis(amps: np.ndarray, n: int, x: int, z: int) -> np.ndarray:
    for q in range(n):
        bit = 1 << q
        if x & bit:
            mat = _Y_TO_Z if z & bit else _H
            amps = apply_matrix(amps, n, mat, [q])
    return amps


def expectation_sampled(
    state: StateVector,
    h: PauliSum,
    shots: int,
    rng_seed: int | np.random.Generator | None = None,
) -> float:
    """Shot-sampled ``<psi|H|psi>``, measuring each non-identity term separately.

    Terms are visited in canonical order and draw from one generator, so the
    estimate is reproducible for a fixed seed.
    """
    _check_observable(state, h)
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    n = state.n_qubits
    total = 0.0
    for x, z, c in h.masks():
        if x == 0 and z == 0:
            total += c.real
            continue
        rotated = StateVector(n, _rotate_to_z_basis(state.amplitudes, n, x, z))
        outcomes = sample_bitstrings(rotated, shots, rng)
        parity = np.bitwise_count(outcomes & (x | z)) & 1
        total += c.real * float(np.mean(1.0 - 2.0 * parity))
    return total
