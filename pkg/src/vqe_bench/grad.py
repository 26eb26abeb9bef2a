"""Energy objective and its gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vqe_bench.ansatz import AnsatzInstance
from vqe_bench.pauli import PauliSum
from vqe_bench.sim import Circuit, GateKind, expectation_exact, expectation_sampled, run_circuit

FD_STEP = 1e-4
_SHIFTABLE = frozenset({GateKind.RX, GateKind.RZ})


class UnsupportedModeError(RuntimeError):
    """The requested gradient is not defined for this objective."""


@dataclass(frozen=True)
class Sampled:
    shots: int = 1024
    seed: int = 0


EXACT = "exact"


@dataclass
class EnergyFn:
    """``E(theta) = <psi(theta)|H|psi(theta)>`` with an evaluation counter.

    In sampled mode each evaluation draws from a generator seeded with
    ``(seed, eval_count)``, so a run is reproducible while successive
    evaluations see independent shot noise.
    """

    circuit: Circuit
    hamiltonian: PauliSum
    mode: str | Sampled = EXACT
    eval_count: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if isinstance(self.circuit, AnsatzInstance):
            self.circuit = self.circuit.circuit
        if self.hamiltonian.n_qubits != self.circuit.n_qubits:
            raise ValueError(
                f"{self.hamiltonian.n_qubits}-qubit Hamiltonian with a {self.circuit.n_qubits}-qubit circuit"
            )
        if not self.hamiltonian.is_hermitian():
            raise ValueError("Hamiltonian is not Hermitian")
        if self.mode != EXACT and not isinstance(self.mode, Sampled):
            raise ValueError(f"mode must be 'exact' or Sampled(...), got {self.mode!r}")

    @property
    def n_params(self) -> int:
        return self.circuit.n_params

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def __call__(self, theta) -> float:
        return energy(self, theta)


def energy(f: EnergyFn, theta) -> float:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != f.n_params:
        raise ValueError(f"expected {f.n_params} parameters, got {theta.size}")
    state = run_circuit(f.circuit, theta)
    if f.exact:
        value = expectation_exact(state, f.hamiltonian)
    else:
        rng = np.random.default_rng([f.mode.seed, f.eval_count])
        value = expectation_sampled(state, f.hamiltonian, f.mode.shots, rng)
    f.eval_count += 1
    return value


def gradient_fd(f: EnergyFn, theta, h: float = FD_STEP) -> np.ndarray:
    """Central finite differences, two evaluations per parameter.

    Raises:
        UnsupportedModeError: ``f`` samples shots; use SPSA instead.
    """
    if not f.exact:
        raise UnsupportedModeError("finite differences need exact expectations; use SPSA under shot sampling")
    theta = np.asarray(theta, dtype=float).reshape(-1)
    grad = np.zeros(theta.size)
    for i in range(theta.size):
        step = np.zeros(theta.size)
        step[i] = h
        grad[i] = (energy(f, theta + step) - energy(f, theta - step)) / (2 * h)
    return grad


def shiftable_params(c: Circuit) -> list[int]:
    """Parameters that feed exactly one gate, an RX or RZ."""
    fed: dict[int, list[GateKind]] = {}
    for op in c.ops:
        if op.param_index is not None:
            fed.setdefault(op.param_index, []).append(op.kind)
    return sorted(i for i, ks in fed.items() if len(ks) == 1 and ks[0] in _SHIFTABLE)


def gradient_shift_rx_rz(f: EnergyFn, theta, index: int) -> float:
    """Two-term parameter-shift derivative for a Pauli-rotation parameter.

    Raises:
        UnsupportedModeError: the parameter feeds more than one gate, or a
            gate whose generator has more than two eigenvalues (CRX,
            excitation gates).
    """
    fed = [op.kind for op in f.circuit.ops if op.param_index == index]
    if not fed:
        raise ValueError(f"parameter {index} feeds no gate")
    if len(fed) > 1 or fed[0] not in _SHIFTABLE:
        names = ", ".join(k.value for k in fed)
        raise UnsupportedModeError(f"parameter {index} feeds {names}; the two-term shift rule is inexact there")
    theta = np.asarray(theta, dtype=float).reshape(-1)
    shift = np.zeros(theta.size)
    shift[index] = np.pi / 2
    return (energy(f, theta + shift) - energy(f, theta - shift)) / 2
