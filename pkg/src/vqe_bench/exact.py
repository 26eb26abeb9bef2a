"""Exact-diagonalization ground energies for qubit Hamiltonians."""

from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from vqe_bench.pauli import CapacityError, PauliSum
from vqe_bench.sim import apply_pauli_sum

DENSE_MAX_QUBITS = 12
DENSE_HARD_MAX_QUBITS = 14
ITERATIVE_MAX_QUBITS = 20
RESIDUAL_TOL = 1e-9


def sector_indices(n_qubits: int, n_particles: int) -> np.ndarray:
    """Basis indices with exactly ``n_particles`` set bits."""
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    return idx[np.bitwise_count(idx) == n_particles]


def _dense_sector(h: PauliSum, cols: np.ndarray) -> np.ndarray:
    # Builds only the rows/columns that are needed, column by column.
    dim = 1 << h.n_qubits
    pos = np.full(dim, -1, dtype=np.int64)
    pos[cols] = np.arange(cols.size)
    mat = np.zeros((cols.size, cols.size), dtype=complex)
    for x, d in h.grouped_phases():
        rows = cols ^ x
        keep = pos[rows] >= 0
        mat[pos[rows[keep]], np.nonzero(keep)[0]] += d[cols[keep]]
    return mat


def dense_ground_energy(h: PauliSum, n_particles: int | None = None) -> float:
    n = h.n_qubits
    if n > DENSE_HARD_MAX_QUBITS:
        raise CapacityError(f"dense eigensolve of {n} qubits exceeds the {DENSE_HARD_MAX_QUBITS}-qubit limit")
    cols = np.arange(1 << n, dtype=np.int64) if n_particles is None else sector_indices(n, n_particles)
    if cols.size == 0:
        raise ValueError(f"no basis states with {n_particles} particles on {n} qubits")
    mat = _dense_sector(h, cols)
    if not mat.imag.any():
        # Real-symmetric solve is several times faster, and molecular Hamiltonians are real.
        mat = mat.real
    return float(np.linalg.eigvalsh(mat)[0])


def lanczos_ground_energy(h: PauliSum, n_particles: int | None = None, seed: int = 0) -> float:
    """Smallest eigenvalue by ARPACK's implicitly restarted Lanczos, matrix-free.

    A particle-number sector is selected by lifting every state outside it
    above the spectrum, which leaves the sector's eigenvalues unchanged for
    a Hamiltonian that conserves particle number.
    """
    n = h.n_qubits
    if n > ITERATIVE_MAX_QUBITS:
        raise CapacityError(f"iterative eigensolve of {n} qubits exceeds the {ITERATIVE_MAX_QUBITS}-qubit limit")
    dim = 1 << n
    mask = None
    if n_particles is not None:
        idx = np.arange(dim, dtype=np.int64)
        mask = np.bitwise_count(idx) == n_particles
        if not mask.any():
            raise ValueError(f"no basis states with {n_particles} particles on {n} qubits")
        lift = 2.0 * sum(abs(c) for _, _, c in h.masks()) + 1.0

    def matvec(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if mask is None:
            return apply_pauli_sum(h, v)
        inside = np.where(mask, v, 0.0)
        out = apply_pauli_sum(h, inside)
        out = np.where(mask, out, lift * v)
        return out

    op = LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim) + 0j
    if mask is not None:
        v0 = np.where(mask, v0, 0.0)
    if dim <= 2:
        return dense_ground_energy(h, n_particles)
    vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=1e-12, maxiter=10 * dim + 1000)
    lam = float(vals[0])
    vec = vecs[:, 0]
    residual = np.linalg.norm(matvec(vec) - lam * vec) / max(abs(lam), 1.0)
    if residual > RESIDUAL_TOL:
        raise ArithmeticError(f"Lanczos residual {residual:.2e} above {RESIDUAL_TOL:.0e}")
    return lam


def exact_ground_energy(h: PauliSum, n_particles: int | None = None, method: str = "auto") -> float:
    """Smallest eigenvalue of ``h``, optionally within a particle-number sector.

    ``method="auto"`` diagonalizes densely up to 12 qubits and switches to
    matrix-free Lanczos up to 20.

    Raises:
        ValueError: ``h`` is not Hermitian.
        CapacityError: too many qubits for the chosen path.
    """
    if not h.is_hermitian():
        raise ValueError("Hamiltonian is not Hermitian")
    if method == "auto":
        method = "dense" if h.n_qubits <= DENSE_MAX_QUBITS else "lanczos"
    if method == "dense":
        return dense_ground_energy(h, n_particles)
    if method == "lanczos":
        return lanczos_ground_energy(h, n_particles)
    raise ValueError(f"unknown method {method!r}")
