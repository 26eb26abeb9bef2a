"""Particle-conserving ansatz circuits on a Hartree-Fock reference."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from vqe_bench.sim import Circuit, GateKind, GateOp

KINDS = ("dexcg", "pcu2", "uccsd", "kupccgsd")
_ALIASES = {
    "dexcg": "dexcg",
    "double_excitation": "dexcg",
    "pcu2": "pcu2",
    "particleconservingu2": "pcu2",
    "uccsd": "uccsd",
    "kupccgsd": "kupccgsd",
    "k-upccgsd": "kupccgsd",
}
DEFAULT_LAYERS = 2
DEFAULT_K = 3


class AnsatzError(ValueError):
    """The requested ansatz cannot be built for this electron configuration."""


@dataclass(frozen=True)
class ElectronConfig:
    n_electrons: int
    n_spin_orbitals: int

    def __post_init__(self) -> None:
        if self.n_spin_orbitals < 1:
            raise ValueError("n_spin_orbitals must be positive")
        if not 0 <= self.n_electrons <= self.n_spin_orbitals:
            raise ValueError(f"{self.n_electrons} electrons do not fit {self.n_spin_orbitals} spin orbitals")

    @property
    def n_qubits(self) -> int:
        return self.n_spin_orbitals


@dataclass(frozen=True)
class ExcitationList:
    singles: tuple[tuple[int, int], ...] = ()
    doubles: tuple[tuple[int, int, int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.singles) + len(self.doubles)


def _sz(mode: int) -> int:
    return 1 if mode % 2 == 0 else -1


def hf_prep(cfg: ElectronConfig) -> Circuit:
    """Flip the lowest ``n_electrons`` qubits."""
    ops = [GateOp(GateKind.PAULI_X, (q,)) for q in range(cfg.n_electrons)]
    return Circuit(cfg.n_qubits, ops, 0)


def enumerate_excitations(cfg: ElectronConfig, generalized: bool = False, paired_doubles: bool = False) -> ExcitationList:
    """Spin-conserving excitations in ascending lexicographic order.

    Standard mode moves electrons from the occupied modes of the reference to
    virtual ones. Generalized mode takes every same-spin pair ``p < q`` as a
    single, and (with ``paired_doubles``) every transfer of an electron pair
    between two spatial orbitals as a double.
    """
    n, ne = cfg.n_spin_orbitals, cfg.n_electrons
    if not generalized:
        occ, virt = range(ne), range(ne, n)
        singles = [(i, a) for i in occ for a in virt if i % 2 == a % 2]
        doubles = [
            (i, j, a, b)
            for i, j in combinations(occ, 2)
            for a, b in combinations(virt, 2)
            if _sz(i) + _sz(j) == _sz(a) + _sz(b)
        ]
        return ExcitationList(tuple(singles), tuple(doubles))

    singles = [(p, q) for p, q in combinations(range(n), 2) if p % 2 == q % 2]
    doubles: list[tuple[int, int, int, int]] = []
    if paired_doubles:
        n_spatial = n // 2
        doubles = [
            (2 * p, 2 * p + 1, 2 * q, 2 * q + 1)
            for p in range(n_spatial)
            for q in range(n_spatial)
            if p != q
        ]
    else:
        for i, j in combinations(range(n), 2):
            for a, b in combinations(range(n), 2):
                if len({i, j, a, b}) == 4 and (i, j) < (a, b) and _sz(i) + _sz(j) == _sz(a) + _sz(b):
                    doubles.append((i, j, a, b))
    return ExcitationList(tuple(sorted(singles)), tuple(sorted(doubles)))


@dataclass(frozen=True)
class AnsatzInstance:
    kind: str
    cfg: ElectronConfig
    circuit: Circuit
    n_params: int
    excitations: ExcitationList = field(default_factory=ExcitationList)
    layers: int | None = None
    k: int | None = None

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits


def _excitation_ops(exc: ExcitationList, offset: int) -> list[GateOp]:
    ops = []
    idx = offset
    for s in exc.singles:
        ops.append(GateOp(GateKind.SINGLE_EXCITATION, s, idx))
        idx += 1
    for d in exc.doubles:
        ops.append(GateOp(GateKind.DOUBLE_EXCITATION, d, idx))
        idx += 1
    return ops


def normalize_kind(kind: str) -> str:
    key = kind.strip().lower().replace(" ", "")
    if key not in _ALIASES:
        raise AnsatzError(f"unknown ansatz kind {kind!r}; choose from {', '.join(KINDS)}")
    return _ALIASES[key]


def build_ansatz(kind: str, cfg: ElectronConfig, layers: int = DEFAULT_LAYERS, k: int = DEFAULT_K) -> AnsatzInstance:
    """Build one of ``dexcg``, ``pcu2``, ``uccsd`` or ``kupccgsd``.

    ``layers`` only affects ``pcu2`` and ``k`` only affects ``kupccgsd``.

    Raises:
        AnsatzError: unknown kind, non-positive depth, or no excitations to
            parameterize for this configuration.
    """
    kind = normalize_kind(kind)
    prep = hf_prep(cfg)
    n = cfg.n_qubits

    if kind == "dexcg":
        exc = enumerate_excitations(cfg)
        exc = ExcitationList((), exc.doubles)
        if not exc.doubles:
            raise AnsatzError(f"dexcg: no double excitations for {cfg.n_electrons} electrons in {n} spin orbitals")
        body = Circuit(n, _excitation_ops(exc, 0), len(exc))
        return AnsatzInstance(kind, cfg, prep + body, body.n_params, exc)

    if kind == "uccsd":
        exc = enumerate_excitations(cfg)
        if not len(exc):
            raise AnsatzError(f"uccsd: no excitations for {cfg.n_electrons} electrons in {n} spin orbitals")
        body = Circuit(n, _excitation_ops(exc, 0), len(exc))
        return AnsatzInstance(kind, cfg, prep + body, body.n_params, exc)

    if kind == "kupccgsd":
        if k < 1:
            raise AnsatzError(f"kupccgsd: repetition factor must be positive, got k={k}")
        exc = enumerate_excitations(cfg, generalized=True, paired_doubles=True)
        if not len(exc):
            raise AnsatzError(f"kupccgsd: no generalized excitations on {n} spin orbitals")
        ops: list[GateOp] = []
        for rep in range(k):
            ops += _excitation_ops(exc, rep * len(exc))
        body = Circuit(n, ops, k * len(exc))
        return AnsatzInstance(kind, cfg, prep + body, body.n_params, exc, k=k)

    # pcu2
    if layers < 1:
        raise AnsatzError(f"pcu2: number of layers must be positive, got {layers}")
    ops = []
    idx = 0
    for _ in range(layers):
        for q in range(n):
            ops.append(GateOp(GateKind.RZ, (q,), idx))
            idx += 1
        for q in range(n - 1):
            ops.append(GateOp(GateKind.CNOT, (q, q + 1)))
            ops.append(GateOp(GateKind.CRX, (q + 1, q), idx))
            ops.append(GateOp(GateKind.CNOT, (q, q + 1)))
            idx += 1
    body = Circuit(n, ops, idx)
    return AnsatzInstance(kind, cfg, prep + body, body.n_params, layers=layers)
