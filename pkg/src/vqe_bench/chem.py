"""Electronic-structure integrals and their qubit Hamiltonians.

Spin orbitals are interleaved: spatial orbital ``p`` owns modes ``2p``
(alpha) and ``2p + 1`` (beta), so the Hartree-Fock determinant occupies the
lowest ``n_electrons`` modes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from vqe_bench.pauli import PauliSum, PauliWord, PauliTerm

SYMMETRY_TOL = 1e-10
_INT_TOL = 1e-14


class FCIDumpFormatError(ValueError):
    """Malformed FCIDUMP input."""


@dataclass
class IntegralSet:
    """Integrals in a spatial-orbital basis, two-electron part in chemists' notation ``(pq|rs)``."""

    n_spatial_orbitals: int
    n_electrons: int
    ms2: int
    core_energy: float
    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self) -> None:
        n = self.n_spatial_orbitals
        self.h1 = np.asarray(self.h1, dtype=float)
        self.h2 = np.asarray(self.h2, dtype=float)
        if n < 1:
            raise ValueError("n_spatial_orbitals must be positive")
        if not 0 < self.n_electrons <= 2 * n:
            raise ValueError(f"n_electrons={self.n_electrons} incompatible with {n} spatial orbitals")
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValueError("integral array shapes do not match n_spatial_orbitals")

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial_orbitals

    def check_symmetry(self, tol: float = SYMMETRY_TOL) -> None:
        """Raise ``ValueError`` unless h1 is symmetric and h2 has 8-fold symmetry."""
        g = self.h2
        if not np.allclose(self.h1, self.h1.T, atol=tol, rtol=0):
            raise ValueError("h1 is not symmetric")
        images = (
            g.transpose(1, 0, 2, 3), g.transpose(0, 1, 3, 2), g.transpose(2, 3, 0, 1),
        )
        if not all(np.allclose(g, im, atol=tol, rtol=0) for im in images):
            raise ValueError("h2 lacks 8-fold permutational symmetry")

    def hf_energy(self) -> float:
        """Energy of the determinant filling the lowest spin orbitals."""
        occ = list(range(self.n_electrons))
        e = self.core_energy
        for i in occ:
            e += self.h1[i // 2, i // 2]
        for a, i in enumerate(occ):
            for j in occ[a + 1:]:
                p, q = i // 2, j // 2
                e += self.h2[p, p, q, q]
                if i % 2 == j % 2:
                    e -= self.h2[p, q, q, p]
        return float(e)


# --------------------------------------------------------------------- FCIDUMP

_HEADER_KEY = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)\s*=")


def _parse_header(header: str) -> dict[str, str]:
    body = re.sub(r"^\s*&FCI", "", header, flags=re.I)
    body = re.sub(r"(&END|/)\s*$", "", body.strip(), flags=re.I)
    parts = _HEADER_KEY.split(body)
    return {k.upper(): v.strip().strip(",").strip() for k, v in zip(parts[1::2], parts[2::2])}


def parse_fcidump(text: str) -> IntegralSet:
    """Read FCIDUMP text into a fully symmetrized :class:`IntegralSet`.

    Raises:
        FCIDumpFormatError: missing header keys, bad numbers or out-of-range indices.
    """
    lines = text.splitlines()
    end = None
    for i, line in enumerate(lines):
        s = line.strip().upper()
        if s.startswith("&END") or s == "/" or s.endswith("&END") or s.endswith("/"):
            end = i
            break
    if end is None or not lines or "&FCI" not in text[:200].upper():
        raise FCIDumpFormatError("missing '&FCI ... &END' namelist header")
    header = _parse_header(" ".join(lines[: end + 1]))
    try:
        norb = int(header["NORB"])
        nelec = int(header["NELEC"])
    except KeyError as exc:
        raise FCIDumpFormatError(f"header lacks {exc.args[0]}") from None
    except ValueError as exc:
        raise FCIDumpFormatError(f"non-integer header value: {exc}") from None
    ms2 = int(header.get("MS2", "0") or 0)

    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb, norb, norb, norb))
    core = 0.0
    for lineno, line in enumerate(lines[end + 1:], start=end + 2):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FCIDumpFormatError(f"line {lineno}: expected 'value p q r s', got {line.strip()!r}")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            p, q, r, s = (int(v) for v in parts[1:])
        except ValueError:
            raise FCIDumpFormatError(f"line {lineno}: non-numeric entry {line.strip()!r}") from None
        if any(not 0 <= v <= norb for v in (p, q, r, s)):
            raise FCIDumpFormatError(f"line {lineno}: orbital index out of range 1..{norb}")
        if p == q == r == s == 0:
            core = value
        elif r == s == 0:
            if p == 0 or q == 0:
                raise FCIDumpFormatError(f"line {lineno}: zero orbital index in one-electron entry")
            h1[p - 1, q - 1] = h1[q - 1, p - 1] = value
        elif 0 in (p, q, r, s):
            # Orbital energies (p 0 0 0) and other partial records carry no integrals.
            continue
        else:
            p, q, r, s = p - 1, q - 1, r - 1, s - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                h2[a, b, c, d] = value
    try:
        return IntegralSet(norb, nelec, ms2, core, h1, h2)
    except ValueError as exc:
        raise FCIDumpFormatError(str(exc)) from None


def read_fcidump(path: str | Path) -> IntegralSet:
    return parse_fcidump(Path(path).read_text())


def write_fcidump(ints: IntegralSet, tol: float = 1e-15) -> str:
    """Serialize an integral set, one symmetry-unique entry per line."""
    n = ints.n_spatial_orbitals
    out = [f" &FCI NORB={n},NELEC={ints.n_electrons},MS2={ints.ms2},", "  ORBSYM=" + "1," * n, "  ISYM=1,", " &END"]
    for p in range(n):
        for q in range(p + 1):
            for r in range(n):
                for s in range(r + 1):
                    if (p * (p + 1) // 2 + q) < (r * (r + 1) // 2 + s):
                        continue
                    v = ints.h2[p, q, r, s]
                    if abs(v) > tol:
                        out.append(f" {float(v)!r} {p + 1} {q + 1} {r + 1} {s + 1}")
    for p in range(n):
        for q in range(p + 1):
            if abs(ints.h1[p, q]) > tol:
                out.append(f" {float(ints.h1[p, q])!r} {p + 1} {q + 1} 0 0")
    out.append(f" {float(ints.core_energy)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ fermion operators

@dataclass(frozen=True)
class FermionTerm:
    """Product of ladder operators, leftmost first; ``dagger=True`` is a creator."""

    coeff: complex
    ladder: tuple[tuple[int, bool], ...] = ()


@dataclass
class FermionSum:
    n_modes: int
    terms: list[FermionTerm] = field(default_factory=list)

    def __post_init__(self) -> None:
        for t in self.terms:
            for mode, _ in t.ladder:
                if not 0 <= mode < self.n_modes:
                    raise ValueError(f"mode {mode} outside 0..{self.n_modes - 1}")

    def add(self, coeff: complex, *ladder: tuple[int, bool]) -> None:
        for mode, _ in ladder:
            if not 0 <= mode < self.n_modes:
                raise ValueError(f"mode {mode} outside 0..{self.n_modes - 1}")
        self.terms.append(FermionTerm(coeff, tuple(ladder)))

    def __len__(self) -> int:
        return len(self.terms)


def build_fermion_hamiltonian(ints: IntegralSet) -> FermionSum:
    """Second-quantized electronic Hamiltonian over interleaved spin orbitals.

    The two-body part is ``1/2 sum (ps|qr) a+_p a+_q a_r a_s`` in spin
    orbitals, which is the usual ``1/2 sum (pq|rs) a+_p a+_r a_s a_q`` with
    chemists' integrals; spin is conserved along each ``(p, s)`` and
    ``(q, r)`` pair.
    """
    n = ints.n_spatial_orbitals
    fs = FermionSum(2 * n)
    fs.add(ints.core_energy)
    for p in range(n):
        for q in range(n):
            v = ints.h1[p, q]
            if abs(v) < _INT_TOL:
                continue
            for sigma in (0, 1):
                fs.add(v, (2 * p + sigma, True), (2 * q + sigma, False))
    g = ints.h2
    for p, q, r, s in zip(*np.nonzero(np.abs(g) >= _INT_TOL)):
        # (pq|rs): electron 1 moves q -> p, electron 2 moves s -> r.
        v = 0.5 * g[p, q, r, s]
        for sigma in (0, 1):
            for tau in (0, 1):
                i, j = 2 * p + sigma, 2 * r + tau
                k, l = 2 * s + tau, 2 * q + sigma
                if i == j or k == l:
                    continue
                fs.add(v, (i, True), (j, True), (k, False), (l, False))
    return fs


@lru_cache(maxsize=4096)
def _ladder_image(n_modes: int, mode: int, dagger: bool) -> PauliSum:
    chain = (1 << mode) - 1
    x_word = PauliWord(n_modes, 1 << mode, chain)
    y_word = PauliWord(n_modes, 1 << mode, chain | (1 << mode))
    # a = Z..Z (X + iY)/2, a+ = Z..Z (X - iY)/2
    sign = -1.0 if dagger else 1.0
    return PauliSum(n_modes, [PauliTerm(0.5, x_word), PauliTerm(sign * 0.5j, y_word)])


def ladder_operator(n_modes: int, mode: int, dagger: bool) -> PauliSum:
    """Jordan-Wigner image of a single creation or annihilation operator."""
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} outside 0..{n_modes - 1}")
    return _ladder_image(n_modes, mode, dagger)


def jordan_wigner(f: FermionSum) -> PauliSum:
    """Map a fermion sum onto qubits, one qubit per mode."""
    n = f.n_modes
    acc: dict[PauliWord, complex] = {}
    cache: dict[tuple[tuple[int, bool], ...], PauliSum] = {}
    for term in f.terms:
        op = cache.get(term.ladder)
        if op is None:
            op = PauliSum.identity(n)
            for mode, dagger in term.ladder:
                op = op @ _ladder_image(n, mode, dagger)
            cache[term.ladder] = op
        for t in op.terms:
            acc[t.word] = acc.get(t.word, 0.0) + term.coeff * t.coeff
    return PauliSum(n, acc)


def qubit_hamiltonian(ints: IntegralSet) -> PauliSum:
    return jordan_wigner(build_fermion_hamiltonian(ints))


def number_operator(n_modes: int) -> PauliSum:
    """``N = sum_i (I - Z_i) / 2``."""
    terms = [PauliTerm(0.5 * n_modes, PauliWord.identity(n_modes))]
    terms += [PauliTerm(-0.5, PauliWord(n_modes, 0, 1 << i)) for i in range(n_modes)]
    return PauliSum(n_modes, terms)


# ----------------------------------------------------------------- active space

def active_space(ints: IntegralSet, frozen: int, active: int) -> IntegralSet:
    """Freeze the lowest ``frozen`` spatial orbitals (doubly occupied) and keep
    the next ``active`` ones.

    Raises:
        ValueError: counts that leave no electrons, too many electrons for the
            active orbitals, or more orbitals than exist.
    """
    n = ints.n_spatial_orbitals
    if frozen < 0 or active < 1:
        raise ValueError(f"need frozen >= 0 and active >= 1, got frozen={frozen}, active={active}")
    if frozen + active > n:
        raise ValueError(f"frozen + active = {frozen + active} exceeds {n} spatial orbitals")
    n_el = ints.n_electrons - 2 * frozen
    if n_el <= 0:
        raise ValueError(f"freezing {frozen} orbitals leaves no active electrons")
    if n_el > 2 * active:
        raise ValueError(f"{n_el} electrons do not fit in {active} active orbitals")
    if frozen == 0 and active == n:
        return ints

    fz = slice(0, frozen)
    act = slice(frozen, frozen + active)
    h1, g = ints.h1, ints.h2
    core = ints.core_energy
    core += 2.0 * np.trace(h1[fz, fz])
    core += 2.0 * np.einsum("iijj->", g[fz, fz, fz, fz]) - np.einsum("ijji->", g[fz, fz, fz, fz])
    h1_eff = h1[act, act] + 2.0 * np.einsum("pqii->pq", g[act, act, fz, fz]) - np.einsum("piiq->pq", g[act, fz, fz, act])
    h2_act = np.ascontiguousarray(g[act, act, act, act])
    return IntegralSet(active, n_el, ints.ms2, float(core), h1_eff, h2_act)
