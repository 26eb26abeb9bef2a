"""Pauli words and weighted Pauli sums.

Words are stored in symplectic form: an ``x`` bit mask and a ``z`` bit mask,
bit ``q`` belonging to qubit ``q`` (qubit 0 is the least-significant bit of a
basis-state index). A qubit with both bits set carries ``Y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

COEFF_TOL = 1e-12
HERMITIAN_TOL = 1e-10
MAX_DENSE_QUBITS = 14

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class CapacityError(MemoryError):
    """A dense representation would be too large to allocate."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=False)
class PauliWord:
    """Tensor product of single-qubit Paulis, without a coefficient."""

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("mask has bits beyond n_qubits")

    @classmethod
    def from_str(cls, axes: str) -> "PauliWord":
        """Build a word from a string such as ``"XIZY"`` (index 0 is qubit 0)."""
        x = z = 0
        for q, ch in enumerate(axes.upper()):
            if ch == "X":
                x |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch != "I":
                raise ValueError(f"invalid Pauli axis {ch!r} in {axes!r}")
        return cls(len(axes), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, axis: str) -> "PauliWord":
        axes = ["I"] * n_qubits
        axes[qubit] = axis
        return cls.from_str("".join(axes))

    @property
    def axes(self) -> str:
        out = []
        for q in range(self.n_qubits):
            xb = (self.x >> q) & 1
            zb = (self.z >> q) & 1
            out.append("IZXY"[xb * 2 + zb])
        return "".join(out)

    @property
    def n_y(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def support(self) -> int:
        """Bit mask of the qubits acted on non-trivially."""
        return self.x | self.z

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return self.axes

    def __repr__(self) -> str:
        return f"PauliWord({self.axes!r})"


def word_mul(a: PauliWord, b: PauliWord) -> tuple[complex, PauliWord]:
    """Multiply two words; returns ``(phase, word)`` with ``a @ b == phase * word``.

    Raises:
        DimensionError: the words act on different numbers of qubits.
    """
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"cannot multiply {a.n_qubits}- and {b.n_qubits}-qubit words")
    x = a.x ^ b.x
    z = a.z ^ b.z
    # P = i^{|x&z|} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a & x_b|}.
    k = _popcount(a.x & a.z) + _popcount(b.x & b.z) - _popcount(x & z) + 2 * _popcount(a.z & b.x)
    return _PHASES[k % 4], PauliWord(a.n_qubits, x, z)


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    word: PauliWord


class PauliSum:
    """Canonical weighted sum of Pauli words.

    Like words are merged, terms with ``|coeff| < 1e-12`` are dropped and the
    remaining terms are ordered lexicographically by their axes string.
    Instances are immutable once built.
    """

    __slots__ = ("n_qubits", "_terms", "_grouped")

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] | Mapping[PauliWord, complex] = ()):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        acc: dict[tuple[int, int], complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((t.word, t.coeff) for t in terms)
        for word, coeff in items:
            if word.n_qubits != n_qubits:
                raise DimensionError(f"term on {word.n_qubits} qubits in a {n_qubits}-qubit sum")
            key = (word.x, word.z)
            acc[key] = acc.get(key, 0.0) + complex(coeff)
        self._terms = _canonical(n_qubits, acc)
        self._grouped = None

    @classmethod
    def _from_masks(cls, n_qubits: int, acc: dict[tuple[int, int], complex]) -> "PauliSum":
        obj = cls.__new__(cls)
        obj.n_qubits = n_qubits
        obj._terms = _canonical(n_qubits, acc)
        obj._grouped = None
        return obj

    @classmethod
    def from_word(cls, word: PauliWord | str, coeff: complex = 1.0) -> "PauliSum":
        if isinstance(word, str):
            word = PauliWord.from_str(word)
        return cls(word.n_qubits, [PauliTerm(coeff, word)])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [PauliTerm(coeff, PauliWord.identity(n_qubits))])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @property
    def terms(self) -> list[PauliTerm]:
        return [PauliTerm(c, PauliWord(self.n_qubits, x, z)) for (x, z), c in self._terms]

    def masks(self) -> list[tuple[int, int, complex]]:
        """Terms as ``(x_mask, z_mask, coeff)`` triples in canonical order."""
        return [(x, z, c) for (x, z), c in self._terms]

    def grouped_phases(self) -> list[tuple[int, np.ndarray]]:
        """Terms merged by ``x`` mask as ``(x, d)`` with ``H|b> = sum_x d[b] |b ^ x>``.

        Cached on the instance for up to 16 qubits.
        """
        if self._grouped is not None:
            return self._grouped
        groups: dict[int, np.ndarray] = {}
        for (x, z), c in self._terms:
            d = c * word_phases(self.n_qubits, x, z)
            if x in groups:
                groups[x] += d
            else:
                groups[x] = d
        out = sorted(groups.items())
        if self.n_qubits <= 16:
            self._grouped = out
        return out

    def coeff(self, word: PauliWord | str) -> complex:
        if isinstance(word, str):
            word = PauliWord.from_str(word)
        for (x, z), c in self._terms:
            if x == word.x and z == word.z:
                return c
        return 0.0j

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n_qubits, self._terms))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return sum_add(self, other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return sum_add(self, other.scale(-1.0))

    def __neg__(self) -> "PauliSum":
        return self.scale(-1.0)

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        return sum_mul(self, other)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return self.scale(scalar)

    __rmul__ = __mul__

    def scale(self, scalar: complex) -> "PauliSum":
        return PauliSum._from_masks(self.n_qubits, {k: c * scalar for k, c in self._terms})

    def dagger(self) -> "PauliSum":
        return PauliSum._from_masks(self.n_qubits, {k: c.conjugate() for k, c in self._terms})

    def is_hermitian(self) -> bool:
        return is_hermitian(self)

    def to_dense_matrix(self) -> np.ndarray:
        return to_dense_matrix(self)

    def to_text(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        if not self._terms:
            return f"PauliSum({self.n_qubits}, [])"
        body = " + ".join(f"({t.coeff:.6g})*{t.word.axes}" for t in self.terms[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"PauliSum({body}{more})"


def _canonical(n_qubits: int, acc: Mapping[tuple[int, int], complex]) -> tuple:
    kept = [(k, c) for k, c in acc.items() if abs(c) >= COEFF_TOL]
    kept.sort(key=lambda kc: PauliWord(n_qubits, *kc[0]).axes)
    return tuple(kept)


def sum_canonicalize(s: PauliSum | Iterable[PauliTerm], n_qubits: int | None = None) -> PauliSum:
    """Merge like words, drop negligible terms, order deterministically."""
    if isinstance(s, PauliSum):
        return PauliSum._from_masks(s.n_qubits, dict(s._terms))
    terms = list(s)
    if n_qubits is None:
        if not terms:
            raise ValueError("n_qubits is required for an empty term list")
        n_qubits = terms[0].word.n_qubits
    return PauliSum(n_qubits, terms)


def _check_dims(a: PauliSum, b: PauliSum) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"cannot combine {a.n_qubits}- and {b.n_qubits}-qubit sums")


def sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    _check_dims(a, b)
    acc = dict(a._terms)
    for k, c in b._terms:
        acc[k] = acc.get(k, 0.0) + c
    return PauliSum._from_masks(a.n_qubits, acc)


def sum_mul(a: PauliSum, b: PauliSum) -> PauliSum:
    """Operator product ``a @ b``, distributed term by term."""
    _check_dims(a, b)
    acc: dict[tuple[int, int], complex] = {}
    for (xa, za), ca in a._terms:
        ya = _popcount(xa & za)
        for (xb, zb), cb in b._terms:
            x = xa ^ xb
            z = za ^ zb
            k = ya + _popcount(xb & zb) - _popcount(x & z) + 2 * _popcount(za & xb)
            key = (x, z)
            acc[key] = acc.get(key, 0.0) + _PHASES[k % 4] * ca * cb
    return PauliSum._from_masks(a.n_qubits, acc)


def is_hermitian(s: PauliSum) -> bool:
    return all(abs(c.imag) < HERMITIAN_TOL for _, c in s._terms)


def word_phases(n_qubits: int, x: int, z: int) -> np.ndarray:
    """Phase vector ``f`` with ``P|b> = f[b] |b ^ x>`` for every basis index ``b``."""
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
    return _PHASES[_popcount(x & z) % 4] * signs


def to_dense_matrix(s: PauliSum) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of the sum (qubit 0 is the least-significant bit).

    Raises:
        CapacityError: more than 14 qubits.
    """
    n = s.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense matrix of {n} qubits exceeds the {MAX_DENSE_QUBITS}-qubit limit")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim, dtype=np.int64)
    for (x, z), c in s._terms:
        mat[cols ^ x, cols] += c * word_phases(n, x, z)
    return mat


def to_text(s: PauliSum) -> str:
    """Serialize as ``<real> <imag> <axes>`` lines."""
    lines = [f"# n_qubits={s.n_qubits}"]
    for t in s.terms:
        lines.append(f"{t.coeff.real!r} {t.coeff.imag!r} {t.word.axes}")
    return "\n".join(lines) + "\n"


def parse_text(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse the line format written by :func:`to_text`.

    The qubit count comes from ``n_qubits``, a ``# n_qubits=N`` comment, or
    the first term's axes string, in that order of preference.
    """
    terms: list[PauliTerm] = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n_qubits="):
                declared = int(body.split("=", 1)[1])
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<real> <imag> <axes>', got {raw!r}")
        try:
            coeff = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-numeric coefficient in {raw!r}") from exc
        try:
            word = PauliWord.from_str(parts[2])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        terms.append(PauliTerm(coeff, word))
    n = n_qubits or declared or (terms[0].word.n_qubits if terms else None)
    if n is None:
        raise ValueError("cannot infer qubit count from an empty Pauli-sum file")
    return PauliSum(n, terms)
