"""Sparse algebra of n-qubit Pauli operators.

A Pauli string is stored as a pair of bit masks: bit i of ``x_mask`` set
means X acts on qubit i, bit i of ``z_mask`` set means Z acts on qubit i,
and both bits set means Y. Python integers carry the masks, so any number
of qubits works without a word-size cliff (desk-scale runs need <= 16).

All values are immutable; operations are pure functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

#: Coefficients with magnitude below this are pruned after arithmetic.
#: Series coefficients are rationals times small integers, so genuine
#: cancellations are exact up to rounding.
DROP_TOLERANCE = 1e-12


class DimensionError(ValueError):
    """Operands act on a different number of qubits."""


_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_DENSE = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli string without coefficient."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask does not fit in n_qubits bits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a label like ``"XZI"`` (qubit 0 leftmost)."""
        x = z = 0
        for i, c in enumerate(label):
            try:
                xb, zb = _MASKS[c]
            except KeyError:
                raise ValueError(f"invalid Pauli character {c!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    def label(self) -> str:
        """Canonical text rendering, qubit 0 leftmost."""
        return "".join(
            _CHARS[(self.x_mask >> i) & 1, (self.z_mask >> i) & 1]
            for i in range(self.n_qubits)
        )

    @property
    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes_with(self, other: "PauliString") -> bool:
        """True iff the symplectic product of the masks is even."""
        if self.n_qubits != other.n_qubits:
            raise DimensionError("mismatched n_qubits")
        s = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return s % 2 == 0

    def qubit_support(self) -> int:
        """Mask of qubits acted on non-trivially."""
        return self.x_mask | self.z_mask

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; tests and small-n oracles only."""
        m = np.array([[1.0 + 0j]])
        for c in self.label():
            m = np.kron(m, _DENSE[c])
        return m

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class PauliTerm:
    """A Pauli string with a complex coefficient."""

    string: PauliString
    coeff: complex

    def __str__(self) -> str:
        return f"({self.coeff:+g})*{self.string.label()}"


def multiply(p: PauliString, q: PauliString) -> PauliTerm:
    """Product of two Pauli strings as ``phase * string``, phase in {1,-1,i,-i}.

    Uses the convention P = i^{#Y} X^x Z^z so that every string is Hermitian;
    the phase then follows from mask overlaps alone.
    """
    if p.n_qubits != q.n_qubits:
        raise DimensionError("mismatched n_qubits")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    # i-exponent: Hermitian-normalization counts plus Z-past-X swaps.
    exp = (
        (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        - (x & z).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
    ) % 4
    return PauliTerm(PauliString(p.n_qubits, x, z), 1j ** exp)


class PauliSum:
    """Operator as a sparse sum of Pauli strings with complex coefficients.

    Instances are immutable after construction; all arithmetic returns new
    sums with coefficients below :data:`DROP_TOLERANCE` pruned.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[tuple[PauliString, complex]] = ()):
        acc: dict[PauliString, complex] = {}
        for s, c in terms:
            if s.n_qubits != n_qubits:
                raise DimensionError("term on wrong number of qubits")
            acc[s] = acc.get(s, 0.0) + complex(c)
        self.n_qubits = n_qubits
        self._terms = {s: c for s, c in acc.items() if abs(c) >= DROP_TOLERANCE}

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliSum":
        s = PauliString.from_label(label)
        return cls(s.n_qubits, [(s, coeff)])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(PauliString.identity(n_qubits), coeff)])

    def terms(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self._terms.items())

    def coefficient(self, s: PauliString) -> complex:
        return self._terms.get(s, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n_qubits, frozenset(self._terms.items())))

    def _check(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise DimensionError("mismatched n_qubits")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        acc = dict(self._terms)
        for s, c in other._terms.items():
            acc[s] = acc.get(s, 0.0) + c
        return PauliSum(self.n_qubits, acc.items())

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, ((s, c * scalar) for s, c in self._terms.items()))

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product; term count can grow quadratically."""
        self._check(other)
        acc: dict[PauliString, complex] = {}
        for sa, ca in self._terms.items():
            for sb, cb in other._terms.items():
                t = multiply(sa, sb)
                acc[t.string] = acc.get(t.string, 0.0) + ca * cb * t.coeff
        return PauliSum(self.n_qubits, acc.items())

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.n_qubits, ((s, c.conjugate()) for s, c in self._terms.items()))

    def one_norm(self) -> float:
        """Sum of coefficient magnitudes."""
        return float(sum(abs(c) for c in self._terms.values()))

    def is_hermitian(self, tol: float = DROP_TOLERANCE) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def real_terms(self) -> list[tuple[PauliString, float]]:
        """Hermitian view: (string, real coefficient) pairs, label-sorted.

        Raises if any coefficient has an imaginary part above tolerance.
        """
        out = []
        for s, c in self._terms.items():
            if abs(c.imag) > 1e-9 * max(1.0, abs(c)):
                raise ValueError(f"non-Hermitian coefficient {c} on {s.label()}")
            out.append((s, c.real))
        out.sort(key=lambda sc: sc[0].label())
        return out

    def all_strings_commute(self) -> bool:
        strings = list(self._terms)
        return all(
            strings[i].commutes_with(strings[j])
            for i in range(len(strings))
            for j in range(i + 1, len(strings))
        )

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for s, c in self._terms.items():
            m += c * s.to_matrix()
        return m

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(
            f"({c:+.6g})*{s.label()}"
            for s, c in sorted(self._terms.items(), key=lambda sc: sc[0].label())
        )

    def __repr__(self) -> str:
        return f"PauliSum({self.n_qubits}, {str(self)})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """[a, b] = ab - ba, pruned; exactly zero for commuting term pairs."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("mismatched n_qubits")
    acc: dict[PauliString, complex] = {}
    for sa, ca in a.terms():
        for sb, cb in b.terms():
            if sa.commutes_with(sb):
                continue
            # anticommuting strings: ab - ba = 2 ab
            t = multiply(sa, sb)
            acc[t.string] = acc.get(t.string, 0.0) + 2.0 * ca * cb * t.coeff
    return PauliSum(a.n_qubits, acc.items())


def ad_power(a: PauliSum, b: PauliSum, n: int) -> PauliSum:
    """n-fold nested commutator of ``a`` onto ``b``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = b
    for _ in range(n):
        out = commutator(a, out)
    return out


def one_norm(a: PauliSum) -> float:
    return a.one_norm()
