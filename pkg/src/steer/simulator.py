"""Dense statevector backend: Pauli rotations, exponential sweeps, exact
evolution oracle, and the mean-state error metric.

All amplitudes are double precision; single precision is never used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .pauli import DimensionError, PauliString, PauliSum
from .sampler import SampledCorrection

#: Largest n for exact evolution (2^n amplitudes); the 2^n x 2^n dense
#: matrix is only formed for n <= _DENSE_MATRIX_LIMIT, above that a
#: Taylor-based sparse expm-multiply is used.
DENSE_LIMIT = 14
_DENSE_MATRIX_LIMIT = 10


class TooLarge(ValueError):
    pass


class NonCommutingGenerator(ValueError):
    """Commuting fast path requested on a generator with non-commuting terms."""


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionError("amplitude array has wrong length")

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy(), self.normalized)


@dataclass(frozen=True)
class ExpFactor:
    generator: PauliSum
    angle: float


@dataclass(frozen=True)
class PauliRotation:
    string: PauliString
    angle: float


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple


def _reverse_bits(mask: int, n_qubits: int) -> int:
    """Qubit 0 is the leftmost kron factor, i.e. the most significant bit
    of a basis-state index, while masks store qubit i at bit i."""
    out = 0
    for i in range(n_qubits):
        if (mask >> i) & 1:
            out |= 1 << (n_qubits - 1 - i)
    return out


@lru_cache(maxsize=4096)
def _pauli_tables(n_qubits: int, x_mask: int, z_mask: int):
    """(permutation, signs, i-power) realizing P|b> = i^d * sgn[b] |b^x>."""
    rx = _reverse_bits(x_mask, n_qubits)
    rz = _reverse_bits(z_mask, n_qubits)
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    perm = idx ^ rx
    bits = idx & rz
    par = np.zeros(1 << n_qubits, dtype=np.int64)
    for i in range(n_qubits):
        par ^= (bits >> i) & 1
    signs = 1.0 - 2.0 * par
    delta = (x_mask & z_mask).bit_count() % 4
    return perm, signs, (1j) ** delta


def pauli_action(p: PauliString, amps: np.ndarray) -> np.ndarray:
    """Apply the Pauli string to amplitudes (last axis is the state index)."""
    perm, signs, phase = _pauli_tables(p.n_qubits, p.x_mask, p.z_mask)
    return phase * signs[perm] * amps[..., perm]


def rotate_amplitudes(amps: np.ndarray, p: PauliString, angle: float) -> np.ndarray:
    """e^{i angle P} acting on amplitudes; exact to machine precision."""
    if p.is_identity:
        return np.exp(1j * angle) * amps
    return math.cos(angle) * amps + (1j * math.sin(angle)) * pauli_action(p, amps)


def apply_pauli_rotation(s: StateVector, p: PauliString, angle: float) -> StateVector:
    if p.n_qubits != s.n_qubits:
        raise DimensionError("mismatched n_qubits")
    return StateVector(s.n_qubits, rotate_amplitudes(s.amplitudes, p, angle), s.normalized)


@lru_cache(maxsize=512)
def _commuting_factorization(h: PauliSum) -> tuple[tuple[PauliString, float], ...] | None:
    """Term list for the commuting fast path, or None if it does not apply."""
    if not h.all_strings_commute():
        return None
    try:
        return tuple(h.real_terms())
    except ValueError:
        return None


def apply_exp_factor(s: StateVector, h: PauliSum, angle: float) -> StateVector:
    """e^{i angle h} s; factorized into rotations when h's terms all commute."""
    if h.n_qubits != s.n_qubits:
        raise DimensionError("mismatched n_qubits")
    if angle == 0.0:
        return s.copy()
    terms = _commuting_factorization(h)
    if terms is None:
        if s.n_qubits > _DENSE_MATRIX_LIMIT:
            raise NonCommutingGenerator(
                "generator terms do not all commute and n is too large for dense expm"
            )
        u = scipy.linalg.expm(1j * angle * h.to_matrix())
        return StateVector(s.n_qubits, u @ s.amplitudes, s.normalized)
    amps = s.amplitudes
    for p, c in terms:
        amps = rotate_amplitudes(amps, p, angle * c)
    return StateVector(s.n_qubits, amps, s.normalized)


def sparse_matrix(h: PauliSum) -> scipy.sparse.csr_matrix:
    """Sparse CSR matrix of a PauliSum (each string is a signed permutation)."""
    dim = 1 << h.n_qubits
    m = scipy.sparse.csr_matrix((dim, dim), dtype=np.complex128)
    idx = np.arange(dim, dtype=np.int64)
    for s, c in h.terms():
        perm, signs, phase = _pauli_tables(h.n_qubits, s.x_mask, s.z_mask)
        data = c * phase * signs
        m += scipy.sparse.csr_matrix((data, (perm, idx)), shape=(dim, dim))
    return m


def exact_evolve(H: PauliSum, t: float, s: StateVector) -> StateVector:
    """e^{itH} s to near machine precision; dense expm for small n, sparse
    Taylor expm-multiply above that."""
    if H.n_qubits != s.n_qubits:
        raise DimensionError("mismatched n_qubits")
    if H.n_qubits > DENSE_LIMIT:
        raise TooLarge(f"exact evolution limited to {DENSE_LIMIT} qubits")
    if H.n_qubits <= _DENSE_MATRIX_LIMIT:
        u = scipy.linalg.expm(1j * t * H.to_matrix())
        amps = u @ s.amplitudes
    else:
        m = sparse_matrix(H).tocsc() * (1j * t)
        amps = scipy.sparse.linalg.expm_multiply(m, s.amplitudes)
    return StateVector(s.n_qubits, amps, s.normalized)


def apply_formula(s: StateVector, formula, t: float) -> StateVector:
    """One layer of the product formula at time step t."""
    for h, theta in formula.factors:
        s = apply_exp_factor(s, h, t * theta)
    return s


def apply_correction(s: StateVector, correction: SampledCorrection | None) -> StateVector:
    if correction is None:
        return s
    for p, angle in correction.rotations:
        s = apply_pauli_rotation(s, p, angle)
    return s


def run_layers(
    formula,
    corrections: Sequence[SampledCorrection | None],
    N: int,
    t_total: float,
    s0: StateVector,
    split=None,
) -> StateVector:
    """Apply N layers at step t_total/N, with per-layer sampled corrections.

    Mid-circuit corrections (symmetric mode) are inserted between the left
    and right halves of ``split``; others follow the full formula.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if corrections and len(corrections) != N:
        raise ValueError("need one correction (or None) per layer")
    dt = t_total / N
    s = s0
    for layer in range(N):
        corr = corrections[layer] if corrections else None
        if corr is not None and corr.mid_circuit:
            if split is None:
                raise ValueError("mid-circuit correction requires a formula split")
            s = apply_formula(s, split.left, dt)
            s = apply_correction(s, corr)
            s = apply_formula(s, split.right, dt)
        else:
            # The residual satisfies e^{i dt H} = S(dt) F(dt), so the
            # sampled correction precedes the formula within a layer.
            s = apply_correction(s, corr)
            s = apply_formula(s, formula, dt)
    return s


def mean_state(samples: Sequence[StateVector]) -> StateVector:
    """Average of sample statevectors, reduced in ascending sample order."""
    if not samples:
        raise ValueError("need at least one sample")
    acc = np.zeros_like(samples[0].amplitudes)
    for sv in samples:
        acc = acc + sv.amplitudes
    return StateVector(samples[0].n_qubits, acc / len(samples), normalized=False)


def mean_state_error(
    H: PauliSum, t: float, samples: Sequence[StateVector], s0: StateVector
) -> float:
    """Two-norm distance between the exact state and the sample mean."""
    exact = exact_evolve(H, t, s0)
    mean = mean_state(list(samples))
    return float(np.linalg.norm(exact.amplitudes - mean.amplitudes))
