"""Benchmark Hamiltonians: transverse-field Ising chains and grids, a
random-field Heisenberg chain, Fermi-Hubbard under Jordan-Wigner, plus a
line-oriented file loader for externally generated Hamiltonians.

Each constructor returns ``(H, partition)`` where the partition is a list
of internally commuting PauliSums that sum to H term-wise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, PauliSum
from .simulator import StateVector

COEFF_FILTER = 1e-7


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows * self.cols < 1:
            raise ValueError("lattice must contain at least one site")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    @property
    def is_line(self) -> bool:
        return self.rows == 1 or self.cols == 1

    def site(self, r: int, c: int) -> int:
        return r * self.cols + c

    def edges(self) -> list[tuple[int, int, str, int]]:
        """(i, j, orientation, parity) for all open-boundary nearest-neighbor
        bonds, parity taken along the bond direction for even/odd coloring."""
        out = []
        for r in range(self.rows):
            for c in range(self.cols - 1):
                out.append((self.site(r, c), self.site(r, c + 1), "h", c % 2))
        for r in range(self.rows - 1):
            for c in range(self.cols):
                out.append((self.site(r, c), self.site(r + 1, c), "v", r % 2))
        return out


def _string(n: int, spec: dict[int, str]) -> PauliString:
    label = "".join(spec.get(q, "I") for q in range(n))
    return PauliString.from_label(label)


def _bond(n: int, axis: str, i: int, j: int) -> PauliString:
    return _string(n, {i: axis, j: axis})


def tf_ising(lat: LatticeSpec, J: float, h: float) -> tuple[PauliSum, list[PauliSum]]:
    """J sum XX over bonds + h sum Z; partition = field plus edge colorings."""
    n = lat.n_sites
    field = PauliSum.zero(n)
    for q in range(n):
        field = field + PauliSum.from_label(_string(n, {q: "Z"}).label(), h)
    groups: dict[str, PauliSum] = {}
    for i, j, orient, par in lat.edges():
        key = f"{orient}{par}"
        g = groups.get(key, PauliSum.zero(n))
        groups[key] = g + J * PauliSum.from_label(_bond(n, "X", i, j).label())
    partition = [field] + [groups[k] for k in sorted(groups)]
    partition = [g for g in partition if g]
    H = PauliSum.zero(n)
    for g in partition:
        H = H + g
    return H, partition


def heisenberg_random_field(
    lat: LatticeSpec, seed: int
) -> tuple[PauliSum, list[PauliSum]]:
    """Nearest-neighbor XX+YY+ZZ chain plus a seeded random Z field,
    h_i uniform in [-1, 1]. Chain lattices only."""
    if not lat.is_line:
        raise ValueError("random-field Heisenberg model is defined on chains only")
    n = lat.n_sites
    rng = np.random.default_rng(seed)
    fields = rng.uniform(-1.0, 1.0, size=n)
    even = PauliSum.zero(n)
    odd = PauliSum.zero(n)
    for i in range(n - 1):
        bond = PauliSum.zero(n)
        for axis in "XYZ":
            bond = bond + PauliSum.from_label(_bond(n, axis, i, i + 1).label())
        if i % 2 == 0:
            even = even + bond
        else:
            odd = odd + bond
    field = PauliSum.zero(n)
    for q in range(n):
        if abs(fields[q]) > 0:
            field = field + PauliSum.from_label(_string(n, {q: "Z"}).label(), fields[q])
    partition = [g for g in (even, odd, field) if g]
    H = PauliSum.zero(n)
    for g in partition:
        H = H + g
    return H, partition


def jordan_wigner_hopping(n: int, i: int, j: int) -> PauliSum:
    """c_i^dag c_j + h.c. as (1/2)(X_i X_j + Y_i Y_j) Z_{i+1}..Z_{j-1}."""
    if i > j:
        i, j = j, i
    if i == j:
        raise ValueError("hopping requires distinct modes")
    spec_x = {i: "X", j: "X"}
    spec_y = {i: "Y", j: "Y"}
    for q in range(i + 1, j):
        spec_x[q] = "Z"
        spec_y[q] = "Z"
    return 0.5 * (
        PauliSum.from_label(_string(n, spec_x).label())
        + PauliSum.from_label(_string(n, spec_y).label())
    )


def jordan_wigner_number_pair(n: int, i: int, j: int) -> PauliSum:
    """n_i n_j as (1/4)(I - Z_i)(I - Z_j)."""
    label_i = _string(n, {i: "Z"}).label()
    label_j = _string(n, {j: "Z"}).label()
    label_ij = _string(n, {i: "Z", j: "Z"}).label()
    return 0.25 * (
        PauliSum.identity(n)
        - PauliSum.from_label(label_i)
        - PauliSum.from_label(label_j)
        + PauliSum.from_label(label_ij)
    )


def fermi_hubbard(lat: LatticeSpec, J: float, U: float) -> tuple[PauliSum, list[PauliSum]]:
    """Hubbard model on 2*sites qubits: mode ordering is all spin-up sites
    (row-major), then all spin-down. Partition: hopping terms grouped by
    bond orientation and parity (shared across spin sectors), plus the
    on-site interaction as one commuting diagonal group."""
    sites = lat.n_sites
    n = 2 * sites
    groups: dict[str, PauliSum] = {}
    for i, j, orient, par in lat.edges():
        key = f"{orient}{par}"
        g = groups.get(key, PauliSum.zero(n))
        for spin in (0, 1):
            off = spin * sites
            g = g + (-J) * jordan_wigner_hopping(n, i + off, j + off)
        groups[key] = g
    interaction = PauliSum.zero(n)
    for s in range(sites):
        interaction = interaction + U * jordan_wigner_number_pair(n, s, s + sites)
    partition = [groups[k] for k in sorted(groups)]
    if interaction:
        partition.append(interaction)
    partition = [g for g in partition if g]
    H = PauliSum.zero(n)
    for g in partition:
        H = H + g
    return H, partition


def load_hamiltonian(path: str) -> tuple[PauliSum, list[PauliSum]]:
    """Read `<pauli-string> <coefficient>` lines; '#' starts a comment.
    Coefficients with magnitude below 1e-7 are dropped. The partition is
    one single-term group per surviving line."""
    H: PauliSum | None = None
    partition: list[PauliSum] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected '<paulis> <coeff>'")
            label, coeff_text = parts
            try:
                string = PauliString.from_label(label)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            try:
                coeff = float(coeff_text)
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: bad coefficient {coeff_text!r}"
                ) from None
            if H is None:
                H = PauliSum.zero(string.n_qubits)
            elif string.n_qubits != H.n_qubits:
                raise ParseError(
                    f"{path}:{lineno}: string length {string.n_qubits} != "
                    f"{H.n_qubits} from earlier lines"
                )
            if abs(coeff) < COEFF_FILTER:
                continue
            term = PauliSum.from_label(string.label(), coeff)
            H = H + term
            partition.append(term)
    if H is None:
        raise ParseError(f"{path}: no terms found")
    if not H.is_hermitian():
        raise ParseError(f"{path}: Hamiltonian is not Hermitian")
    return H, partition


def neel_minus_center_state(lat: LatticeSpec) -> StateVector:
    """Alternating up/down occupation with the center electron removed,
    in the all-up-then-all-down mode ordering used by fermi_hubbard.
    Occupied modes map to |1> on the matching qubit."""
    sites = lat.n_sites
    n = 2 * sites
    center = sites // 2
    index = 0
    for r in range(lat.rows):
        for c in range(lat.cols):
            s = lat.site(r, c)
            if s == center:
                continue
            spin = (r + c) % 2  # 0: up sublattice, 1: down sublattice
            mode = s + spin * sites
            index |= 1 << (n - 1 - mode)
    return StateVector.basis_state(n, index)


def random_basis_state(n_qubits: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    return StateVector.basis_state(n_qubits, int(rng.integers(0, 1 << n_qubits)))
