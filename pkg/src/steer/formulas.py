"""Product-formula construction, symmetric splits, and the depth model.

A formula is an ordered list of factors (h, theta) meaning the product
prod_j e^{i t theta_j h_j}, applied left to right as written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .pauli import DimensionError, PauliString, PauliSum


class NotPalindromic(ValueError):
    """split_symmetric requires a palindromic factor list."""


@dataclass(frozen=True)
class ProductFormula:
    n_qubits: int
    order: int
    factors: tuple[tuple[PauliSum, float], ...]
    label: str = ""

    def generator_sum(self) -> PauliSum:
        """Sum of theta_j * h_j; equals H for a first-order-consistent formula."""
        acc = PauliSum.zero(self.n_qubits)
        for h, theta in self.factors:
            acc = acc + theta * h
        return acc

    def is_palindromic(self) -> bool:
        return list(self.factors) == list(reversed(self.factors))


@dataclass(frozen=True)
class FormulaSplit:
    left: ProductFormula
    right: ProductFormula
    parent: ProductFormula


def _merge_adjacent(factors: list[tuple[PauliSum, float]]) -> tuple[tuple[PauliSum, float], ...]:
    """Merge consecutive factors with identical generators (thetas summed)."""
    out: list[tuple[PauliSum, float]] = []
    for h, theta in factors:
        if out and out[-1][0] == h:
            out[-1] = (h, out[-1][1] + theta)
        else:
            out.append((h, theta))
    return tuple((h, t) for h, t in out if t != 0.0)


def suzuki(
    order: int,
    partition: Sequence[PauliSum],
    label: str | None = None,
    merge: bool = False,
) -> ProductFormula:
    """Suzuki-Trotter formula of order 1, 2 or 4 for H = sum of the partition.

    Order 1 is the forward sweep, order 2 the palindrome, order 4 five
    order-2 blocks with the standard coefficients u = 1/(4 - 4^{1/3}) and
    1 - 4u in the middle. ``merge=True`` fuses adjacent identical
    generators (a depth saving at block boundaries); the default keeps the
    blocks intact so the cost model's exact 5x order-2-to-order-4 ratio
    holds.
    """
    partition = list(partition)
    if not partition:
        raise ValueError("partition must be non-empty")
    n = partition[0].n_qubits
    if any(h.n_qubits != n for h in partition):
        raise DimensionError("partition elements on mismatched n_qubits")
    # the order-2 palindrome keeps its middle factor fused: A/2, B, A/2
    s2 = (
        [(h, 0.5) for h in partition[:-1]]
        + [(partition[-1], 1.0)]
        + [(h, 0.5) for h in reversed(partition[:-1])]
    )
    if order == 1:
        factors = [(h, 1.0) for h in partition]
    elif order == 2:
        factors = s2
    elif order == 4:
        u = 1.0 / (4.0 - 4.0 ** (1.0 / 3.0))
        factors = []
        for scale in (u, u, 1.0 - 4.0 * u, u, u):
            factors += [(h, theta * scale) for h, theta in s2]
    else:
        raise ValueError("supported orders: 1, 2, 4")
    return ProductFormula(
        n_qubits=n,
        order=order,
        factors=_merge_adjacent(factors) if merge else tuple(factors),
        label=label or f"suzuki{order}",
    )


def split_symmetric(f: ProductFormula) -> FormulaSplit:
    """Split a palindromic formula into mirror halves (middle factor halved)."""
    if not f.is_palindromic():
        raise NotPalindromic(f"formula {f.label!r} is not palindromic")
    factors = list(f.factors)
    half, odd = divmod(len(factors), 2)
    left = factors[:half]
    if odd:
        h_mid, theta_mid = factors[half]
        left = left + [(h_mid, theta_mid / 2.0)]
    right = [(h, theta) for h, theta in reversed(left)]
    mk = lambda fs, side: ProductFormula(f.n_qubits, f.order, tuple(fs), f.label + side)
    return FormulaSplit(left=mk(left, ".L"), right=mk(right, ".R"), parent=f)


def pauli_rotation_depth(p: PauliString) -> int:
    """Two-qubit entangling depth of one weight-w Pauli rotation.

    Ladder-construction bound 2*ceil(log2 w) - 1, clamped to 0 for
    single-qubit (and identity) rotations.
    """
    w = p.weight
    if w <= 1:
        return 0
    return 2 * math.ceil(math.log2(w)) - 1


def _generator_depth(h: PauliSum) -> int:
    """Entangling depth of one exponential sweep e^{i t theta h}.

    Terms are greedily packed into qubit-disjoint layers (first-fit on the
    support masks); each layer costs the depth of its widest rotation.
    This is a scheduling estimate for line/grid layouts, not hardware-exact.
    """
    layers: list[tuple[int, int]] = []  # (occupied mask, layer cost)
    terms = sorted(h.terms(), key=lambda sc: sc[0].label())
    depth = 0
    for s, _ in terms:
        sup = s.qubit_support()
        cost = pauli_rotation_depth(s)
        if cost == 0:
            continue
        for i, (mask, layer_cost) in enumerate(layers):
            if mask & sup == 0:
                layers[i] = (mask | sup, max(layer_cost, cost))
                break
        else:
            layers.append((sup, cost))
    return sum(cost for _, cost in layers)


def depth_estimate(
    f: ProductFormula, extra_paulis: Sequence[PauliString] = ()
) -> dict:
    """Two-qubit gate depth of one layer of the formula plus a correction.

    Returns ``{"layer_depth": int, "per_layer": {...}}`` where the formula
    part sums the per-factor sweep depths and the correction part is the
    worst extra Pauli rotation.
    """
    per_factor = [_generator_depth(h) for h, _ in f.factors]
    formula_depth = sum(per_factor)
    correction_depth = max((pauli_rotation_depth(p) for p in extra_paulis), default=0)
    return {
        "layer_depth": formula_depth + correction_depth,
        "per_layer": {
            "formula_depth": formula_depth,
            "correction_depth": correction_depth,
            "per_factor": per_factor,
        },
    }
