"""Truncated operator power series in t and error-Hamiltonian derivations.

Everything here is carried with the physics sign convention e^{+itH};
conversion to rotation angles happens in the sampler. Truncation is hard:
powers above ``max_order`` are discarded eagerly to keep nested-commutator
term counts in check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .pauli import DROP_TOLERANCE, DimensionError, PauliString, PauliSum, commutator


class NonVanishingLowOrder(ValueError):
    """A series power that should be certified zero is not.

    Signals a wrong formula/Hamiltonian pairing (the declared order of the
    product formula does not hold).
    """


@dataclass(frozen=True)
class OperatorSeries:
    """Power series in t with PauliSum coefficients, truncated at max_order."""

    n_qubits: int
    coeffs: tuple[PauliSum, ...]

    @property
    def max_order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, n_qubits: int, max_order: int) -> "OperatorSeries":
        return cls(n_qubits, tuple(PauliSum.zero(n_qubits) for _ in range(max_order + 1)))

    @classmethod
    def constant(cls, a: PauliSum, max_order: int) -> "OperatorSeries":
        tail = tuple(PauliSum.zero(a.n_qubits) for _ in range(max_order))
        return cls(a.n_qubits, (a,) + tail)

    @classmethod
    def identity(cls, n_qubits: int, max_order: int) -> "OperatorSeries":
        return cls.constant(PauliSum.identity(n_qubits), max_order)

    def coeff(self, power: int) -> PauliSum:
        if 0 <= power <= self.max_order:
            return self.coeffs[power]
        return PauliSum.zero(self.n_qubits)

    def _check(self, other: "OperatorSeries") -> None:
        if self.n_qubits != other.n_qubits:
            raise DimensionError("mismatched n_qubits")

    def truncate(self, max_order: int) -> "OperatorSeries":
        if max_order >= self.max_order:
            pad = tuple(PauliSum.zero(self.n_qubits) for _ in range(max_order - self.max_order))
            return OperatorSeries(self.n_qubits, self.coeffs + pad)
        return OperatorSeries(self.n_qubits, self.coeffs[: max_order + 1])

    def __add__(self, other: "OperatorSeries") -> "OperatorSeries":
        self._check(other)
        order = max(self.max_order, other.max_order)
        return OperatorSeries(
            self.n_qubits, tuple(self.coeff(j) + other.coeff(j) for j in range(order + 1))
        )

    def __sub__(self, other: "OperatorSeries") -> "OperatorSeries":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "OperatorSeries":
        return OperatorSeries(self.n_qubits, tuple(c * scalar for c in self.coeffs))

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorSeries") -> "OperatorSeries":
        """Series product; powers above the larger max_order are discarded."""
        self._check(other)
        order = max(self.max_order, other.max_order)
        out = []
        for j in range(order + 1):
            acc = PauliSum.zero(self.n_qubits)
            for p in range(j + 1):
                if p <= self.max_order and j - p <= other.max_order:
                    acc = acc + (self.coeffs[p] @ other.coeffs[j - p])
            out.append(acc)
        return OperatorSeries(self.n_qubits, tuple(out))

    def adjoint(self) -> "OperatorSeries":
        return OperatorSeries(self.n_qubits, tuple(c.adjoint() for c in self.coeffs))

    def integrate(self) -> "OperatorSeries":
        """Term-wise integral from 0; raises max_order by one."""
        zero = PauliSum.zero(self.n_qubits)
        out = [zero] + [c * (1.0 / (j + 1)) for j, c in enumerate(self.coeffs)]
        return OperatorSeries(self.n_qubits, tuple(out))

    def differentiate(self) -> "OperatorSeries":
        if self.max_order == 0:
            return OperatorSeries.zero(self.n_qubits, 0)
        out = [c * float(j) for j, c in enumerate(self.coeffs)][1:]
        return OperatorSeries(self.n_qubits, tuple(out))

    def shift(self, powers: int) -> "OperatorSeries":
        """Multiply by t^powers, keeping max_order fixed (high powers drop)."""
        zero = PauliSum.zero(self.n_qubits)
        out = [zero] * min(powers, self.max_order + 1) + list(self.coeffs)
        return OperatorSeries(self.n_qubits, tuple(out[: self.max_order + 1]))

    def evaluate(self, t: float) -> PauliSum:
        acc = PauliSum.zero(self.n_qubits)
        for j, c in enumerate(self.coeffs):
            acc = acc + c * (t ** j)
        return acc

    def is_zero(self, tol: float = DROP_TOLERANCE) -> bool:
        return all(c.one_norm() <= tol for c in self.coeffs)


def conjugate_by_generator(g: PauliSum, x: OperatorSeries, order: int) -> OperatorSeries:
    """Series of e^{-t g} X(t) e^{t g} truncated at ``order``.

    ``g`` is a t-independent generator (not necessarily anti-Hermitian);
    each nesting level contributes t^n (-1)^n / n! ad_g^n.
    """
    if g.n_qubits != x.n_qubits:
        raise DimensionError("mismatched n_qubits")
    x = x.truncate(order)
    out = list(x.coeffs)
    for j, cj in enumerate(x.coeffs):
        nested = cj
        for n in range(1, order - j + 1):
            nested = commutator(g, nested)
            if not nested:
                break
            out[j + n] = out[j + n] + nested * ((-1.0) ** n / math.factorial(n))
    return OperatorSeries(x.n_qubits, tuple(out))


def conjugate_series(h: PauliSum, theta: float, x: OperatorSeries, order: int) -> OperatorSeries:
    """Series of e^{-i t theta h} X(t) e^{i t theta h} truncated at ``order``."""
    if theta == 0.0:
        return x.truncate(order)
    return conjugate_by_generator((1j * theta) * h, x, order)


def time_ordered_exp(a: OperatorSeries, order: int) -> OperatorSeries:
    """Series of F(t) with dF/dt = i A(t) F, F(0) = 1, truncated at ``order``.

    Solved power by power: (m+1) F_{m+1} = i sum_{j+p=m} A_j F_p.
    """
    n = a.n_qubits
    coeffs = [PauliSum.identity(n)]
    for m in range(order):
        acc = PauliSum.zero(n)
        for j in range(m + 1):
            if j <= a.max_order:
                acc = acc + a.coeffs[j] @ coeffs[m - j]
        coeffs.append((1j / (m + 1)) * acc)
    return OperatorSeries(n, tuple(coeffs))


@dataclass(frozen=True)
class ErrorSeries:
    """Certified expansion A(t) = sum_{j>=k} t^j Omega_j of an error Hamiltonian.

    Powers are ABSOLUTE powers j of t; sampling-ensemble index shifts
    (m = j - k) happen only in the sampler module. Every Omega_j is
    Hermitian with real coefficients.
    """

    k: int
    n_qubits: int
    max_order: int
    omegas: dict[int, PauliSum]

    def omega(self, j: int) -> PauliSum:
        return self.omegas.get(j, PauliSum.zero(self.n_qubits))

    def powers(self) -> list[int]:
        """All tracked powers k..max_order."""
        return list(range(self.k, self.max_order + 1))

    def nonzero_powers(self) -> list[int]:
        return [j for j in self.powers() if self.omega(j).one_norm() > 0.0]

    def alpha(self, j: int) -> list[tuple[PauliString, float]]:
        """Pauli-resolved real coefficients of Omega_j, label-sorted."""
        return self.omega(j).real_terms()

    def lam(self, j: int) -> float:
        """One-norm of the power-j coefficients."""
        return self.omega(j).one_norm()

    def lambda_tilde(self) -> float:
        """max_j lambda_j; controls fluctuation bounds."""
        return max((self.lam(j) for j in self.powers()), default=0.0)

    def as_series(self) -> OperatorSeries:
        coeffs = [self.omega(j) if j >= self.k else PauliSum.zero(self.n_qubits)
                  for j in range(self.max_order + 1)]
        return OperatorSeries(self.n_qubits, tuple(coeffs))


def _series_to_error(
    a: OperatorSeries, k: int, max_order: int, n_qubits: int, tol: float = 1e-9
) -> ErrorSeries:
    """Certify low-power vanishing and Hermiticity, then package."""
    for j in range(k):
        norm = a.coeff(j).one_norm()
        if norm > tol:
            raise NonVanishingLowOrder(
                f"power t^{j} has one-norm {norm:.3e}; formula is not order {k} for this H"
            )
    omegas: dict[int, PauliSum] = {}
    for j in range(k, max_order + 1):
        om = a.coeff(j)
        if not om.is_hermitian(tol=1e-9):
            raise ValueError(f"Omega_{j} is not Hermitian")
        # re-normalize to exactly real coefficients
        omegas[j] = PauliSum(n_qubits, ((s, complex(c.real)) for s, c in om.terms()))
    return ErrorSeries(k=k, n_qubits=n_qubits, max_order=max_order, omegas=omegas)


def _minus_i_dsdag_s(factors, max_order: int, n_qubits: int) -> OperatorSeries:
    """Series of -i (dS^dag/dt) S for S = prod_j e^{i t theta_j h_j}.

    Factor-by-factor product rule: factor k contributes -theta_k h_k
    conjugated through the factors above it (innermost k+1).
    """
    acc = OperatorSeries.zero(n_qubits, max_order)
    for idx, (h_k, theta_k) in enumerate(factors):
        y = OperatorSeries.constant(h_k, max_order)
        for h_m, theta_m in factors[idx + 1:]:
            y = conjugate_series(h_m, theta_m, y, max_order)
        acc = acc - theta_k * y
    return acc


def _conjugate_through(factors, x: OperatorSeries, max_order: int) -> OperatorSeries:
    """Series of S^dag X S for S = prod e^{i t theta h}, innermost factor first."""
    y = x.truncate(max_order)
    for h, theta in factors:
        y = conjugate_series(h, theta, y, max_order)
    return y


def error_hamiltonian_series(formula, H: PauliSum, max_order: int) -> OperatorSeries:
    """Raw series of A(t) = S^dag H S - i (dS^dag/dt) S, no certification."""
    if formula.n_qubits != H.n_qubits:
        raise DimensionError("mismatched n_qubits")
    conj_h = _conjugate_through(formula.factors, OperatorSeries.constant(H, max_order), max_order)
    return conj_h + _minus_i_dsdag_s(formula.factors, max_order, H.n_qubits)


def error_hamiltonian(formula, H: PauliSum, max_order: int | None = None) -> ErrorSeries:
    """Exact Trotter-error Hamiltonian of a product formula, as a power series.

    The leading power is the formula's declared order k; powers below k are
    verified zero (raising :class:`NonVanishingLowOrder` otherwise).
    """
    k = formula.order
    if max_order is None:
        max_order = 2 * k
    if max_order < 2 * k:
        raise ValueError("max_order must be at least 2k")
    a = error_hamiltonian_series(formula, H, max_order)
    return _series_to_error(a, k, max_order, H.n_qubits)


def _left_half_series(formula, H: PauliSum, max_order: int) -> OperatorSeries:
    """Series of -i (dS^L_dag/dt) S^L + (1/2) S^L_dag H S^L."""
    conj_h = _conjugate_through(formula.factors, OperatorSeries.constant(H, max_order), max_order)
    return 0.5 * conj_h + _minus_i_dsdag_s(formula.factors, max_order, H.n_qubits)


def _right_half_series(formula, H: PauliSum, max_order: int) -> OperatorSeries:
    """Series of -i S^R (dS^R_dag/dt) + (1/2) S^R H S^R_dag (as a function of t).

    S^R H S^R_dag conjugates outermost-last: innermost factor is the last in
    the product, with flipped rotation sign. The derivative part reduces to
    h_k conjugated through the factors *below* it.
    """
    n = H.n_qubits
    y = OperatorSeries.constant(H, max_order)
    for h, theta in reversed(formula.factors):
        y = conjugate_series(h, -theta, y, max_order)
    acc = 0.5 * y
    for idx, (h_k, theta_k) in enumerate(formula.factors):
        w = OperatorSeries.constant(h_k, max_order)
        for h_m, theta_m in reversed(formula.factors[:idx]):
            w = conjugate_series(h_m, -theta_m, w, max_order)
        acc = acc - theta_k * w
    return acc


def symmetric_effective_hamiltonian(
    left, right, H: PauliSum, max_order: int, k: int | None = None
) -> ErrorSeries:
    """Effective Hamiltonian generating the mid-formula error unitary.

    For a split S = S^L S^R of a k-th order formula, returns the series of
    the Hermitian generator of F in U = S^L F S^R. The self-consistent
    correction terms (the iterated-commutator tail beyond the two bare
    halves) are generated by re-substituting F = T-exp of the running
    series until the series is stable at ``max_order``.
    """
    if left.n_qubits != H.n_qubits or right.n_qubits != H.n_qubits:
        raise DimensionError("mismatched n_qubits")
    a_left = _left_half_series(left, H, max_order)
    a_right = _right_half_series(right, H, max_order)
    base = a_left + a_right
    a = base
    for _ in range(max_order + 1):
        f = time_ordered_exp(a, max_order)
        f_dag = f.adjoint()
        a_new = a_left + (f @ a_right @ f_dag)
        if (a_new - a).is_zero(tol=1e-13):
            a = a_new
            break
        a = a_new
    if k is None:
        k = next((j for j in range(max_order + 1) if a.coeff(j).one_norm() > 1e-9), max_order)
    return _series_to_error(a, k, max_order, H.n_qubits)


def error_hamiltonian_s2_direct(partition, H: PauliSum, max_order: int) -> ErrorSeries:
    """Second-order error Hamiltonian from the explicit palindromic form.

    Independent route used to cross-check :func:`error_hamiltonian`: the
    derivative term of the palindrome prod_m e^{i(t/2)h_m} prod_m' e^{i(t/2)h_m'}
    is written out per summand instead of per factor.
    """
    n = H.n_qubits
    l = len(partition)
    fwd = [(h, 0.5) for h in partition]          # S2 = fwd sweep then reverse sweep
    rev = [(h, 0.5) for h in reversed(partition)]
    factors = fwd + rev
    conj_h = _conjugate_through(factors, OperatorSeries.constant(H, max_order), max_order)
    acc = conj_h
    for kk in range(l):
        h_k = partition[kk]
        # inner piece: conjugate h_k up the reverse sweep then down the tail
        inner = OperatorSeries.constant(h_k, max_order)
        for m in range(kk, l):                   # reverse sweep factors l..k (innermost k)
            inner = conjugate_series(partition[m], 0.5, inner, max_order)
        for m in range(l - 1, kk, -1):           # forward tail k+1..l (innermost l)
            inner = conjugate_series(partition[m], 0.5, inner, max_order)
        combined = OperatorSeries.constant(h_k, max_order) + inner
        for m in range(kk, -1, -1):              # shared head factors k..1 (innermost k)
            combined = conjugate_series(partition[m], 0.5, combined, max_order)
        acc = acc - 0.5 * combined
    return _series_to_error(acc, 2, max_order, n)


def integrate_error(e: ErrorSeries, t: float) -> list[tuple[PauliString, float]]:
    """Pauli-resolved coefficients of the time integral of the error series."""
    if t < 0:
        raise ValueError("t must be non-negative")
    acc = PauliSum.zero(e.n_qubits)
    for j in e.powers():
        acc = acc + e.omega(j) * (t ** (j + 1) / (j + 1))
    return acc.real_terms()


def zassenhaus(formula, H: PauliSum, n_max: int) -> list[tuple[int, PauliSum]]:
    """Generalized Zassenhaus exponents for e^{itH} = S_k(t) prod_j e^{i t^j W_j}.

    The recursion runs on anti-Hermitian generators (g_m = i theta_m h_m,
    Z = iH) and converts back to Hermitian exponents W_j = Omega_j / i at
    the end. Returns [(j, W_j)] for j = k+1 .. n_max.
    """
    k = formula.order
    if n_max < k + 1:
        raise ValueError("n_max must be at least k+1")
    n = H.n_qubits
    order = n_max - 1  # F series only needed up to t^{n_max - 1}
    # The derivation below treats its factor list as a left-to-right matrix
    # product; the package convention applies factors[0] to the state first
    # (i.e. factors[0] is the rightmost matrix), so reverse on entry.
    factors = tuple(reversed(formula.factors))
    # F_k = (d/dt S^-1) S + S^-1 Z S with Z = iH
    z = OperatorSeries.constant(1j * H, order)
    conj_z = z
    for h, theta in factors:
        conj_z = conjugate_by_generator((1j * theta) * h, conj_z, order)
    f = conj_z
    for idx, (h_k, theta_k) in enumerate(factors):
        y = OperatorSeries.constant((1j * theta_k) * h_k, order)
        for h_m, theta_m in factors[idx + 1:]:
            y = conjugate_by_generator((1j * theta_m) * h_m, y, order)
        f = f - y
    for j in range(k):
        norm = f.coeff(j).one_norm()
        if norm > 1e-9:
            raise NonVanishingLowOrder(
                f"generator power t^{j} has one-norm {norm:.3e}; formula is not order {k}"
            )
    out: list[tuple[int, PauliSum]] = []
    for nn in range(k + 1, n_max + 1):
        omega_n = f.coeff(nn - 1) * (1.0 / nn)
        w_n = (-1j) * omega_n
        if not w_n.is_hermitian(tol=1e-9):
            raise ValueError(f"Zassenhaus exponent {nn} is not i*Hermitian")
        out.append((nn, PauliSum(n, ((s, complex(c.real)) for s, c in w_n.terms()))))
        # G_n = F_{n-1} - n t^{n-1} Omega_n, then F_n = e^{t^n ad_{Omega_n}} (G_n)
        delta = OperatorSeries.constant(float(nn) * omega_n, order).shift(nn - 1)
        g = f - delta
        f_next = g
        nested = g
        p = 1
        while nn * p <= order:
            nested = OperatorSeries(
                n, tuple(commutator(omega_n, c) for c in nested.coeffs)
            )
            if nested.is_zero():
                break
            f_next = f_next + nested.shift(nn * p) * (1.0 / math.factorial(p))
            p += 1
        f = f_next
    return out
