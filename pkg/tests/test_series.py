"""Operator power series and error-Hamiltonian derivations.

Oracles used here:
- dense matrix products of the formula factors (the formula's first factor
  acts first on the state, i.e. it is the rightmost matrix),
- finite differences with Richardson extrapolation for d/dt of unitaries,
- scipy's ODE integrator for the residual-unitary check,
- closed-form nested-commutator expressions for Omega_2..Omega_4 and the
  symmetric C_3/C_5 coefficients.
"""
import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg

from steer.formulas import split_symmetric, suzuki
from steer.pauli import PauliString, PauliSum, ad_power, commutator
from steer.series import (
    ErrorSeries,
    NonVanishingLowOrder,
    OperatorSeries,
    conjugate_series,
    error_hamiltonian,
    error_hamiltonian_s2_direct,
    integrate_error,
    symmetric_effective_hamiltonian,
    time_ordered_exp,
    zassenhaus,
)


def dense_formula(f, t):
    dim = 1 << f.n_qubits
    m = np.eye(dim, dtype=complex)
    for h, theta in f.factors:
        m = scipy.linalg.expm(1j * t * theta * h.to_matrix()) @ m
    return m


def series_matrix(series, t):
    dim = 1 << series.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for p, coeff in enumerate(series.coeffs):
        out += (t ** p) * coeff.to_matrix()
    return out


def random_pair(seed, n=3, terms=4):
    """Two random Hermitian PauliSums on n qubits with <= `terms` terms."""
    rng = np.random.default_rng(seed)
    labels = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(2 * terms)]
    a = PauliSum.zero(n)
    b = PauliSum.zero(n)
    for lbl in labels[:terms]:
        a = a + PauliSum.from_label(lbl, float(rng.uniform(-1, 1)))
    for lbl in labels[terms:]:
        b = b + PauliSum.from_label(lbl, float(rng.uniform(-1, 1)))
    return a, b


X = PauliSum.from_label("X")
Z = PauliSum.from_label("Z")


# ---------------------------------------------------------------------------
# OperatorSeries arithmetic


def test_series_multiply_truncates():
    s = OperatorSeries.constant(X, 2).shift(1)  # t*X
    prod = s @ s  # t^2 * X X = t^2 * I
    assert prod.coeff(2) == PauliSum.identity(1)
    assert (s @ s @ s).is_zero()  # only a t^3 term, which is discarded


def test_series_integrate_differentiate():
    s = OperatorSeries.constant(Z, 3)
    integ = s.integrate()
    assert integ.coeff(1) == Z
    assert not integ.coeff(0)
    assert integ.differentiate().coeff(0) == Z


def test_conjugate_series_x_rotation_of_z():
    """e^{-itX} Z e^{itX} = cos(2t) Z - sin(2t) Y = Z - 2tY - 2t^2 Z + ..."""
    out = conjugate_series(X, 1.0, OperatorSeries.constant(Z, 2), 2)
    assert out.coeff(0) == Z
    assert out.coeff(1) == PauliSum.from_label("Y", -2.0)
    assert out.coeff(2) == -2.0 * Z
    # dense oracle at a small time
    t = 0.01
    u = scipy.linalg.expm(1j * t * X.to_matrix())
    exact = u.conj().T @ Z.to_matrix() @ u
    assert np.allclose(series_matrix(out, t), exact, atol=1e-5)


def test_conjugate_series_fixed_point():
    h = PauliSum.from_label("XZ", 0.7)
    out = conjugate_series(h, 0.3, OperatorSeries.constant(h, 4), 4)
    assert out.coeff(0) == h
    for p in range(1, 5):
        assert not out.coeff(p)


def test_conjugate_series_zero_theta():
    out = conjugate_series(X, 0.0, OperatorSeries.constant(Z, 3), 3)
    assert out.coeff(0) == Z and not out.coeff(1)


# ---------------------------------------------------------------------------
# error_hamiltonian examples


def test_s1_error_series_leading_term():
    """S1 on {X, Z}: Omega_1 = -2Y (= -i[X,Z])."""
    f = suzuki(1, [X, Z])
    e = error_hamiltonian(f, X + Z, max_order=2)
    assert e.omega(1) == PauliSum.from_label("Y", -2.0)


def test_s2_error_series_leading_term():
    """S2 on {X, Z}: Omega_2 = X - 0.5 Z, one-norm 1.5."""
    f = suzuki(2, [X, Z])
    e = error_hamiltonian(f, X + Z, max_order=4)
    assert e.omega(2) == X - 0.5 * Z
    assert e.omega(2).one_norm() == pytest.approx(1.5)


def test_commuting_partition_zero_series():
    a = PauliSum.from_label("XZ")
    b = PauliSum.from_label("ZX")
    e = error_hamiltonian(suzuki(2, [a, b]), a + b, max_order=4)
    assert e.nonzero_powers() == []


def test_wrong_hamiltonian_rejected():
    f = suzuki(2, [X, Z])
    with pytest.raises(NonVanishingLowOrder):
        error_hamiltonian(f, X + 2.0 * Z, max_order=4)


def test_error_series_is_hermitian_per_power():
    a, b = random_pair(5)
    e = error_hamiltonian(suzuki(2, [a, b]), a + b, max_order=5)
    for j in e.nonzero_powers():
        assert e.omega(j).is_hermitian()


# ---------------------------------------------------------------------------
# oracle equivalences


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_error_series_matches_finite_difference(seed):
    """A(t) = S^dag H S - i (dS^dag/dt) S via Richardson-extrapolated
    central differences on dense matrices."""
    a, b = random_pair(seed, n=2, terms=2)
    h = a + b
    f = suzuki(2, [a, b])
    e = error_hamiltonian(f, h, max_order=8)
    t0 = 0.07
    hm = h.to_matrix()

    def sdag(t):
        return dense_formula(f, t).conj().T

    def a_def(dt):
        d = (sdag(t0 + dt) - sdag(t0 - dt)) / (2 * dt)
        s = dense_formula(f, t0)
        return s.conj().T @ hm @ s - 1j * d @ s

    coarse, fine = a_def(2e-5), a_def(1e-5)
    richardson = fine + (fine - coarse) / 3.0
    a_series = sum(
        (t0 ** j) * e.omega(j).to_matrix() for j in e.nonzero_powers()
    )
    assert np.linalg.norm(richardson - a_series) < 1e-8


@pytest.mark.parametrize("seed", [3, 4])
def test_a2gen_cross_derivation(seed):
    """Generic product-rule derivation equals the explicit S2 form."""
    a, b = random_pair(seed)
    partition = [a, b]
    h = a + b
    via_generic = error_hamiltonian(suzuki(2, partition), h, max_order=5)
    via_s2 = error_hamiltonian_s2_direct(partition, h, max_order=5)
    for j in range(2, 6):
        assert (via_generic.omega(j) - via_s2.omega(j)).one_norm() < 1e-10


def test_ode_residual_unitary():
    """Integrating dF/dt = iA(t)F reconstructs U = S F to high order."""
    a, b = random_pair(11, n=2, terms=2)
    h = a + b
    f = suzuki(2, [a, b])
    e = error_hamiltonian(f, h, max_order=6)
    hm = h.to_matrix()
    dim = hm.shape[0]

    def rhs(t, y):
        fm = y.reshape(dim, dim)
        at = sum((t ** j) * e.omega(j).to_matrix() for j in e.nonzero_powers())
        return (1j * at @ fm).ravel()

    errs = []
    for t_end in (0.2, 0.1):
        sol = scipy.integrate.solve_ivp(
            rhs,
            (0.0, t_end),
            np.eye(dim, dtype=complex).ravel(),
            rtol=1e-10,
            atol=1e-12,
        )
        fm = sol.y[:, -1].reshape(dim, dim)
        u = scipy.linalg.expm(1j * t_end * hm)
        errs.append(np.linalg.norm(u - dense_formula(f, t_end) @ fm))
    # residual is the series truncation, O(t^{max_order+2})
    slope = math.log(errs[0] / errs[1]) / math.log(2)
    assert slope == pytest.approx(8, abs=0.8)
    assert errs[1] < 1e-8


def test_time_ordered_exp_solves_its_ode():
    """F from time_ordered_exp satisfies F' = iA F order by order."""
    a, b = random_pair(21, n=2, terms=2)
    e = error_hamiltonian(suzuki(2, [a, b]), a + b, max_order=4)
    aseries = e.as_series()
    f = time_ordered_exp(aseries, 7)
    lhs = f.differentiate()
    rhs = (1j * aseries) @ f
    for p in range(7):
        assert (lhs.coeff(p) - rhs.coeff(p)).one_norm() < 1e-10


# ---------------------------------------------------------------------------
# closed-form series coefficients for a two-summand symmetric formula


def closed_forms(a, b):
    c2 = -0.125 * (ad_power(a, b, 2) - 2.0 * ad_power(b, a, 2))
    c3 = (1j / 12.0) * (
        ad_power(a, b, 3)
        + 1.5 * commutator(b, ad_power(a, b, 2))
        - 2.0 * ad_power(b, a, 3)
        - 1.5 * commutator(a, ad_power(b, a, 2))
    )
    c4 = (1.0 / 16.0) * (
        (11.0 / 24.0) * ad_power(a, b, 4)
        - ad_power(b, a, 4)
        - (4.0 / 3.0) * commutator(a, ad_power(b, a, 3))
        - 0.5 * commutator(a, commutator(a, ad_power(b, a, 2)))
        + commutator(b, commutator(b, ad_power(a, b, 2)))
        + (1.0 / 3.0) * commutator(b, ad_power(a, b, 3))
        + commutator(a, commutator(b, ad_power(a, b, 2)))
    )
    return c2, c3, c4


@pytest.mark.parametrize("seed", range(4))
def test_s2_closed_forms(seed):
    a, b = random_pair(seed)
    e = error_hamiltonian(suzuki(2, [a, b]), a + b, max_order=4)
    c2, c3, c4 = closed_forms(a, b)
    assert (e.omega(2) - c2).one_norm() < 1e-10
    assert (e.omega(3) - c3).one_norm() < 1e-10
    assert (e.omega(4) - c4).one_norm() < 1e-10


# ---------------------------------------------------------------------------
# symmetric effective Hamiltonian


def sym_c3_c5(a, b):
    c = commutator(a, b)
    c3 = (1.0 / 24.0) * (0.5 * ad_power(a, b, 2) + commutator(b, c))
    c5p = (1.0 / 160.0) * (
        (1.0 / 24.0) * ad_power(a, b, 4)
        + (1.0 / 6.0) * commutator(b, ad_power(a, b, 3))
        + 0.25 * commutator(b, commutator(b, ad_power(a, b, 2)))
        + (1.0 / 6.0) * commutator(b, commutator(b, commutator(b, c)))
    )
    c5 = c5p + (1.0 / 20.0) * commutator(c3, c)
    return c3, c5


@pytest.mark.parametrize("seed", [7, 8, 9])
def test_symmetric_integral_closed_form(seed):
    """int_0^t A_sym = -2 t^3 C3 + 2 t^5 C5 + O(t^7)."""
    a, b = random_pair(seed, n=2, terms=2)
    split = split_symmetric(suzuki(2, [a, b]))
    e = symmetric_effective_hamiltonian(split.left, split.right, a + b, 5)
    c3, c5 = sym_c3_c5(a, b)
    assert ((1.0 / 3.0) * e.omega(2) + 2.0 * c3).one_norm() < 1e-10
    assert ((1.0 / 5.0) * e.omega(4) - 2.0 * c5).one_norm() < 1e-10
    assert not e.omega(3)


def test_symmetric_commuting_split_is_zero():
    a = PauliSum.from_label("XZ")
    b = PauliSum.from_label("ZX")
    split = split_symmetric(suzuki(2, [a, b]))
    e = symmetric_effective_hamiltonian(split.left, split.right, a + b, 4)
    assert e.nonzero_powers() == []


def test_symmetric_residual_identity():
    """U = S_R . Texp(i int A_sym) . S_L to the truncation order."""
    a, b = random_pair(13, n=2, terms=2)
    h = a + b
    split = split_symmetric(suzuki(2, [a, b]))
    e = symmetric_effective_hamiltonian(split.left, split.right, h, 8)
    f = time_ordered_exp(e.as_series(), 9)
    for t in (0.05, 0.1):
        lhs = (
            dense_formula(split.right, t)
            @ series_matrix(f, t)
            @ dense_formula(split.left, t)
        )
        assert np.linalg.norm(lhs - scipy.linalg.expm(1j * t * h.to_matrix())) < 1e-9


# ---------------------------------------------------------------------------
# integrate_error


def test_integrate_error_single_term():
    """A series of just Omega_1 = -2Y integrates to t^2/2 * (-2) = -0.01."""
    e = ErrorSeries(1, 1, 1, {1: PauliSum.from_label("Y", -2.0)})
    weights = dict(integrate_error(e, 0.1))
    assert weights[PauliString.from_label("Y")] == pytest.approx(-0.01)
    assert all(w == 0 for _, w in integrate_error(e, 0.0))


def test_integrate_error_matches_quadrature():
    a, b = random_pair(17, n=3, terms=3)
    e = error_hamiltonian(suzuki(2, [a, b]), a + b, max_order=4)
    t = 0.2
    got = dict(integrate_error(e, t))
    for j in e.nonzero_powers():
        for s, c in e.omega(j).real_terms():
            quad, _ = scipy.integrate.quad(lambda x, jj=j, cc=c: cc * x ** jj, 0, t)
            # each string may receive contributions from several powers
            total = sum(
                cc * t ** (jj + 1) / (jj + 1)
                for jj in e.nonzero_powers()
                for ss, cc in e.omega(jj).real_terms()
                if ss == s
            )
            assert got[s] == pytest.approx(total, abs=1e-12)
            assert abs(quad - c * t ** (j + 1) / (j + 1)) < 1e-12


# ---------------------------------------------------------------------------
# Zassenhaus recursion


def test_zassenhaus_s1_exact_exponents():
    a, b = random_pair(23, n=2, terms=2)
    h = a + b
    w = dict(zassenhaus(suzuki(1, [a, b]), h, 3))
    c = commutator(a, b)
    assert (w[2] - 0.5j * c).one_norm() < 1e-12
    expected3 = (1.0 / 6.0) * (2.0 * commutator(a, c) + commutator(b, c))
    assert (w[3] - expected3).one_norm() < 1e-12


def test_zassenhaus_s2_third_order():
    """S2 t^3 exponent: e^{-i(t^3/24)[A+2B,[A,B]]}."""
    a, b = random_pair(29, n=2, terms=2)
    w = dict(zassenhaus(suzuki(2, [a, b]), a + b, 3))
    expected = (-1.0 / 24.0) * commutator(a + 2.0 * b, commutator(a, b))
    assert (w[3] - expected).one_norm() < 1e-12


def test_zassenhaus_commuting_case():
    a = PauliSum.from_label("XZ")
    b = PauliSum.from_label("ZX")
    for _, wj in zassenhaus(suzuki(1, [a, b]), a + b, 4):
        assert not wj


def test_zassenhaus_residual_order():
    """Truncating after the t^n exponent leaves an O(t^{n+1}) residual."""
    a, b = random_pair(31, n=2, terms=2)
    h = a + b
    f = suzuki(1, [a, b])
    hm = h.to_matrix()
    for n_max in (2, 3, 4):
        errs = []
        for t in (0.05, 0.025):
            m = dense_formula(f, t)
            for j, wj in zassenhaus(f, h, n_max):
                m = m @ scipy.linalg.expm(1j * (t ** j) * wj.to_matrix())
            errs.append(np.linalg.norm(m - scipy.linalg.expm(1j * t * hm)))
        slope = math.log(errs[0] / errs[1]) / math.log(2)
        assert slope == pytest.approx(n_max + 1, abs=0.3)


def test_error_series_requires_enough_orders():
    f = suzuki(2, [X, Z])
    with pytest.raises(ValueError):
        error_hamiltonian(f, X + Z, max_order=3)
