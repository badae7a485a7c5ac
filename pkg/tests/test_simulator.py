"""Statevector backend versus dense linear algebra."""
import numpy as np
import pytest
import scipy.linalg

from steer.formulas import split_symmetric, suzuki
from steer.pauli import DimensionError, PauliString, PauliSum
from steer.rng import SampleStream
from steer.sampler import build_ensemble, sample
from steer.series import error_hamiltonian, symmetric_effective_hamiltonian
from steer.simulator import (
    NonCommutingGenerator,
    StateVector,
    TooLarge,
    apply_exp_factor,
    apply_formula,
    apply_pauli_rotation,
    exact_evolve,
    mean_state_error,
    run_layers,
    sparse_matrix,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


@pytest.mark.parametrize("label", ["X", "Y", "Z", "XZ", "YY", "IXZ", "ZIY"])
def test_rotation_matches_dense(label):
    p = PauliString.from_label(label)
    s = random_state(p.n_qubits, 1)
    theta = 0.731
    got = apply_pauli_rotation(s, p, theta)
    u = scipy.linalg.expm(1j * theta * p.to_matrix())
    assert np.allclose(got.amplitudes, u @ s.amplitudes, atol=1e-12)


def test_identity_rotation_is_global_phase():
    s = random_state(2, 2)
    got = apply_pauli_rotation(s, PauliString.identity(2), 0.4)
    assert np.allclose(got.amplitudes, np.exp(0.4j) * s.amplitudes)


def test_exp_factor_commuting_fast_path():
    h = PauliSum.from_label("XXI", 0.6) + PauliSum.from_label("IIZ", -1.1)
    assert h.all_strings_commute()
    s = random_state(3, 3)
    got = apply_exp_factor(s, h, 0.37)
    u = scipy.linalg.expm(0.37j * h.to_matrix())
    assert np.allclose(got.amplitudes, u @ s.amplitudes, atol=1e-12)


def test_exp_factor_dense_fallback():
    h = PauliSum.from_label("XI", 1.0) + PauliSum.from_label("ZI", 0.5)
    assert not h.all_strings_commute()
    s = random_state(2, 4)
    got = apply_exp_factor(s, h, 0.2)
    u = scipy.linalg.expm(0.2j * h.to_matrix())
    assert np.allclose(got.amplitudes, u @ s.amplitudes, atol=1e-12)


def test_exp_factor_noncommuting_too_large():
    n = 11
    h = PauliSum.from_label("X" + "I" * (n - 1)) + PauliSum.from_label(
        "Z" + "I" * (n - 1)
    )
    s = StateVector.basis_state(n, 0)
    with pytest.raises(NonCommutingGenerator):
        apply_exp_factor(s, h, 0.1)


def test_sparse_matrix_matches_dense():
    h = PauliSum.from_label("XZ", 0.3) + PauliSum.from_label("YI", -0.8)
    assert np.allclose(sparse_matrix(h).toarray(), h.to_matrix(), atol=1e-14)


def test_exact_evolve_dense_and_sparse_agree():
    n = 11  # above the dense-matrix limit, exercises expm_multiply
    rng = np.random.default_rng(7)
    h = PauliSum.zero(n)
    for _ in range(4):
        lbl = "".join(rng.choice(list("IXYZ"), n))
        h = h + PauliSum.from_label(lbl, float(rng.uniform(-1, 1)))
    s = StateVector.basis_state(n, 5)
    got = exact_evolve(h, 0.3, s)
    u = scipy.linalg.expm(0.3j * h.to_matrix())
    assert np.allclose(got.amplitudes, u @ s.amplitudes, atol=1e-10)


def test_exact_evolve_size_limit():
    n = 15
    h = PauliSum.from_label("X" + "I" * (n - 1))
    with pytest.raises(TooLarge):
        exact_evolve(h, 0.1, StateVector.basis_state(n, 0))


def test_dimension_mismatch():
    s = StateVector.basis_state(2, 0)
    with pytest.raises(DimensionError):
        apply_pauli_rotation(s, PauliString.from_label("X"), 0.1)


# ---------------------------------------------------------------------------
# layered evolution


def ising_setup():
    a = PauliSum.from_label("ZI") + PauliSum.from_label("IZ")
    b = PauliSum.from_label("XX")
    return [a, b], a + b


def test_run_layers_matches_manual_product():
    partition, h = ising_setup()
    f = suzuki(2, partition)
    s0 = random_state(2, 11)
    got = run_layers(f, [], 4, 0.8, s0)
    manual = s0
    for _ in range(4):
        manual = apply_formula(manual, f, 0.2)
    assert np.allclose(got.amplitudes, manual.amplitudes, atol=1e-14)


def test_layered_corrections_reduce_error():
    """Averaged corrected trajectories beat the bare formula."""
    partition, h = ising_setup()
    f = suzuki(2, partition)
    e = error_hamiltonian(f, h, max_order=4)
    ens = build_ensemble(e, "standard")
    s0 = random_state(2, 13)
    t, layers, n_samples = 0.6, 2, 3000
    finals = []
    for smp in range(n_samples):
        corrs = [sample(ens, t / layers, SampleStream(17, lay, smp)) for lay in range(layers)]
        finals.append(run_layers(f, corrs, layers, t, s0))
    err_corrected = mean_state_error(h, t, finals, s0)
    bare = run_layers(f, [], layers, t, s0)
    err_bare = mean_state_error(h, t, [bare], s0)
    assert err_corrected < 0.3 * err_bare


def test_mid_circuit_correction_placement():
    partition, h = ising_setup()
    f = suzuki(2, partition)
    split = split_symmetric(f)
    e = symmetric_effective_hamiltonian(split.left, split.right, h, 4)
    ens = build_ensemble(e, "symmetric")
    s0 = random_state(2, 17)
    t = 0.5
    corr = sample(ens, t, SampleStream(23, 0, 0))
    assert corr.mid_circuit
    got = run_layers(f, [corr], 1, t, s0, split=split)
    manual = apply_formula(s0, split.left, t)
    for p, theta in corr.rotations:
        manual = apply_pauli_rotation(manual, p, theta)
    manual = apply_formula(manual, split.right, t)
    assert np.allclose(got.amplitudes, manual.amplitudes, atol=1e-14)
    with pytest.raises(ValueError):
        run_layers(f, [corr], 1, t, s0)  # mid-circuit needs the split
