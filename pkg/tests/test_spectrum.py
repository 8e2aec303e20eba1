import numpy as np
import pytest
import scipy.sparse as sp

from spinlab.basis import build_sector_basis
from spinlab.errors import ConvergenceError, NotHermitianError, ParameterError
from spinlab.heisenberg import ChainParams, build_hamiltonian, sector_matrix
from spinlab.pauli import PauliString, PauliSum
from spinlab.spectrum import degeneracy_and_gap, kron_sum, spectrum, stack_operators, stack_spectra


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def test_dense_spectrum_matches_numpy(rng):
    a = random_hermitian(rng, 40)
    rep = spectrum(a)
    assert np.allclose(rep.eigenvalues, np.linalg.eigvalsh(a))
    assert rep.method == "dense" and rep.residual_bound <= 1e-10


def test_lanczos_agrees_with_dense_path():
    # N = 14, M = 7 has dimension 3432; force the sparse path with a low threshold.
    _, mat = sector_matrix(ChainParams(14, 1.0, 0.0), 7)
    dense = spectrum(mat, 6)
    sparse = spectrum(mat, 6, dense_threshold=100)
    assert sparse.method == "lanczos"
    assert np.allclose(sparse.eigenvalues, dense.eigenvalues, atol=1e-9)


def test_lanczos_is_seed_reproducible():
    _, mat = sector_matrix(ChainParams(12, 1.0, 0.0), 5)
    a = spectrum(mat, 4, dense_threshold=10, seed=7).eigenvalues
    b = spectrum(mat, 4, dense_threshold=10, seed=7).eigenvalues
    assert np.array_equal(a, b)


def test_lanczos_failure_reports_best_residual():
    _, mat = sector_matrix(ChainParams(12, 1.0, 0.0), 6)
    with pytest.raises(ConvergenceError) as info:
        spectrum(mat, 4, dense_threshold=10, max_iter=1)
    assert "best_residual" in info.value.context


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_rejects_bad_k():
    with pytest.raises(ParameterError):
        spectrum(np.eye(3), 5)
    with pytest.raises(ParameterError):
        spectrum(sp.identity(50, format="csr"), "all", dense_threshold=10)


def test_degeneracy_and_gap():
    deg, gap = degeneracy_and_gap([0, 0, 1e-12, 2.0, 3.0])
    # measured from the top of the ground cluster
    assert deg == 3 and gap == 2.0 - 1e-12
    assert degeneracy_and_gap([1.0, 1.0]) == (2, 0.0)


def test_ground_state_report_for_xxx_chain():
    # At B = 0 the ferromagnetic ground multiplet is the S = N/2 multiplet.
    n = 6
    rep = spectrum(build_hamiltonian(ChainParams(n, 1.0, 0.0)).to_sparse(), "all")
    assert rep.ground_degeneracy == n + 1
    assert abs(rep.eigenvalues[0]) < 1e-12
    assert not rep.gapless_at_size


def test_field_splits_ground_multiplet():
    rep = spectrum(build_hamiltonian(ChainParams(6, 1.0, 0.3)).to_sparse(), "all")
    assert rep.ground_degeneracy == 1
    assert rep.gap == pytest.approx(0.3, abs=1e-10)


def test_stack_spectra_is_sorted_outer_sum():
    assert stack_spectra([0, 1], [0, 10]).tolist() == [0, 1, 10, 11]


def test_kron_sum_dense_and_sparse(rng):
    a, b = random_hermitian(rng, 3), random_hermitian(rng, 4)
    dense = kron_sum(a, b)
    sparse = kron_sum(sp.csr_matrix(a), sp.csr_matrix(b)).toarray()
    assert np.allclose(dense, sparse)
    assert np.allclose(np.linalg.eigvalsh(dense), stack_spectra(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)))


def test_stack_operators_places_second_block_on_new_sites():
    h1 = PauliSum(1, [PauliString(1, 0, 1)])
    h2 = PauliSum(2, [PauliString(2, 3, 0)])
    s = stack_operators(h1, h2)
    assert s.n_sites == 3
    assert {t.key for t in s.terms} == {(0, 1), (6, 0)}
