import math

import numpy as np
import pytest

from spinlab.basis import assemble, build_sector_basis, operator_norm
from spinlab.errors import ParameterError
from spinlab.heisenberg import (
    ChainParams,
    MagnonMomentum,
    build_hamiltonian,
    commutator_with_creation,
    creation_commutator_closed_form,
    dispersion_table,
    eigen_residual,
    magnon_creation,
    magnon_energy,
    one_magnon_state,
    symmetry_norms,
    total_raising,
    translate,
    two_free_magnons,
    vacuum,
    yangian_commutator_norms,
)
from spinlab.pauli import commutator

from conftest import heisenberg_oracle


def test_two_site_periodic_spectrum():
    # The single bond is counted from both sides on a 2-site ring.
    ev = np.linalg.eigvalsh(build_hamiltonian(ChainParams(2, 1.0, 0.0)).to_dense())
    assert np.allclose(ev, [0, 0, 0, 2])


@pytest.mark.parametrize("boundary", ["periodic", "open"])
def test_vacuum_has_zero_energy(boundary):
    p = ChainParams(8, 1.3, 0.4, boundary)
    h = build_hamiltonian(p).to_sparse()
    assert np.linalg.norm(h @ vacuum(8)) <= 1e-13


def test_dispersion_is_exact_for_twelve_sites():
    rows = dispersion_table(ChainParams(12, 1.0, 0.25))
    assert len(rows) == 12
    for r in rows:
        assert r.e_analytic == pytest.approx(0.25 + 2 * math.sin(r.k / 2) ** 2, abs=1e-15)
        assert abs(r.e_numeric - r.e_analytic) <= 1e-12
        assert r.residual <= 1e-12


def test_dispersion_against_kron_oracle():
    n, J, B = 6, 0.8, 0.1
    full = heisenberg_oracle(n, J, B)
    for m in range(n):
        k = MagnonMomentum(m, n)
        psi = np.zeros(2**n, dtype=complex)
        for a in range(n):
            psi[1 << a] = np.exp(1j * k.value * a)
        assert np.allclose(full @ psi, magnon_energy(k.value, J, B) * psi, atol=1e-13)


def test_magnon_energy_values():
    assert magnon_energy(0.0, 1.0, 0.3) == 0.3
    assert magnon_energy(math.pi, 2.0, 0.0) == pytest.approx(4.0)


def test_momentum_validation():
    assert MagnonMomentum.wrapped(-1, 8).m == 7
    with pytest.raises(ParameterError):
        MagnonMomentum(8, 8)


@pytest.mark.parametrize("m", [0, 1, 3, 5])
def test_closed_form_commutator(m):
    p = ChainParams(6, 0.9, 0.2)
    k = MagnonMomentum(m, 6)
    assert commutator_with_creation(p, k).allclose(creation_commutator_closed_form(p, k), tol=1e-12)


@pytest.mark.parametrize("m", range(8))
def test_commutator_on_vacuum_gives_energy(m):
    p = ChainParams(8, 1.0, 0.3)
    k = MagnonMomentum(m, 8)
    comm = commutator_with_creation(p, k).to_sparse()
    created = magnon_creation(k).to_sparse() @ vacuum(8)
    assert np.linalg.norm(comm @ vacuum(8) - magnon_energy(k.value, 1.0, 0.3) * created) <= 1e-12


def test_free_two_magnon_product_is_not_an_eigenstate():
    n = 12
    p = ChainParams(n, 1.0, 0.0)
    h2 = assemble(build_hamiltonian(p), build_sector_basis(n, 2)).matrix
    psi = two_free_magnons(n, 2, 5)
    e = magnon_energy(2 * math.pi * 2 / n) + magnon_energy(2 * math.pi * 5 / n)
    assert eigen_residual(h2, psi, e) > 1e-3


def test_one_magnon_state_norm():
    psi = one_magnon_state(MagnonMomentum(3, 10))
    assert np.vdot(psi, psi).real == pytest.approx(10)


def test_total_spin_symmetry():
    assert all(v <= 1e-12 for v in symmetry_norms(ChainParams(6, 1.0, 0.0)).values())
    norms = symmetry_norms(ChainParams(6, 1.0, 0.5))
    assert norms["Sz"] <= 1e-12
    assert norms["Sx"] > 0.1 and norms["Sy"] > 0.1


def test_raising_operator_commutes_at_zero_field():
    h = build_hamiltonian(ChainParams(5, 1.0, 0.0))
    assert commutator(h, total_raising(5)).is_zero()


def test_translation_invariance():
    h = build_hamiltonian(ChainParams(7, 1.0, 0.2))
    assert translate(h, 1).allclose(h)
    h_open = build_hamiltonian(ChainParams(7, 1.0, 0.2, "open"))
    assert not translate(h_open, 1).allclose(h_open)


def test_yangian_norms_are_reported():
    norms = yangian_commutator_norms(6)
    # Frozen from the first run; these are reported, not asserted as physics.
    assert norms["periodic"]["S2z"] == pytest.approx(5.2915026221291814, rel=1e-10)
    assert norms["open"]["S2z"] == pytest.approx(1.0, rel=1e-10)
    assert norms["open"]["S2plus"] == pytest.approx(math.sqrt(0.5), rel=1e-10)


def test_operator_norm_of_hamiltonian():
    # At B = 0, J = 1 on 4 sites the top level is 3 (singlet sector bound).
    ev = np.linalg.eigvalsh(heisenberg_oracle(4, 1.0, 0.0))
    assert operator_norm(build_hamiltonian(ChainParams(4))) == pytest.approx(max(abs(ev)))


def test_parameter_validation():
    with pytest.raises(ParameterError):
        ChainParams(1)
    with pytest.raises(ParameterError):
        ChainParams(4, boundary="twisted")
    with pytest.raises(ParameterError):
        ChainParams(4, J=math.inf)
    with pytest.raises(ParameterError):
        dispersion_table(ChainParams(4, boundary="open"))
