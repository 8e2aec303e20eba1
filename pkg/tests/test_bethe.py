import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinlab.basis import assemble, build_sector_basis
from spinlab.bethe import (
    _dtheta,
    bethe_state,
    bethe_sweep,
    quantization_residual,
    scattering_phase,
    sector_spectrum,
    solve_multi_magnon,
    solve_two_magnon,
    theta,
    two_magnon_state,
    wrap,
)
from spinlab.errors import DegenerateStateError, ParameterError, SingularMomentumError
from spinlab.heisenberg import ChainParams, build_hamiltonian, eigen_residual

momenta = st.floats(0.05, 2 * math.pi - 0.05)


@given(momenta, momenta)
def test_scattering_amplitude_is_a_phase(k, kp):
    s = scattering_phase(k, kp)
    assert abs(abs(s.A) - 1) < 1e-14
    assert abs(np.exp(1j * s.theta) - s.A) < 1e-13
    assert abs(theta(k, kp) - s.theta) < 1e-13 or abs(abs(s.theta) - math.pi) < 1e-9


@given(momenta, momenta)
def test_swapping_momenta_inverts_amplitude(k, kp):
    a = scattering_phase(k, kp).A * scattering_phase(kp, k).A
    assert abs(a - 1) < 1e-13


@given(momenta, momenta)
def test_phase_derivatives_match_finite_differences(k, kp):
    h = 1e-6
    dk, dkp = _dtheta(k, kp)
    fd_k = wrap(theta(k + h, kp) - theta(k - h, kp)) / (2 * h)
    fd_kp = wrap(theta(k, kp + h) - theta(k, kp - h)) / (2 * h)
    assert dk == pytest.approx(fd_k, rel=1e-5, abs=1e-5)
    assert dkp == pytest.approx(fd_kp, rel=1e-5, abs=1e-5)


def test_singular_momentum_is_reported():
    with pytest.raises(SingularMomentumError):
        theta(0.0, 1.0)


def test_wrap_range():
    assert wrap(math.pi) == math.pi
    assert wrap(-math.pi) == math.pi
    assert wrap(1e-20) == 1e-20
    assert wrap(7.0) == pytest.approx(7.0 - 2 * math.pi)


def _scattering_amplitude_from_ed(n, k, kp):
    """Independent A: the coefficient that makes f1 + A f2 an eigenvector of the assembled H."""
    basis = build_sector_basis(n, 2)
    h = assemble(build_hamiltonian(ChainParams(n)), basis).to_dense()
    states = basis.states.astype(np.int64)
    low = np.array([int(s & -s).bit_length() - 1 for s in states])
    high = np.array([int(s).bit_length() - 1 for s in states])
    e = 2 * math.sin(k / 2) ** 2 + 2 * math.sin(kp / 2) ** 2
    g1 = h @ np.exp(1j * (k * low + kp * high)) - e * np.exp(1j * (k * low + kp * high))
    g2 = h @ np.exp(1j * (kp * low + k * high)) - e * np.exp(1j * (kp * low + k * high))
    a = -np.vdot(g2, g1) / np.vdot(g2, g2)
    assert np.linalg.norm(g1 + a * g2) < 1e-10
    return a


def test_amplitude_agrees_with_exact_eigenvector():
    rs = solve_two_magnon(10, 1, 3)
    assert rs.converged
    k, kp = rs.momenta
    a_ed = _scattering_amplitude_from_ed(10, k, kp)
    assert abs(a_ed - scattering_phase(k, kp).A) < 1e-8


def test_one_magnon_solution_is_free():
    rs = solve_multi_magnon(8, [3])
    assert rs.converged and rs.momenta[0] == pytest.approx(2 * math.pi * 3 / 8)


def test_solver_validates_inputs():
    with pytest.raises(ParameterError):
        solve_multi_magnon(4, [0, 1, 2])
    with pytest.raises(ParameterError):
        solve_multi_magnon(8, [9, 1])


def test_converged_two_magnon_state_is_eigenstate():
    n = 12
    rs = solve_two_magnon(n, 2, 5)
    assert rs.converged
    assert max(abs(r) for r in quantization_residual(rs.momenta, n)) <= 1e-10
    h2 = assemble(build_hamiltonian(ChainParams(n)), build_sector_basis(n, 2)).matrix
    assert eigen_residual(h2, bethe_state(rs), rs.energy) <= 1e-8


def test_coincident_quantum_numbers_are_flagged():
    rs = solve_two_magnon(12, 3, 3)
    assert not rs.converged and rs.status in ("coincident", "no_convergence", "singular")
    with pytest.raises(DegenerateStateError):
        two_magnon_state(12, 0.5, 0.5, -1.0)


def test_zero_quantum_number_gives_descendant():
    rs = solve_two_magnon(12, 0, 4)
    assert rs.status == "descendant"


@pytest.mark.parametrize("n,roots", [(10, 28), (12, 45)])
def test_two_magnon_sweep_matches_every_root(n, roots):
    rep = bethe_sweep(n, 2)
    assert len(rep.root_sets) == roots
    assert all(r.matched_ed_eigenvalue is not None for r in rep.root_sets)
    assert rep.coverage_with_descendants > rep.coverage > 0.6
    # the leftovers are the S+^2 descendant of the vacuum (energy 2B = 0) and bound states
    assert rep.unmatched_levels


def test_three_magnon_root_matches_sector():
    rs = solve_multi_magnon(12, [1, 3, 5])
    assert rs.converged
    assert rs.energy == pytest.approx(3.295099959901811, abs=1e-10)
    levels = sector_spectrum(12, 3)
    assert len(levels) == 220
    assert np.min(np.abs(levels - rs.energy)) <= 1e-7


def test_field_shifts_energy_by_magnon_count():
    a = solve_multi_magnon(12, [1, 3, 5], B=0.0)
    b = solve_multi_magnon(12, [1, 3, 5], B=0.5)
    assert b.energy - a.energy == pytest.approx(1.5)
