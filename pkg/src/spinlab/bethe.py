"""Coordinate Bethe ansatz for the periodic XXX chain.

Real-momentum roots only: the quantization conditions

    k_i N = sum_{j != i} theta(k_j, k_i)   (mod 2 pi)

are solved by damped Newton in the momentum variables, with every residual
wrapped into (-pi, pi].  Complex (bound-state) roots are not searched for;
sector sweeps report which exact levels stay unmatched instead.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import assemble, build_sector_basis
from .errors import DegenerateStateError, ParameterError, SingularMomentumError
from .heisenberg import ChainParams, build_hamiltonian, magnon_energy
from .spectrum import DENSE_THRESHOLD

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
MAX_HALVINGS = 50
#: Roots closer than this (mod 2 pi) are treated as coincident.
COINCIDENT_TOL = 1e-7
#: A root this close to k = 0 marks an S_+ descendant, not a scattering state.
ZERO_MOMENTUM_TOL = 1e-9
#: ED levels and Bethe energies closer than this are considered matched.
MATCH_TOL = 1e-8


def wrap(x: float) -> float:
    """Principal value in (-pi, pi]; exact for small arguments."""
    r = math.remainder(x, TWO_PI)
    return math.pi if r <= -math.pi else r


def _cot_half(k: float) -> float:
    s = math.sin(k / 2.0)
    if s == 0.0:
        raise SingularMomentumError("cot(k/2) is singular at k = 0 (mod 2 pi)", k=k)
    return math.cos(k / 2.0) / s


@dataclass(frozen=True)
class ScatteringPhase:
    k: float
    k_prime: float
    A: complex
    theta: float


def theta(k: float, k_prime: float) -> float:
    """Two-magnon phase shift, the principal argument of ``A(k, k')``."""
    d = _cot_half(k) - _cot_half(k_prime)
    # (d - 2i) / (d + 2i) = exp(-2i atan2(2, d))
    return wrap(-2.0 * math.atan2(2.0, d))


def scattering_phase(k: float, k_prime: float) -> ScatteringPhase:
    """``A = (cot(k/2) - cot(k'/2) - 2i) / (cot(k/2) - cot(k'/2) + 2i)``."""
    d = _cot_half(k) - _cot_half(k_prime)
    amp = complex(d, -2.0) / complex(d, 2.0)
    return ScatteringPhase(k, k_prime, amp, wrap(math.atan2(amp.imag, amp.real)))


def _dtheta(k: float, k_prime: float) -> tuple[float, float]:
    """Partial derivatives of ``theta(k, k')`` with respect to k and k'."""
    c, cp = _cot_half(k), _cot_half(k_prime)
    d = c - cp
    denom = d * d + 4.0
    # d theta / d d = 4 / (d^2 + 4);  d cot(k/2) / dk = -(1 + cot^2) / 2
    return -2.0 * (1.0 + c * c) / denom, 2.0 * (1.0 + cp * cp) / denom


def quantization_residual(roots: Sequence[float], n: int) -> list[float]:
    """Wrapped violation of ``k_i n - sum_{j != i} theta(k_j, k_i)`` for each root."""
    ks = [float(k) for k in roots]
    out = []
    for i, ki in enumerate(ks):
        total = ki * n
        for j, kj in enumerate(ks):
            if j != i:
                total -= theta(kj, ki)
        out.append(wrap(total))
    return out


def _jacobian(ks: np.ndarray, n: int) -> np.ndarray:
    m = len(ks)
    jac = np.zeros((m, m))
    for i in range(m):
        jac[i, i] = n
        for j in range(m):
            if j == i:
                continue
            d_kj, d_ki = _dtheta(ks[j], ks[i])
            jac[i, i] -= d_ki
            jac[i, j] -= d_kj
    return jac


@dataclass
class BetheRootSet:
    n_sites: int
    quantum_numbers: list[int]
    momenta: list[float]
    residuals: list[float]
    energy: float
    converged: bool
    status: str = "converged"
    iterations: int = 0
    matched_ed_eigenvalue: float | None = None

    @property
    def total_momentum(self) -> float:
        return float(sum(self.momenta))

    def to_dict(self) -> dict:
        return {
            "n": self.n_sites,
            "quantum_numbers": list(self.quantum_numbers),
            "momenta": [float(k) for k in self.momenta],
            "residuals": [float(r) for r in self.residuals],
            "energy": float(self.energy),
            "matched_ed_eigenvalue": self.matched_ed_eigenvalue,
            "converged": self.converged,
            "status": self.status,
            "iterations": self.iterations,
        }


def _initial_guess(n: int, quantum_numbers: Sequence[int]) -> np.ndarray:
    ks = np.array([TWO_PI * q / n for q in quantum_numbers], dtype=float)
    seen: dict[int, int] = {}
    for i, q in enumerate(quantum_numbers):
        qm = q % n
        # Coincident or singular (k = 0) starting points are nudged apart.
        if qm in seen or qm == 0:
            ks[i] += 1e-6 * (i + 1)
        seen[qm] = i
    return ks


def _energy(ks: Sequence[float], J: float, B: float) -> float:
    return float(sum(magnon_energy(k, J, B) for k in ks))


def _coincident(ks: Sequence[float]) -> bool:
    for a, b in itertools.combinations(ks, 2):
        if abs(wrap(a - b)) < COINCIDENT_TOL:
            return True
    return False


def _classify(ks: Sequence[float]) -> str:
    if _coincident(ks):
        return "coincident"
    if any(abs(wrap(k)) < ZERO_MOMENTUM_TOL for k in ks):
        # k -> 0 is the limit A -> 1: the state is S_+ applied to M-1 magnons.
        return "descendant"
    return "converged"


def solve_multi_magnon(
    n: int,
    quantum_numbers: Sequence[int],
    *,
    J: float = 1.0,
    B: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> BetheRootSet:
    """Real roots of the M coupled wrapped quantization conditions.

    Starts from the free momenta ``2 pi q_i / n``.  A result with
    ``converged=False`` carries the final iterate and a ``status`` of
    ``no_convergence``, ``singular``, ``coincident`` (the ansatz vector
    vanishes) or ``descendant`` (a root at k = 0, where cot(k/2) diverges).
    """
    qn = [int(q) for q in quantum_numbers]
    m = len(qn)
    if m == 0:
        raise ParameterError("need at least one quantum number")
    if 2 * m > n:
        raise ParameterError("solver scope is M <= n/2", n=n, magnons=m)
    if any(not 0 <= q < n for q in qn):
        raise ParameterError("quantum numbers must lie in [0, n)", quantum_numbers=qn, n=n)

    ks = _initial_guess(n, qn)

    def residual(x: np.ndarray) -> np.ndarray:
        return np.array(quantization_residual(x, n))

    def result(x, status, it):
        try:
            res = quantization_residual(x, n)
        except SingularMomentumError:
            res = [float("nan")] * m
        ok = status == "converged"
        return BetheRootSet(
            n, qn, [wrap(float(k)) for k in x], res, _energy(x, J, B), ok, status, it
        )

    if m == 1:
        # No scattering: the free momentum is exact.
        return result(np.array([TWO_PI * qn[0] / n]), "converged", 0)

    try:
        r = residual(ks)
    except SingularMomentumError:
        return result(ks, "singular", 0)
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) <= tol:
            return result(ks, _classify(ks), it - 1)
        try:
            jac = _jacobian(ks, n)
            step = np.linalg.solve(jac, -r)
        except (np.linalg.LinAlgError, SingularMomentumError):
            return result(ks, "singular", it)
        norm0 = np.linalg.norm(r)
        lam = 1.0
        for _ in range(MAX_HALVINGS):
            trial = ks + lam * step
            try:
                r_trial = residual(trial)
            except SingularMomentumError:
                lam *= 0.5
                continue
            if np.linalg.norm(r_trial) < norm0 or lam < 1e-12:
                break
            lam *= 0.5
        else:
            return result(ks, "no_convergence", it)
        ks, r = trial, r_trial
    if np.max(np.abs(r)) <= tol:
        return result(ks, _classify(ks), max_iter)
    return result(ks, "no_convergence", max_iter)


def solve_two_magnon(
    n: int,
    m1: int,
    m2: int,
    *,
    J: float = 1.0,
    B: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> BetheRootSet:
    """``k n = theta(k', k)``, ``k' n = theta(k, k')`` (mod 2 pi)."""
    return solve_multi_magnon(n, [m1, m2], J=J, B=B, tol=tol, max_iter=max_iter)


def two_magnon_state(n: int, k: float, k_prime: float, A: complex) -> np.ndarray:
    """Ansatz amplitudes ``e^{i(k a + k' b)} + A e^{i(k' a + k b)}`` for ``a < b``.

    Returned as a vector over the M = 2 sector basis (states in increasing
    integer order).  ``A = 1`` gives the free product ``a_k^dag a_k'^dag |0>``.
    """
    if n < 4:
        raise ParameterError("two-magnon ansatz needs n >= 4", n=n)
    basis = build_sector_basis(n, 2)
    states = basis.states.astype(np.int64)
    low = np.array([int(s & -s).bit_length() - 1 for s in states])
    high = np.array([int(s).bit_length() - 1 for s in states])
    psi = np.exp(1j * (k * low + k_prime * high)) + A * np.exp(1j * (k_prime * low + k * high))
    if np.linalg.norm(psi) < 1e-9 * math.sqrt(len(psi)):
        raise DegenerateStateError("ansatz vector vanishes (coincident momenta with A = -1)", k=k, k_prime=k_prime)
    return psi


def bethe_state(roots: BetheRootSet) -> np.ndarray:
    """Two-magnon ansatz vector for a converged root set."""
    if len(roots.momenta) != 2:
        raise ParameterError("only two-magnon states are constructed", magnons=len(roots.momenta))
    k, kp = roots.momenta
    return two_magnon_state(roots.n_sites, k, kp, scattering_phase(k, kp).A)


def sector_spectrum(n: int, magnons: int, J: float = 1.0, B: float = 0.0) -> np.ndarray:
    basis = build_sector_basis(n, magnons)
    if len(basis) > DENSE_THRESHOLD:
        raise ParameterError("sector too large for a dense cross-check", dim=len(basis))
    mat = assemble(build_hamiltonian(ChainParams(n, J, B)), basis).to_dense()
    return np.linalg.eigvalsh(mat)


def match_to_spectrum(energy: float, levels: np.ndarray, tol: float = MATCH_TOL) -> float | None:
    i = int(np.argmin(np.abs(levels - energy)))
    return float(levels[i]) if abs(levels[i] - energy) <= tol else None


@dataclass
class SweepReport:
    n_sites: int
    magnons: int
    root_sets: list[BetheRootSet]
    descendants: list[BetheRootSet]
    ed_levels: list[float] | None = None
    unmatched_levels: list[float] = field(default_factory=list)
    failed: list[BetheRootSet] = field(default_factory=list)

    @property
    def coverage(self) -> float | None:
        """Fraction of sector levels matched by real, non-singular root sets."""
        if self.ed_levels is None:
            return None
        hits = sum(r.matched_ed_eigenvalue is not None for r in self.root_sets)
        return hits / len(self.ed_levels)

    @property
    def coverage_with_descendants(self) -> float | None:
        if self.ed_levels is None:
            return None
        return 1.0 - len(self.unmatched_levels) / len(self.ed_levels)

    def to_dict(self) -> dict:
        return {
            "n": self.n_sites,
            "magnons": self.magnons,
            "roots": [r.to_dict() for r in self.root_sets],
            "descendants": [r.to_dict() for r in self.descendants],
            "ed_dimension": None if self.ed_levels is None else len(self.ed_levels),
            "coverage": self.coverage,
            "coverage_with_descendants": self.coverage_with_descendants,
            "unmatched_ed_levels": [float(x) for x in self.unmatched_levels],
            "n_failed_quantum_numbers": len(self.failed),
        }


def _root_key(ks: Sequence[float]) -> tuple[float, ...]:
    # Compare on [0, 2 pi) so that roots straddling +-pi coincide.
    out = []
    for k in ks:
        x = k % TWO_PI
        if TWO_PI - x < 1e-8:
            x = 0.0
        out.append(round(x, 7))
    return tuple(sorted(out))


def _assign(roots: list[BetheRootSet], levels: np.ndarray, used: np.ndarray, tol: float) -> None:
    for rs in roots:
        gaps = np.where(used, np.inf, np.abs(levels - rs.energy))
        i = int(np.argmin(gaps))
        if gaps[i] <= tol:
            used[i] = True
            rs.matched_ed_eigenvalue = float(levels[i])


def bethe_sweep(
    n: int,
    magnons: int,
    *,
    J: float = 1.0,
    B: float = 0.0,
    compare_ed: bool = True,
    tol: float = DEFAULT_TOL,
    match_tol: float = MATCH_TOL,
) -> SweepReport:
    """Solve every non-decreasing quantum-number tuple and, optionally, give
    each distinct root set its own exact sector level.

    Real scattering solutions are assigned first, then k = 0 descendants.
    Levels left over are bound-state candidates (complex roots) or states the
    real-root search missed; they are listed, never guessed.
    """
    distinct: dict[tuple[float, ...], BetheRootSet] = {}
    desc: dict[tuple[float, ...], BetheRootSet] = {}
    failed = []
    for qn in itertools.combinations_with_replacement(range(n), magnons):
        rs = solve_multi_magnon(n, qn, J=J, B=B, tol=tol)
        if rs.converged:
            distinct.setdefault(_root_key(rs.momenta), rs)
        elif rs.status == "descendant":
            desc.setdefault(_root_key(rs.momenta), rs)
        else:
            failed.append(rs)

    def order(d):
        return sorted(d.values(), key=lambda r: (r.energy, _root_key(r.momenta)))

    report = SweepReport(n, magnons, order(distinct), order(desc), failed=failed)
    if not compare_ed:
        return report
    levels = sector_spectrum(n, magnons, J, B)
    report.ed_levels = [float(x) for x in levels]
    used = np.zeros(len(levels), dtype=bool)
    _assign(report.root_sets, levels, used, match_tol)
    _assign(report.descendants, levels, used, match_tol)
    report.unmatched_levels = [float(x) for x in levels[~used]]
    return report
