"""Ferromagnetic Heisenberg (XXX) chain: Hamiltonian, symmetries, magnons.

Spin operators follow the half-normalized convention ``sigma_i = P_i / 2`` with
``P_i`` the unit Paulis, and ``sigma_+- = sigma_x +- i sigma_y`` so that
``sigma_+ = |up><down|``.  The constant shifts are chosen so the all-down
vacuum has energy exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .basis import OperatorMatrix, SectorBasis, apply_operator, assemble, build_sector_basis, operator_norm
from .errors import ParameterError
from .pauli import PauliString, PauliSum, commutator, lowering, raising

Boundary = Literal["periodic", "open"]


@dataclass(frozen=True)
class ChainParams:
    n_sites: int
    J: float = 1.0
    B: float = 0.0
    boundary: Boundary = "periodic"

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ParameterError("chain needs at least 2 sites", n_sites=self.n_sites)
        if not (math.isfinite(self.J) and math.isfinite(self.B)):
            raise ParameterError("J and B must be finite", J=self.J, B=self.B)
        if self.boundary not in ("periodic", "open"):
            raise ParameterError(f"unknown boundary {self.boundary!r}", boundary=self.boundary)

    def bonds(self) -> list[tuple[int, int]]:
        n = self.n_sites
        if self.boundary == "periodic":
            return [(a, (a + 1) % n) for a in range(n)]
        return [(a, a + 1) for a in range(n - 1)]

    def with_(self, **changes) -> "ChainParams":
        fields = {"n_sites": self.n_sites, "J": self.J, "B": self.B, "boundary": self.boundary}
        fields.update(changes)
        return ChainParams(**fields)


@dataclass(frozen=True)
class MagnonMomentum:
    """Lattice momentum ``k = 2 pi m / N`` kept as the exact pair ``(m, N)``."""

    m: int
    n_sites: int

    def __post_init__(self) -> None:
        if self.n_sites < 1 or not 0 <= self.m < self.n_sites:
            raise ParameterError("momentum numerator must satisfy 0 <= m < N", m=self.m, n_sites=self.n_sites)

    @classmethod
    def wrapped(cls, m: int, n_sites: int) -> "MagnonMomentum":
        return cls(m % n_sites, n_sites)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.m, self.n_sites)

    @property
    def value(self) -> float:
        return 2.0 * math.pi * self.m / self.n_sites


def magnon_energy(k: float, J: float = 1.0, B: float = 0.0) -> float:
    """One-magnon dispersion ``B + J (1 - cos k) = B + 2 J sin^2(k/2)``."""
    return B + 2.0 * J * math.sin(k / 2.0) ** 2


def sigma_z(site: int, n: int) -> PauliSum:
    return PauliSum(n, [PauliString(n, 0, 1 << site, 0, 0.5)])


def sigma_plus(site: int, n: int) -> PauliSum:
    return raising(site, n)


def sigma_minus(site: int, n: int) -> PauliSum:
    return lowering(site, n)


def _dot(a: int, b: int, n: int, scale: float) -> list[PauliString]:
    """``scale * (XX + YY + ZZ)`` on sites a, b."""
    m = (1 << a) | (1 << b)
    return [
        PauliString(n, m, 0, 0, scale),
        PauliString(n, m, m, 0, scale),
        PauliString(n, 0, m, 0, scale),
    ]


def build_hamiltonian(p: ChainParams) -> PauliSum:
    """``J (n_b/4 - sum sigma.sigma) + B (N/2 + sum sigma_z)``.

    ``n_b`` is the bond count (N periodic, N - 1 open), so ``H|0...0> = 0``
    for either boundary.  ``sigma.sigma = (XX + YY + ZZ) / 4``.
    """
    n = p.n_sites
    bonds = p.bonds()
    terms = [PauliString.identity(n, p.J * len(bonds) / 4.0 + p.B * n / 2.0)]
    for a, b in bonds:
        terms += _dot(a, b, n, -p.J / 4.0)
    terms += [PauliString(n, 0, 1 << a, 0, p.B / 2.0) for a in range(n)]
    return PauliSum(n, terms)


def total_spin_ops(n: int) -> tuple[PauliSum, PauliSum, PauliSum]:
    """``S_i = sum_a sigma_i^a`` in half normalization."""
    sx = PauliSum(n, [PauliString(n, 1 << a, 0, 0, 0.5) for a in range(n)])
    sy = PauliSum(n, [PauliString(n, 1 << a, 1 << a, 0, 0.5) for a in range(n)])
    sz = PauliSum(n, [PauliString(n, 0, 1 << a, 0, 0.5) for a in range(n)])
    return sx, sy, sz


def total_raising(n: int) -> PauliSum:
    """``S_+ = sum_a sigma_+^a``."""
    out = PauliSum.zero(n)
    for a in range(n):
        out = out + sigma_plus(a, n)
    return out


def magnon_creation(k: MagnonMomentum) -> PauliSum:
    """``a_k^dag = sum_a exp(i k a) sigma_+^a``."""
    n = k.n_sites
    out = PauliSum.zero(n)
    for a in range(n):
        out = out + sigma_plus(a, n) * np.exp(2j * math.pi * k.m * a / n)
    return out


def commutator_with_creation(p: ChainParams, k: MagnonMomentum) -> PauliSum:
    """``[H, a_k^dag]`` computed term by term."""
    if p.boundary != "periodic":
        raise ParameterError("magnon operators need a periodic chain", boundary=p.boundary)
    if k.n_sites != p.n_sites:
        raise ParameterError("momentum and chain sizes differ", k_sites=k.n_sites, n_sites=p.n_sites)
    return commutator(build_hamiltonian(p), magnon_creation(k)).chop(1e-13)


def creation_commutator_closed_form(p: ChainParams, k: MagnonMomentum) -> PauliSum:
    """``B a_k^dag - J (e^{ik} - 1) sum_a e^{ika} (sz_a s+_{a+1} - s+_a sz_{a+1})``."""
    n = p.n_sites
    kv = k.value
    bracket = PauliSum.zero(n)
    for a in range(n):
        b = (a + 1) % n
        piece = sigma_z(a, n) * sigma_plus(b, n) - sigma_plus(a, n) * sigma_z(b, n)
        bracket = bracket + piece * np.exp(1j * kv * a)
    return magnon_creation(k) * p.B - bracket * (p.J * (np.exp(1j * kv) - 1.0))


def yangian_quadratic(n: int) -> tuple[PauliSum, PauliSum, PauliSum]:
    """Quadratic non-local generators summed over ordered pairs ``a < b``.

    ``S2z = sum (s+_a s-_b - s-_a s+_b)`` and
    ``S2+- = sum (sz_a s+-_b - s+-_a sz_b)``.
    """
    s2z = PauliSum.zero(n)
    s2p = PauliSum.zero(n)
    s2m = PauliSum.zero(n)
    for a in range(n):
        for b in range(a + 1, n):
            s2z = s2z + sigma_plus(a, n) * sigma_minus(b, n) - sigma_minus(a, n) * sigma_plus(b, n)
            s2p = s2p + sigma_z(a, n) * sigma_plus(b, n) - sigma_plus(a, n) * sigma_z(b, n)
            s2m = s2m + sigma_z(a, n) * sigma_minus(b, n) - sigma_minus(a, n) * sigma_z(b, n)
    return s2z, s2p, s2m


def ordered_pairs(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def vacuum(n: int) -> np.ndarray:
    """All-down state in the full ``2**n`` basis."""
    v = np.zeros(1 << n, dtype=complex)
    v[0] = 1.0
    return v


def one_magnon_state(k: MagnonMomentum) -> np.ndarray:
    """``a_k^dag |0>`` in the M = 1 sector basis."""
    n = k.n_sites
    basis = build_sector_basis(n, 1)
    sites = np.array([int(s).bit_length() - 1 for s in basis.states])
    return np.exp(1j * k.value * sites)


def eigen_residual(h_matrix, psi: np.ndarray, energy: float) -> float:
    """Relative residual ``||(H - E) psi|| / ||psi||``."""
    return float(np.linalg.norm(h_matrix @ psi - energy * psi) / np.linalg.norm(psi))


@dataclass(frozen=True)
class DispersionRow:
    m: int
    k: float
    e_analytic: float
    e_numeric: float
    residual: float

    def as_tuple(self) -> tuple:
        return (self.m, self.k, self.e_analytic, self.e_numeric, self.residual)


DISPERSION_HEADER = ("m", "k", "E_analytic", "E_numeric", "residual")


def dispersion_table(p: ChainParams) -> list[DispersionRow]:
    """Rayleigh quotient and eigen-residual of every one-magnon plane wave."""
    if p.boundary != "periodic":
        raise ParameterError("dispersion table needs a periodic chain", boundary=p.boundary)
    h1 = assemble(build_hamiltonian(p), build_sector_basis(p.n_sites, 1)).matrix
    rows = []
    for m in range(p.n_sites):
        k = MagnonMomentum(m, p.n_sites)
        psi = one_magnon_state(k)
        e_num = float(np.vdot(psi, h1 @ psi).real / np.vdot(psi, psi).real)
        e_an = magnon_energy(k.value, p.J, p.B)
        rows.append(DispersionRow(m, k.value, e_an, e_num, eigen_residual(h1, psi, e_an)))
    return rows


def two_free_magnons(n: int, m1: int, m2: int) -> np.ndarray:
    """``a_k^dag a_k'^dag |0>`` in the M = 2 sector basis."""
    basis2 = build_sector_basis(n, 2)
    basis1 = build_sector_basis(n, 1)
    v1 = one_magnon_state(MagnonMomentum(m2, n))
    return apply_operator(magnon_creation(MagnonMomentum(m1, n)), v1, basis1, basis2)


def translate(h: PauliSum, shift: int = 1) -> PauliSum:
    """Relabel sites ``a -> a + shift (mod N)``."""
    n = h.n_sites

    def roll(mask: int) -> int:
        s = shift % n
        return ((mask << s) | (mask >> (n - s))) & ((1 << n) - 1)

    return PauliSum(n, [PauliString(n, roll(t.x_mask), roll(t.z_mask), 0, t.coeff) for t in h.terms])


def symmetry_norms(p: ChainParams) -> dict[str, float]:
    """Operator norms of ``[H, S_i]`` for the three total-spin components."""
    h = build_hamiltonian(p)
    sx, sy, sz = total_spin_ops(p.n_sites)
    return {
        "Sx": operator_norm(commutator(h, sx)),
        "Sy": operator_norm(commutator(h, sy)),
        "Sz": operator_norm(commutator(h, sz)),
    }


def yangian_commutator_norms(n: int, J: float = 1.0, B: float = 0.0) -> dict[str, dict[str, float]]:
    """``||[H, S2]||`` for each quadratic generator under both boundary conditions."""
    gens = dict(zip(("S2z", "S2plus", "S2minus"), yangian_quadratic(n)))
    out: dict[str, dict[str, float]] = {}
    for boundary in ("periodic", "open"):
        h = build_hamiltonian(ChainParams(n, J, B, boundary))
        out[boundary] = {name: operator_norm(commutator(h, g)) for name, g in gens.items()}
    return out


def sector_matrix(p: ChainParams, magnons: int | None) -> tuple[SectorBasis, OperatorMatrix]:
    basis = build_sector_basis(p.n_sites, magnons)
    return basis, assemble(build_hamiltonian(p), basis)
