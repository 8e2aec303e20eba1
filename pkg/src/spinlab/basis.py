"""Computational-basis bookkeeping and sparse operator assembly.

Basis states are plain integers: bit ``a`` set means site ``a`` is spin-up (the
set of flipped-up sites of the ferromagnetic vacuum ``|0...0>``).
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import serialize
from .errors import DimensionError, ParameterError, SectorError
from .pauli import PauliString, PauliSum, commutator

#: Full bases beyond this many sites would not fit in memory anyway.
MAX_BASIS_SITES = 30

BasisState = int


def apply_pauli(p: PauliString, s: BasisState) -> tuple[complex, BasisState]:
    """``p|s> = amplitude * |t>`` for a single basis state."""
    if s < 0 or s >> p.n_sites:
        raise DimensionError("basis state has bits outside the register", state=s, n_sites=p.n_sites)
    return p.apply_state(s)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    n_sites: int
    magnons: int | None
    states: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.states.shape[0])

    @property
    def label(self) -> str | int:
        return "all" if self.magnons is None else self.magnons

    def unrank(self, i: int) -> BasisState:
        return int(self.states[i])

    def rank(self, bits: BasisState) -> int:
        idx = int(self.index_of(np.array([bits], dtype=np.uint64))[0])
        if idx < 0:
            raise KeyError(f"state {bits:#b} is not in sector {self.label}")
        return idx

    def index_of(self, targets: np.ndarray) -> np.ndarray:
        """Vectorized rank; -1 marks states outside the basis."""
        t = np.asarray(targets, dtype=np.uint64)
        if self.magnons is None:
            return t.astype(np.int64)
        pos = np.searchsorted(self.states, t)
        pos_c = np.minimum(pos, len(self) - 1)
        hit = self.states[pos_c] == t
        return np.where(hit, pos_c, -1).astype(np.int64)

    def vacuum_index(self) -> int:
        return self.rank(0)


def build_sector_basis(n: int, magnons: int | str | None) -> SectorBasis:
    """All n-bit states with ``magnons`` up-spins, in increasing integer order.

    ``magnons`` of ``None`` or ``"all"`` gives the full ``2**n`` basis.
    """
    if not 1 <= n <= MAX_BASIS_SITES:
        raise ParameterError(f"n must lie in [1, {MAX_BASIS_SITES}]", n=n)
    if magnons is None or magnons == "all":
        return SectorBasis(n, None, np.arange(1 << n, dtype=np.uint64))
    m = int(magnons)
    if not 0 <= m <= n:
        raise ParameterError(f"magnon number {m} outside [0, {n}]", n=n, magnons=m)
    states = np.fromiter(
        (sum(1 << a for a in combo) for combo in itertools.combinations(range(n), m)),
        dtype=np.uint64,
        count=math.comb(n, m),
    )
    states.sort()
    return SectorBasis(n, m, states)


def total_sz(n: int) -> PauliSum:
    """Total ``S_z = sum_a Z_a / 2``."""
    return PauliSum(n, [PauliString(n, 0, 1 << a, 0, 0.5) for a in range(n)])


def term_hash(h: PauliSum) -> str:
    digest = hashlib.sha256()
    for t in h.terms:
        digest.update(f"{t.x_mask}:{t.z_mask}:{t.coeff.real!r}:{t.coeff.imag!r};".encode())
    return digest.hexdigest()[:16]


@dataclass(eq=False)
class OperatorMatrix:
    basis: SectorBasis
    matrix: sp.csr_matrix
    term_hash: str = ""

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        return self.hermiticity_error() <= tol

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def to_dict(self) -> dict:
        coo = self.matrix.tocoo()
        return {
            "format": "spinlab.operator-matrix/1",
            "n_sites": self.basis.n_sites,
            "sector": self.basis.label,
            "term_hash": self.term_hash,
            "dim": self.dim,
            "rows": coo.row.tolist(),
            "cols": coo.col.tolist(),
            "re": coo.data.real.tolist(),
            "im": coo.data.imag.tolist(),
        }

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "OperatorMatrix":
        d = serialize.loads(text)
        basis = build_sector_basis(d["n_sites"], d["sector"])
        data = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        mat = sp.csr_matrix((data, (d["rows"], d["cols"])), shape=(d["dim"], d["dim"]))
        return cls(basis, mat, d["term_hash"])


def check_sector_preserving(h: PauliSum) -> None:
    """Raise :class:`SectorError` unless ``[h, S_z] = 0``."""
    c = commutator(h, total_sz(h.n_sites)).chop(1e-12)
    if len(c) == 0:
        return
    bad_x = {t.x_mask for t in c.terms}
    offending = [str(t) for t in h.terms if t.x_mask in bad_x]
    raise SectorError(
        f"term {offending[0]} does not conserve the magnon number",
        offending=offending,
    )


def assemble(h: PauliSum, basis: SectorBasis, check_sector: bool = True) -> OperatorMatrix:
    """Sparse matrix ``<row|h|col>`` over ``basis``.

    For sector bases the sum must commute with total S_z; individual strings
    may still leave the sector (XX alone does), and those contributions cancel
    between terms, so out-of-sector targets are dropped.
    """
    if h.n_sites != basis.n_sites:
        raise DimensionError("operator and basis sizes differ", operator=h.n_sites, basis=basis.n_sites)
    if basis.magnons is not None and check_sector:
        check_sector_preserving(h)
    dim = len(basis)
    cols = np.arange(dim, dtype=np.int64)
    rows_acc, cols_acc, vals_acc = [], [], []
    for term in h.terms:
        amps, targets = term.apply(basis.states)
        ridx = basis.index_of(targets)
        keep = ridx >= 0
        rows_acc.append(ridx[keep])
        cols_acc.append(cols[keep])
        vals_acc.append(amps[keep])
    if rows_acc:
        rows = np.concatenate(rows_acc)
        cc = np.concatenate(cols_acc)
        vals = np.concatenate(vals_acc).astype(complex)
    else:
        rows = cc = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=complex)
    mat = sp.coo_matrix((vals, (rows, cc)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    mat.data[np.abs(mat.data) <= 1e-15] = 0
    mat.eliminate_zeros()
    return OperatorMatrix(basis, mat, term_hash(h))


def basis_vector(basis: SectorBasis, bits: BasisState) -> np.ndarray:
    v = np.zeros(len(basis), dtype=complex)
    v[basis.rank(bits)] = 1.0
    return v


def apply_operator(
    h: PauliSum, v: np.ndarray, basis: SectorBasis, target: SectorBasis | None = None
) -> np.ndarray:
    """``h @ v`` for ``v`` expressed in ``basis``, projected onto ``target``.

    ``target`` defaults to ``basis``.  Components landing outside ``target`` are
    discarded, so the caller must know ``h`` maps into it (raising operators
    map sector M to M + 1; a full basis loses nothing).
    """
    target = basis if target is None else target
    out = np.zeros(len(target), dtype=complex)
    for term in h.terms:
        amps, targets = term.apply(basis.states)
        ridx = target.index_of(targets)
        keep = ridx >= 0
        np.add.at(out, ridx[keep], amps[keep] * v[keep])
    return out


def operator_norm(h: PauliSum) -> float:
    """Spectral norm of ``h`` on the full space (dense; small n only)."""
    if len(h) == 0:
        return 0.0
    return float(np.linalg.norm(h.to_dense(), 2))


def embed(v: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Lift a sector vector into the full ``2**n`` space."""
    full = np.zeros(1 << basis.n_sites, dtype=complex)
    full[basis.states.astype(np.int64)] = v
    return full
