"""Spectra, ground-state degeneracy, gaps, and stacking of decoupled systems."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import OperatorMatrix
from .errors import ConvergenceError, NotHermitianError, ParameterError
from .pauli import PauliString, PauliSum

log = logging.getLogger(__name__)

DENSE_THRESHOLD = 4096
CLUSTER_TOL = 1e-8
DEFAULT_TOL = 1e-10
DEFAULT_SEED = 1729

MatrixLike = Union[OperatorMatrix, sp.spmatrix, np.ndarray]


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    requested: int | str
    residual_bound: float
    ground_degeneracy: int
    gap: float
    gapless_at_size: bool
    method: str
    dim: int
    vectors: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "method": self.method,
            "requested": self.requested,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residual_bound": float(self.residual_bound),
            "ground_degeneracy": int(self.ground_degeneracy),
            "gap": float(self.gap),
            "gapless_at_size": bool(self.gapless_at_size),
        }


def degeneracy_and_gap(eigenvalues: Sequence[float], cluster_tol: float = CLUSTER_TOL) -> tuple[int, float]:
    """Size of the ground cluster and the gap above it.

    The cluster is the maximal prefix within ``cluster_tol`` of the minimum.  If
    the whole list is one cluster the gap is reported as 0.
    """
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    if ev.size == 0:
        raise ParameterError("empty spectrum")
    in_cluster = ev <= ev[0] + cluster_tol
    deg = int(np.count_nonzero(in_cluster))
    if deg == ev.size:
        return deg, 0.0
    return deg, float(ev[deg] - ev[deg - 1])


def _as_sparse(m: MatrixLike):
    if isinstance(m, OperatorMatrix):
        return m.matrix
    return m


def _hermiticity_error(a) -> float:
    if sp.issparse(a):
        d = a - a.conj().T
        return float(abs(d).max()) if d.nnz else 0.0
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _norm_estimate(a) -> float:
    # Max absolute row sum bounds the spectral norm of a Hermitian matrix.
    if sp.issparse(a):
        return float(abs(a).sum(axis=1).max()) if a.nnz else 0.0
    return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0


def _maybe_real(a):
    if sp.issparse(a):
        if a.nnz == 0 or np.all(a.data.imag == 0):
            return a.real.astype(float)
        return a
    if np.iscomplexobj(a) and np.all(a.imag == 0):
        return a.real.astype(float)
    return a


def spectrum(
    m: MatrixLike,
    k: int | str = "all",
    tol: float = DEFAULT_TOL,
    *,
    dense_threshold: int = DENSE_THRESHOLD,
    cluster_tol: float = CLUSTER_TOL,
    seed: int = DEFAULT_SEED,
    max_iter: int | None = None,
    return_vectors: bool = False,
) -> SpectrumReport:
    """Lowest ``k`` eigenpairs (or all of them) of a Hermitian matrix.

    Dense ``eigh`` up to ``dense_threshold``; above it, restarted Lanczos
    (ARPACK) from a seeded start vector.  Every returned pair satisfies
    ``||m v - lam v|| <= tol * ||m||`` with ``||m||`` estimated by the max row sum.
    """
    a = _as_sparse(m)
    dim = a.shape[0]
    if a.shape != (dim, dim):
        raise ParameterError("matrix is not square", shape=a.shape)
    scale = _norm_estimate(a)
    herm = _hermiticity_error(a)
    if herm > 1e-12 * max(scale, 1.0):
        raise NotHermitianError("matrix is not Hermitian", max_deviation=herm)
    a = _maybe_real(a)
    full = k == "all"
    if not full:
        k = int(k)
        if not 1 <= k <= dim:
            raise ParameterError(f"requested {k} eigenvalues of a {dim}-dimensional matrix", k=k, dim=dim)

    if dim <= dense_threshold:
        dense = a.toarray() if sp.issparse(a) else np.asarray(a)
        vals, vecs = np.linalg.eigh(dense)
        if not full:
            vals, vecs = vals[:k], vecs[:, :k]
        method = "dense"
    else:
        if full:
            raise ParameterError(
                "full spectrum requested above the dense threshold",
                dim=dim, dense_threshold=dense_threshold,
            )
        if k >= dim - 1:
            raise ParameterError("Lanczos needs k < dim - 1", k=k, dim=dim)
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim)
        if np.iscomplexobj(a):
            v0 = v0 + 1j * rng.standard_normal(dim)
        try:
            vals, vecs = spla.eigsh(a, k=k, which="SA", v0=v0, tol=0, maxiter=max_iter)
        except spla.ArpackNoConvergence as exc:
            best = _max_residual(a, exc.eigenvalues, exc.eigenvectors) if len(exc.eigenvalues) else float("inf")
            raise ConvergenceError(
                "Lanczos did not converge", best_residual=best, converged=len(exc.eigenvalues)
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        method = "lanczos"

    resid = _max_residual(a, vals, vecs) / max(scale, 1e-300)
    if resid > tol:
        raise ConvergenceError("eigenpair residual above tolerance", best_residual=resid, tol=tol)
    deg, gap = degeneracy_and_gap(vals, cluster_tol)
    log.debug("spectrum dim=%d method=%s resid=%.3g", dim, method, resid)
    return SpectrumReport(
        eigenvalues=np.asarray(vals, dtype=float),
        requested="all" if full else k,
        residual_bound=float(resid),
        ground_degeneracy=deg,
        gap=gap,
        gapless_at_size=deg == len(vals),
        method=method,
        dim=dim,
        vectors=vecs if return_vectors else None,
    )


def _max_residual(a, vals, vecs) -> float:
    if len(vals) == 0:
        return 0.0
    r = a @ vecs - vecs * np.asarray(vals)[None, :]
    return float(np.max(np.linalg.norm(r, axis=0)))


def stack_spectra(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Spectrum of two decoupled systems: the sorted multiset ``{a_i + b_j}``."""
    out = np.add.outer(np.asarray(a, dtype=float), np.asarray(b, dtype=float)).ravel()
    return np.sort(out)


def kron_sum(a, b):
    """``a (x) 1 + 1 (x) b`` for dense or sparse square matrices."""
    if sp.issparse(a) or sp.issparse(b):
        ia = sp.identity(a.shape[0], format="csr")
        ib = sp.identity(b.shape[0], format="csr")
        return (sp.kron(a, ib) + sp.kron(ia, b)).tocsr()
    a = np.asarray(a)
    b = np.asarray(b)
    return np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)


def stack_operators(h1: PauliSum, h2: PauliSum) -> PauliSum:
    """Place ``h2`` on sites ``n1 .. n1+n2-1`` next to ``h1`` with no coupling.

    With the bit-pattern index convention the resulting matrix is
    ``kron_sum(H2, H1)``; the spectrum is the same either way.
    """
    n1, n = h1.n_sites, h1.n_sites + h2.n_sites
    terms = [PauliString(n, t.x_mask, t.z_mask, 0, t.coeff) for t in h1.terms]
    terms += [PauliString(n, t.x_mask << n1, t.z_mask << n1, 0, t.coeff) for t in h2.terms]
    return PauliSum(n, terms)
