"""Multi-site Pauli operators in binary symplectic form.

A :class:`PauliString` is ``coeff * i**phase * P_0 P_1 ... P_{n-1}`` where each
``P_a`` is one of the *unit* Pauli matrices I, X, Y, Z (eigenvalues +/-1),
encoded by the bit pair ``(x_a, z_a)``: X = (1, 0), Z = (0, 1), Y = (1, 1).
The phase is the exponent of ``i`` relative to that Hermitian letter form, so a
string with phase 0 or 2 and real coefficient is Hermitian.

Half-normalized spin operators ``sigma = P / 2`` only ever enter through
coefficients (see :mod:`spinlab.heisenberg`).

Basis convention: bit ``a`` of a basis state is 1 iff site ``a`` is spin-up, and
Z acts as +1 on up, -1 on down.  Dense matrices produced here are indexed by the
integer bit pattern, so index 0 is the all-down state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal, Union

import numpy as np

from .errors import DimensionError, ParseError, SiteIndexError

#: Largest register a mask may address; masks are machine-word sized.
MAX_SITES = 64

#: Coefficients at or below this magnitude are dropped from a PauliSum.
ZERO_TOL = 1e-15

_I_POW = (1.0 + 0j, 1j, -1.0 + 0j, -1j)
_PHASE_TEXT = ("+1", "+i", "-1", "-i")
_PHASE_PARSE = {text: p for p, text in enumerate(_PHASE_TEXT)}
_FACTOR_RE = re.compile(r"^([XYZ])(\d+)$")

Number = Union[int, float, complex]
SingleKind = Literal["X", "Y", "Z", "Plus", "Minus"]


def _popcount(x: int) -> int:
    return x.bit_count()


@dataclass(frozen=True)
class PauliString:
    n_sites: int
    x_mask: int = 0
    z_mask: int = 0
    phase: int = 0
    coeff: complex = 1.0 + 0j

    def __post_init__(self) -> None:
        if not 1 <= self.n_sites <= MAX_SITES:
            raise DimensionError(f"n_sites must lie in [1, {MAX_SITES}]", n_sites=self.n_sites)
        limit = 1 << self.n_sites
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise SiteIndexError("mask addresses a site outside the register", n_sites=self.n_sites)
        object.__setattr__(self, "phase", int(self.phase) % 4)
        object.__setattr__(self, "coeff", complex(self.coeff))

    @classmethod
    def identity(cls, n_sites: int, coeff: Number = 1.0) -> "PauliString":
        return cls(n_sites, 0, 0, 0, coeff)

    @classmethod
    def from_sites(cls, n_sites: int, kind: str, sites: Iterable[int], coeff: Number = 1.0) -> "PauliString":
        """Product of one Pauli letter ``kind`` over ``sites`` (repeats cancel)."""
        mask = 0
        for s in sites:
            if not 0 <= s < n_sites:
                raise SiteIndexError(f"site {s} outside [0, {n_sites})", site=s, n_sites=n_sites)
            mask ^= 1 << s
        x = mask if kind in ("X", "Y") else 0
        z = mask if kind in ("Z", "Y") else 0
        return cls(n_sites, x, z, 0, coeff)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x_mask, self.z_mask)

    @property
    def y_count(self) -> int:
        return _popcount(self.x_mask & self.z_mask)

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x_mask | self.z_mask
        return tuple(a for a in range(self.n_sites) if m >> a & 1)

    @property
    def scalar(self) -> complex:
        """Overall complex prefactor ``coeff * i**phase``."""
        return self.coeff * _I_POW[self.phase]

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def factor(self, site: int) -> str:
        x = self.x_mask >> site & 1
        z = self.z_mask >> site & 1
        return "IZXY"[2 * x + z]

    def with_coeff(self, coeff: Number) -> "PauliString":
        return PauliString(self.n_sites, self.x_mask, self.z_mask, self.phase, coeff)

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(self.coeff * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(other * self.coeff)
        return NotImplemented

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_sites, self.x_mask, self.z_mask, self.phase + 2, self.coeff)

    def adjoint(self) -> "PauliString":
        return adjoint(self)

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def same_operator(self, other: "PauliString", tol: float = 0.0) -> bool:
        """True iff both strings denote the same matrix (phase folded into coeff)."""
        if self.n_sites != other.n_sites or self.key != other.key:
            return False
        return abs(self.scalar - other.scalar) <= tol

    def apply(self, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized action on basis states: ``P|s> = amp * |t>``."""
        s = np.asarray(states, dtype=np.uint64)
        z = np.uint64(self.z_mask)
        down_hits = _popcount(self.z_mask) - np.bitwise_count(s & z).astype(np.int64)
        # Y = i X Z, so the letter phase shifts by the number of Y factors.
        pref = self.coeff * _I_POW[(self.phase + self.y_count) % 4]
        amps = np.where(down_hits % 2 == 0, pref, -pref)
        return amps, s ^ np.uint64(self.x_mask)

    def apply_state(self, bits: int) -> tuple[complex, int]:
        down_hits = _popcount(self.z_mask & ~bits)
        amp = self.coeff * _I_POW[(self.phase + self.y_count + 2 * down_hits) % 4]
        return amp, bits ^ self.x_mask

    def to_dense(self) -> np.ndarray:
        dim = 1 << self.n_sites
        cols = np.arange(dim, dtype=np.uint64)
        amps, rows = self.apply(cols)
        out = np.zeros((dim, dim), dtype=complex)
        out[rows.astype(np.int64), cols.astype(np.int64)] = amps
        return out

    def __str__(self) -> str:
        letters = [f"{self.factor(a)}{a}" for a in range(self.n_sites) if self.factor(a) != "I"]
        body = " ".join(letters) if letters else "I"
        head = _PHASE_TEXT[self.phase] + " * " + body
        if self.coeff != 1:
            return f"{self.coeff!r} * {head}"
        return head


def parse_pauli(text: str, n_sites: int) -> PauliString:
    """Inverse of ``str(PauliString)``, e.g. ``"+i * X0 Z3 Y5"``."""
    parts = [p.strip() for p in text.split("*")]
    if len(parts) == 3:
        try:
            coeff = complex(parts[0])
        except ValueError as exc:
            raise ParseError(f"bad coefficient {parts[0]!r}", text=text) from exc
        parts = parts[1:]
    elif len(parts) == 2:
        coeff = 1.0 + 0j
    else:
        raise ParseError("expected '[coeff *] phase * factors'", text=text)
    phase_text, body = parts
    if phase_text not in _PHASE_PARSE:
        raise ParseError(f"bad phase token {phase_text!r}", text=text)
    x = z = 0
    if body != "I":
        for token in body.split():
            m = _FACTOR_RE.match(token)
            if m is None:
                raise ParseError(f"bad factor {token!r}", text=text)
            letter, site = m.group(1), int(m.group(2))
            if site >= n_sites:
                raise SiteIndexError(f"site {site} outside [0, {n_sites})", text=text)
            bit = 1 << site
            if (x | z) & bit:
                raise ParseError(f"site {site} listed twice", text=text)
            if letter in "XY":
                x |= bit
            if letter in "ZY":
                z |= bit
    return PauliString(n_sites, x, z, _PHASE_PARSE[phase_text], coeff)


def single_site(site: int, kind: SingleKind, n_sites: int):
    """Unit-normalized one-site operator.

    ``Plus``/``Minus`` are X +/- iY and come back as the pair of strings
    ``(X, +/-i Y)``; use :func:`raising` / :func:`lowering` for the summed form.
    """
    if not 0 <= site < n_sites:
        raise SiteIndexError(f"site {site} outside [0, {n_sites})", site=site, n_sites=n_sites)
    bit = 1 << site
    if kind == "X":
        return PauliString(n_sites, bit, 0)
    if kind == "Y":
        return PauliString(n_sites, bit, bit)
    if kind == "Z":
        return PauliString(n_sites, 0, bit)
    if kind in ("Plus", "Minus"):
        sign = 1j if kind == "Plus" else -1j
        return (PauliString(n_sites, bit, 0), PauliString(n_sites, bit, bit, 0, sign))
    raise ValueError(f"unknown kind {kind!r}")


def _check_dims(p: PauliString, q: PauliString) -> None:
    if p.n_sites != q.n_sites:
        raise DimensionError("site counts differ", left=p.n_sites, right=q.n_sites)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    _check_dims(p, q)
    # In X^x Z^z form, Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1.
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    phase = (
        p.phase + p.y_count + q.phase + q.y_count
        + 2 * _popcount(p.z_mask & q.x_mask)
        - _popcount(x & z)
    )
    return PauliString(p.n_sites, x, z, phase, p.coeff * q.coeff)


def symplectic_form(p: PauliString, q: PauliString) -> int:
    _check_dims(p, q)
    return (_popcount(p.x_mask & q.z_mask) + _popcount(p.z_mask & q.x_mask)) % 2


def commutes(p: PauliString, q: PauliString) -> bool:
    return symplectic_form(p, q) == 0


def adjoint(p: PauliString) -> PauliString:
    # Letter strings are Hermitian, so only the scalar is conjugated.
    return PauliString(p.n_sites, p.x_mask, p.z_mask, -p.phase, p.coeff.conjugate())


class PauliSum:
    """Linear combination of Pauli strings with the phase folded into coefficients.

    Terms with identical masks are merged on construction; coefficients with
    magnitude at or below ``ZERO_TOL`` are dropped.  Instances are immutable.
    """

    __slots__ = ("n_sites", "_terms")

    def __init__(self, n_sites: int, terms: Iterable[PauliString] = ()) -> None:
        acc: dict[tuple[int, int], complex] = {}
        for t in terms:
            if t.n_sites != n_sites:
                raise DimensionError("term site count differs", expected=n_sites, got=t.n_sites)
            acc[t.key] = acc.get(t.key, 0j) + t.scalar
        self.n_sites = n_sites
        self._terms = {k: c for k, c in sorted(acc.items()) if abs(c) > ZERO_TOL}

    @classmethod
    def _from_dict(cls, n_sites: int, acc: dict[tuple[int, int], complex]) -> "PauliSum":
        out = cls.__new__(cls)
        out.n_sites = n_sites
        out._terms = {k: c for k, c in sorted(acc.items()) if abs(c) > ZERO_TOL}
        return out

    @classmethod
    def identity(cls, n_sites: int, coeff: Number = 1.0) -> "PauliSum":
        return cls(n_sites, [PauliString.identity(n_sites, coeff)])

    @classmethod
    def zero(cls, n_sites: int) -> "PauliSum":
        return cls(n_sites)

    @property
    def terms(self) -> tuple[PauliString, ...]:
        return tuple(PauliString(self.n_sites, x, z, 0, c) for (x, z), c in self._terms.items())

    def coefficient(self, key: tuple[int, int]) -> complex:
        return self._terms.get(key, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.terms)

    def _coerce(self, other) -> "PauliSum":
        if isinstance(other, PauliSum):
            if other.n_sites != self.n_sites:
                raise DimensionError("site counts differ", left=self.n_sites, right=other.n_sites)
            return other
        if isinstance(other, PauliString):
            return PauliSum(self.n_sites, [other])
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum.identity(self.n_sites, other)
        raise TypeError(f"cannot combine PauliSum with {type(other).__name__}")

    def __add__(self, other) -> "PauliSum":
        other = self._coerce(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0j) + c
        return PauliSum._from_dict(self.n_sites, acc)

    __radd__ = __add__

    def __neg__(self) -> "PauliSum":
        return PauliSum._from_dict(self.n_sites, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "PauliSum":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PauliSum":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PauliSum":
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum._from_dict(self.n_sites, {k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        acc: dict[tuple[int, int], complex] = {}
        n = self.n_sites
        for (x1, z1), c1 in self._terms.items():
            p = PauliString(n, x1, z1, 0, c1)
            for (x2, z2), c2 in other._terms.items():
                r = multiply(p, PauliString(n, x2, z2, 0, c2))
                acc[r.key] = acc.get(r.key, 0j) + r.scalar
        return PauliSum._from_dict(n, acc)

    def __rmul__(self, other) -> "PauliSum":
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return self._coerce(other) * self

    def __truediv__(self, other: Number) -> "PauliSum":
        return self * (1.0 / other)

    def adjoint(self) -> "PauliSum":
        return PauliSum._from_dict(self.n_sites, {k: c.conjugate() for k, c in self._terms.items()})

    def norm1(self) -> float:
        """Sum of coefficient magnitudes; an upper bound on the operator norm."""
        return float(sum(abs(c) for c in self._terms.values()))

    def is_zero(self, tol: float = 1e-12) -> bool:
        return all(abs(c) <= tol for c in self._terms.values())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return (self - self.adjoint()).is_zero(tol)

    def allclose(self, other, tol: float = 1e-12) -> bool:
        return (self - self._coerce(other)).is_zero(tol)

    def chop(self, tol: float = 1e-12) -> "PauliSum":
        return PauliSum._from_dict(self.n_sites, {k: c for k, c in self._terms.items() if abs(c) > tol})

    def to_sparse(self):
        """Full ``2**n``-dimensional matrix as scipy CSR."""
        from .basis import assemble, build_sector_basis

        return assemble(self, build_sector_basis(self.n_sites, None)).matrix

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)

    def __repr__(self) -> str:
        return f"PauliSum(n_sites={self.n_sites}, terms={len(self)})"


def commutator(a, b):
    """``[a, b] = ab - ba`` for PauliSum / PauliString operands, as a PauliSum."""
    if isinstance(a, PauliString):
        a = PauliSum(a.n_sites, [a])
    if isinstance(b, PauliString):
        b = PauliSum(b.n_sites, [b])
    return a * b - b * a


def raising(site: int, n_sites: int, scale: float = 0.5) -> PauliSum:
    """``scale * (X + iY)`` on one site; the default 1/2 gives ``|up><down|``."""
    x, iy = single_site(site, "Plus", n_sites)
    return PauliSum(n_sites, [x * scale, iy * scale])


def lowering(site: int, n_sites: int, scale: float = 0.5) -> PauliSum:
    x, miy = single_site(site, "Minus", n_sites)
    return PauliSum(n_sites, [x * scale, miy * scale])
