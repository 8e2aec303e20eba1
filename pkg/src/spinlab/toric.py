"""Toric code on a bicolored periodic square lattice.

Spins sit on the ``lx * ly`` vertices of the grid.  Face ``(x, y)`` is the unit
cell with corners ``(x, y), (x+1, y), (x, y+1), (x+1, y+1)`` (mod the torus) and
is white when ``x + y`` is even.  White faces carry ``X^4`` plaquettes, black
faces ``Z^4``; ``H = -sum h_w - sum h_b``.

A bishop path hops between same-colored faces along diagonals; its line
operator acts on the vertex shared by each consecutive pair.  Paths over black
faces give X strings (W operators), paths over white faces Z strings (B).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np

from . import gf2
from .basis import assemble, build_sector_basis
from .errors import LatticeError, PathError
from .pauli import PauliString, PauliSum, commutes, multiply, symplectic_form
from .spectrum import SpectrumReport, spectrum

Color = Literal["white", "black"]
Face = tuple[int, int]

_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

#: Above this many vertices the certificate uses the GF(2) rank, not ED.
ED_MAX_VERTICES = 16


@dataclass(frozen=True)
class ToricLattice:
    lx: int
    ly: int

    def __post_init__(self) -> None:
        for name, v in (("lx", self.lx), ("ly", self.ly)):
            if not isinstance(v, (int, np.integer)) or v < 2 or v % 2:
                raise LatticeError(f"{name} must be an even integer >= 2", lx=self.lx, ly=self.ly)

    @property
    def n_vertices(self) -> int:
        return self.lx * self.ly

    @property
    def n_faces(self) -> int:
        return self.lx * self.ly

    def vertex(self, x: int, y: int) -> int:
        return (x % self.lx) + self.lx * (y % self.ly)

    def coords(self, v: int) -> tuple[int, int]:
        return v % self.lx, v // self.lx

    def face(self, x: int, y: int) -> Face:
        return (x % self.lx, y % self.ly)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        return tuple((x, y) for y in range(self.ly) for x in range(self.lx))

    def color(self, face: Face) -> Color:
        x, y = face
        return "white" if (x + y) % 2 == 0 else "black"

    @property
    def white_faces(self) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if self.color(f) == "white")

    @property
    def black_faces(self) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if self.color(f) == "black")

    def corners(self, face: Face) -> tuple[int, int, int, int]:
        x, y = face
        return (self.vertex(x, y), self.vertex(x + 1, y), self.vertex(x, y + 1), self.vertex(x + 1, y + 1))

    def faces_of_vertex(self, v: int) -> tuple[Face, ...]:
        x, y = self.coords(v)
        return tuple(self.face(x - dx, y - dy) for dy in (0, 1) for dx in (0, 1))

    def check_face(self, face: Sequence[int]) -> Face:
        if len(face) != 2:
            raise LatticeError("a face is an (x, y) pair", face=list(face))
        x, y = int(face[0]), int(face[1])
        if not (0 <= x < self.lx and 0 <= y < self.ly):
            raise LatticeError("face outside the lattice", face=[x, y], lx=self.lx, ly=self.ly)
        return (x, y)

    def to_dict(self) -> dict:
        return {"lx": self.lx, "ly": self.ly}


@dataclass(frozen=True)
class BishopPath:
    lattice: ToricLattice = field(repr=False)
    color: Color
    faces: tuple[Face, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        l = self.lattice
        if self.color not in ("white", "black"):
            raise PathError(f"unknown color {self.color!r}")
        faces = tuple(l.face(*f) for f in self.faces)
        object.__setattr__(self, "faces", faces)
        if len(faces) < 2:
            raise PathError("a path needs at least two faces", faces=[list(f) for f in faces])
        for f in faces:
            if l.color(f) != self.color:
                raise PathError(f"face {f} is not {self.color}", face=list(f))
        for i, (a, b) in enumerate(self._pairs()):
            if len(set(l.corners(a)) & set(l.corners(b))) != 1:
                raise PathError(
                    f"faces {a} and {b} do not share exactly one vertex",
                    step=i, lx=l.lx, ly=l.ly,
                )

    def _pairs(self) -> list[tuple[Face, Face]]:
        pairs = list(zip(self.faces, self.faces[1:]))
        if self.closed:
            pairs.append((self.faces[-1], self.faces[0]))
        return pairs

    @property
    def sites(self) -> tuple[int, ...]:
        """Shared vertex of each consecutive face pair (with multiplicity)."""
        l = self.lattice
        return tuple((set(l.corners(a)) & set(l.corners(b))).pop() for a, b in self._pairs())

    @property
    def operator_kind(self) -> str:
        return "X" if self.color == "black" else "Z"

    @property
    def endpoints(self) -> tuple[Face, ...]:
        return () if self.closed else (self.faces[0], self.faces[-1])

    def to_dict(self) -> dict:
        return {"color": self.color, "faces": [list(f) for f in self.faces], "closed": self.closed}

    @classmethod
    def from_dict(cls, lattice: ToricLattice, d: dict) -> "BishopPath":
        try:
            faces = tuple(lattice.check_face(f) for f in d["faces"])
            return cls(lattice, d["color"], faces, bool(d.get("closed", False)))
        except KeyError as exc:
            raise PathError(f"path description lacks {exc.args[0]!r}") from exc


def plaquette_operator(l: ToricLattice, face: Face) -> PauliString:
    """``X^4`` on a white face, ``Z^4`` on a black one (unit Paulis)."""
    face = l.check_face(face)
    kind = "X" if l.color(face) == "white" else "Z"
    return PauliString.from_sites(l.n_vertices, kind, l.corners(face))


def plaquettes(l: ToricLattice) -> dict[Face, PauliString]:
    return {f: plaquette_operator(l, f) for f in l.faces}


def build_toric_hamiltonian(l: ToricLattice) -> PauliSum:
    return PauliSum(l.n_vertices, [p * -1.0 for p in plaquettes(l).values()])


def _product(ops: Iterable[PauliString], n: int) -> PauliString:
    out = PauliString.identity(n)
    for op in ops:
        out = multiply(out, op)
    return out


def constraint_products(l: ToricLattice) -> tuple[PauliString, PauliString]:
    """Products of all white and of all black plaquettes (both the identity)."""
    n = l.n_vertices
    white = _product((plaquette_operator(l, f) for f in l.white_faces), n)
    black = _product((plaquette_operator(l, f) for f in l.black_faces), n)
    return white, black


def line_operator(l: ToricLattice, p: BishopPath) -> PauliString:
    """X string along a black path (W), Z string along a white path (B)."""
    if p.lattice != l:
        raise PathError("path belongs to a different lattice")
    return PauliString.from_sites(l.n_vertices, p.operator_kind, p.sites)


def plaquette_loop(l: ToricLattice, face: Face) -> BishopPath:
    """Shortest closed path around ``face`` through its four edge neighbours."""
    x, y = l.check_face(face)
    ring = ((x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1))
    other: Color = "black" if l.color((x, y)) == "white" else "white"
    return BishopPath(l, other, ring, closed=True)


def winding_path(l: ToricLattice, color: Color, direction: str, offset: int = 0) -> BishopPath:
    """Closed zigzag wrapping the torus once along ``direction`` ('x' or 'y').

    Diagonal steps alternate between (+1, +1) and (+1, -1) (or the transposed
    pattern), which keeps the face color fixed.
    """
    if direction == "x":
        x0 = 0 if ((offset % 2 == 0) == (color == "white")) else 1
        faces = tuple((x0 + j, offset + j % 2) for j in range(l.lx))
    elif direction == "y":
        y0 = 0 if ((offset % 2 == 0) == (color == "white")) else 1
        faces = tuple((offset + j % 2, y0 + j) for j in range(l.ly))
    else:
        raise PathError(f"direction must be 'x' or 'y', got {direction!r}")
    return BishopPath(l, color, faces, closed=True)


def random_bishop_path(
    l: ToricLattice, color: Color, length: int, rng: np.random.Generator, closed: bool = False
) -> BishopPath:
    """Random open walk of ``length`` faces without immediate backtracking."""
    if closed:
        raise PathError("random walks are open; build closed paths explicitly")
    starts = l.white_faces if color == "white" else l.black_faces
    face = starts[int(rng.integers(len(starts)))]
    faces = [face]
    last = None
    while len(faces) < length:
        dx, dy = _STEPS[int(rng.integers(4))]
        if last == (-dx, -dy):
            continue
        face = l.face(face[0] + dx, face[1] + dy)
        faces.append(face)
        last = (dx, dy)
    return BishopPath(l, color, tuple(faces), closed=False)


def anticommuting_plaquettes(l: ToricLattice, op: PauliString) -> list[Face]:
    return [f for f, h in plaquettes(l).items() if not commutes(op, h)]


def intersection_count(a: BishopPath, b: BishopPath) -> int:
    """Shared sites of two paths, counted with multiplicity."""
    ca, cb = Counter(a.sites), Counter(b.sites)
    return sum(ca[s] * cb[s] for s in ca.keys() & cb.keys())


def braiding_phase(l: ToricLattice, w_path: BishopPath, b_path: BishopPath) -> int:
    """``(-1)^#(crossings)`` between a W string (black path) and a B string (white path).

    Cross-checked against the symplectic form of the two line operators.
    """
    if w_path.color != "black" or b_path.color != "white":
        raise PathError("braiding needs a black (W) path and a white (B) path",
                        w_color=w_path.color, b_color=b_path.color)
    parity = intersection_count(w_path, b_path) % 2
    sym = symplectic_form(line_operator(l, w_path), line_operator(l, b_path))
    if parity != sym:
        raise RuntimeError("intersection parity disagrees with the symplectic form")
    return -1 if parity else 1


def excitation_energy(l: ToricLattice, ops: Sequence[PauliString]) -> float:
    """Energy raised above the ground space by applying the product of ``ops``.

    Each plaquette anticommuting with the product flips from +1 to -1 and
    costs 2.
    """
    prod = _product(ops, l.n_vertices)
    return 2.0 * len(anticommuting_plaquettes(l, prod))


def logical_operators(l: ToricLattice) -> dict[str, PauliString]:
    """Non-contractible line operators W_X, W_Y (X strings) and B_X, B_Y (Z strings)."""
    return {
        "W_X": line_operator(l, winding_path(l, "black", "x")),
        "W_Y": line_operator(l, winding_path(l, "black", "y")),
        "B_X": line_operator(l, winding_path(l, "white", "x")),
        "B_Y": line_operator(l, winding_path(l, "white", "y")),
    }


@dataclass
class LogicalAlgebraReport:
    generators: dict[str, PauliString]
    relations_verified: dict[str, bool]
    degeneracy: int

    @property
    def all_verified(self) -> bool:
        return all(self.relations_verified.values())

    def to_dict(self) -> dict:
        return {
            "generators": {k: str(v) for k, v in self.generators.items()},
            "relations_verified": dict(self.relations_verified),
            "degeneracy": self.degeneracy,
        }


def _squares_to_one(p: PauliString) -> bool:
    return multiply(p, p).same_operator(PauliString.identity(p.n_sites))


def _anticommute_exact(p: PauliString, q: PauliString) -> bool:
    return multiply(p, q).same_operator(-multiply(q, p))


def _commute_exact(p: PauliString, q: PauliString) -> bool:
    return multiply(p, q).same_operator(multiply(q, p))


def logical_algebra(l: ToricLattice) -> LogicalAlgebraReport:
    """Check the line-operator algebra and derive the degeneracy it forces.

    Generators with a GF(2) commutation matrix of rank ``2r`` have a unique
    irreducible representation of dimension ``2**r``.
    """
    g = logical_operators(l)
    wx, wy, bx, by = g["W_X"], g["W_Y"], g["B_X"], g["B_Y"]
    plaq = list(plaquettes(l).values())
    rel = {
        "W_X^2 = 1": _squares_to_one(wx),
        "W_Y^2 = 1": _squares_to_one(wy),
        "B_X^2 = 1": _squares_to_one(bx),
        "B_Y^2 = 1": _squares_to_one(by),
        "W_X B_Y = -B_Y W_X": _anticommute_exact(wx, by),
        "W_Y B_X = -B_X W_Y": _anticommute_exact(wy, bx),
        "[W_X, B_X] = 0": _commute_exact(wx, bx),
        "[W_Y, B_Y] = 0": _commute_exact(wy, by),
        "[W_X, W_Y] = 0": _commute_exact(wx, wy),
        "[B_X, B_Y] = 0": _commute_exact(bx, by),
        "commute with all plaquettes": all(commutes(op, h) for op in g.values() for h in plaq),
    }
    ops = list(g.values())
    gram = [sum(symplectic_form(p, q) << j for j, q in enumerate(ops)) for p in ops]
    rank = gf2.gf2_rank(gram)
    return LogicalAlgebraReport(g, rel, 2 ** (rank // 2))


def stabilizer_rows(l: ToricLattice) -> list[int]:
    """Plaquettes as packed symplectic rows ``x_mask | z_mask << n``."""
    n = l.n_vertices
    return [p.x_mask | (p.z_mask << n) for p in plaquettes(l).values()]


def stabilizer_matrix(l: ToricLattice) -> np.ndarray:
    """``n_faces x 2n`` 0/1 generator matrix ``[x | z]``."""
    n = l.n_vertices
    rows = stabilizer_rows(l)
    return np.array([[(r >> j) & 1 for j in range(2 * n)] for r in rows], dtype=np.uint8)


def stabilizer_rank(l: ToricLattice) -> int:
    return gf2.gf2_rank(stabilizer_rows(l))


def stabilizer_degeneracy(l: ToricLattice) -> int:
    """Common-eigenspace dimension ``2**(n - rank)`` of the plaquette group."""
    return 2 ** (l.n_vertices - stabilizer_rank(l))


def toric_spectrum(l: ToricLattice, k: int | str = "all", **kwargs) -> SpectrumReport:
    mat = assemble(build_toric_hamiltonian(l), build_sector_basis(l.n_vertices, None))
    return spectrum(mat, k, **kwargs)


def degeneracy_certificate(l: ToricLattice, method: str = "auto") -> dict:
    """``{method, n, rank, degeneracy}`` from ED or from the stabilizer rank."""
    if method == "auto":
        method = "ed" if l.n_vertices <= ED_MAX_VERTICES else "gf2_rank"
    if method in ("gf2", "gf2_rank"):
        rank = stabilizer_rank(l)
        return {"method": "gf2_rank", "n": l.n_vertices, "rank": rank,
                "degeneracy": 2 ** (l.n_vertices - rank)}
    if method == "ed":
        if l.n_vertices > ED_MAX_VERTICES:
            raise LatticeError("ED certificate limited to 16 vertices", n=l.n_vertices)
        k: int | str = "all" if l.n_vertices <= 12 else 8
        rep = toric_spectrum(l, k)
        return {"method": "ed", "n": l.n_vertices, "rank": None, "degeneracy": rep.ground_degeneracy}
    raise LatticeError(f"unknown certificate method {method!r}")
