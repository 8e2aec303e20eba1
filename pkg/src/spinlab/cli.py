"""Command-line driver.

Every subcommand writes one JSON (default) or CSV document to stdout.  Exit
status: 0 success, 1 domain error (structured error JSON on stdout), 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__, bethe, continuum, heisenberg, spectrum, toric
from .cache import ResultCache
from .errors import ParameterError, PathError, SpinLabError
from .pauli import commutator
from .serialize import dumps, render_csv

log = logging.getLogger("spinlab")

DEFAULT_SEED = spectrum.DEFAULT_SEED

# Flags that never change a result and so stay out of the cache key.
_NON_KEY_FLAGS = {"format", "cache_dir", "no_cache", "threads", "verbose", "handler", "group", "action"}


def _count_or_all(text: str) -> int | str:
    if text == "all":
        return "all"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'all', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("count must be positive")
    return value


def _sector(text: str) -> int | None:
    if text == "all":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a magnon number or 'all', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("magnon number must be non-negative")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be finite")
    return value


# ---------------------------------------------------------------------------
# payload builders (pure; their results are cached)


def _chain_params(args) -> heisenberg.ChainParams:
    return heisenberg.ChainParams(args.n, args.j, args.b, args.boundary)


def _dispersion_dicts(p: heisenberg.ChainParams) -> list[dict]:
    return [dict(zip(heisenberg.DISPERSION_HEADER, r.as_tuple())) for r in heisenberg.dispersion_table(p)]


def chain_spectrum(args) -> dict:
    p = _chain_params(args)
    _, mat = heisenberg.sector_matrix(p, args.sector)
    rep = spectrum.spectrum(mat, args.k, args.tol, seed=args.seed)
    out = {"params": vars_for_key(args), "spectrum": rep.to_dict()}
    if args.sector == 1 and p.boundary == "periodic":
        out["dispersion"] = _dispersion_dicts(p)
    return out


def chain_dispersion(args) -> dict:
    p = _chain_params(args)
    return {"params": vars_for_key(args), "dispersion": _dispersion_dicts(p)}


def chain_bethe(args) -> dict:
    if args.sweep:
        rep = bethe.bethe_sweep(args.n, args.magnons, J=args.j, B=args.b, compare_ed=args.compare_ed)
        return {"params": vars_for_key(args), "sweep": rep.to_dict()}
    if args.quantum_numbers is None:
        raise ParameterError("give --quantum-numbers or --sweep")
    if len(args.quantum_numbers) != args.magnons:
        raise ParameterError(
            "number of quantum numbers differs from --magnons",
            magnons=args.magnons, quantum_numbers=args.quantum_numbers,
        )
    rs = bethe.solve_multi_magnon(args.n, args.quantum_numbers, J=args.j, B=args.b)
    if args.compare_ed and rs.converged:
        levels = bethe.sector_spectrum(args.n, args.magnons, args.j, args.b)
        rs.matched_ed_eigenvalue = bethe.match_to_spectrum(rs.energy, levels)
    return {"params": vars_for_key(args), "roots": [rs.to_dict()]}


def chain_yangian(args) -> dict:
    p = heisenberg.ChainParams(args.n, args.j, args.b)
    return {
        "params": vars_for_key(args),
        "total_spin_commutator_norms": heisenberg.symmetry_norms(p),
        "yangian_commutator_norms": heisenberg.yangian_commutator_norms(args.n, args.j, args.b),
    }


def toric_spectrum_cmd(args) -> dict:
    lat = toric.ToricLattice(args.lx, args.ly)
    rep = toric.toric_spectrum(lat, args.k, tol=args.tol, seed=args.seed)
    return {"params": vars_for_key(args), "spectrum": rep.to_dict()}


def toric_degeneracy(args) -> dict:
    lat = toric.ToricLattice(args.lx, args.ly)
    return toric.degeneracy_certificate(lat, args.method)


def _load_paths(source: str) -> tuple[toric.ToricLattice, list[toric.BishopPath]]:
    text = sys.stdin.read() if source == "-" else Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PathError(f"path file is not valid JSON: {exc.msg}", line=exc.lineno) from exc
    try:
        lat = toric.ToricLattice(int(doc["lx"]), int(doc["ly"]))
        paths = [toric.BishopPath.from_dict(lat, d) for d in doc.get("paths", [])]
    except (KeyError, TypeError) as exc:
        raise PathError(f"malformed path document: {exc}") from exc
    return lat, paths


def toric_braid(args) -> dict:
    lat, paths = _load_paths(args.paths)
    ws = [(i, p) for i, p in enumerate(paths) if p.color == "black"]
    bs = [(i, p) for i, p in enumerate(paths) if p.color == "white"]
    if not ws or not bs:
        raise PathError("need at least one black (W) and one white (B) path")
    pairs = []
    for i, w in ws:
        for j, b in bs:
            pairs.append({
                "w_path": i,
                "b_path": j,
                "crossings": toric.intersection_count(w, b),
                "phase": toric.braiding_phase(lat, w, b),
            })
    return {"lattice": lat.to_dict(), "pairs": pairs}


def toric_lines(args) -> dict:
    if args.paths is None:
        lat = toric.ToricLattice(args.lx, args.ly)
        return {"lattice": lat.to_dict(), "logical_algebra": toric.logical_algebra(lat).to_dict()}
    lat, paths = _load_paths(args.paths)
    h = toric.build_toric_hamiltonian(lat)
    lines = []
    for i, p in enumerate(paths):
        op = toric.line_operator(lat, p)
        lines.append({
            "path": i,
            "color": p.color,
            "closed": p.closed,
            "operator": str(op),
            "anticommuting_plaquettes": [list(f) for f in toric.anticommuting_plaquettes(lat, op)],
            "commutes_with_hamiltonian": commutator(h, op).is_zero(),
            "excitation_energy": toric.excitation_energy(lat, [op]),
        })
    return {"lattice": lat.to_dict(), "lines": lines}


def _wave_params(args) -> continuum.LatticeWaveParams:
    return continuum.LatticeWaveParams(args.a, args.n)


def wave_dispersion(args) -> dict:
    p = _wave_params(args)
    momenta = None
    if args.m is not None:
        momenta = [2 * math.pi * m / (p.N * p.a) for m in args.m]
    rows = continuum.dispersion_rows(p, momenta, dt=args.dt)
    return {"params": vars_for_key(args), "rows": [dict(zip(continuum.WAVE_HEADER, r)) for r in rows]}


def wave_integrate(args) -> dict:
    p = _wave_params(args)
    k = 2 * math.pi * args.m / (p.N * p.a)
    dt = 0.01 * p.a if args.dt is None else args.dt
    w_me = continuum.integrate_lattice_wave(p, k, args.t_final, dt)
    w_an = continuum.discrete_dispersion(k, p.a)
    return {
        "params": vars_for_key(args),
        "k": k,
        "omega_analytic": w_an,
        "omega_measured": w_me,
        "rel_error": abs(w_me - w_an) / w_an if w_an > 0 else abs(w_me),
    }


def landau_minimize(args) -> dict:
    rows = []
    for tau in args.tau:
        lp = continuum.LandauParams(tau, args.tau_c, args.lam)
        phi = continuum.landau_equilibrium(lp)
        rows.append({
            "tau": tau,
            "phi0": phi,
            "phi0_reference": continuum.landau_closed_form(lp),
            "phi0_stationary_point": continuum.landau_stationary_point(lp),
            "free_energy": continuum.free_energy(phi, lp),
        })
    return {"params": vars_for_key(args), "rows": rows}


def stack_spectra_cmd(args) -> dict:
    p1 = heisenberg.ChainParams(args.n1, args.j1, args.b1)
    p2 = heisenberg.ChainParams(args.n2, args.j2, args.b2)
    h1, h2 = heisenberg.build_hamiltonian(p1), heisenberg.build_hamiltonian(p2)
    e1 = spectrum.spectrum(h1.to_sparse(), "all", args.tol).eigenvalues
    e2 = spectrum.spectrum(h2.to_sparse(), "all", args.tol).eigenvalues
    stacked = spectrum.stack_spectra(e1, e2)
    joint = spectrum.spectrum(spectrum.stack_operators(h1, h2).to_sparse(), "all", args.tol)
    return {
        "params": vars_for_key(args),
        "eigenvalues": stacked,
        "joint_eigenvalues": joint.eigenvalues,
        "max_deviation": float(np.max(np.abs(stacked - joint.eigenvalues))),
        "ground_degeneracy": joint.ground_degeneracy,
        "gap": joint.gap,
    }


# ---------------------------------------------------------------------------
# CSV views


def _csv_view(command: str, payload: dict) -> str:
    if "dispersion" in payload:
        rows = [[r[h] for h in heisenberg.DISPERSION_HEADER] for r in payload["dispersion"]]
        return render_csv(heisenberg.DISPERSION_HEADER, rows)
    if "spectrum" in payload:
        ev = payload["spectrum"]["eigenvalues"]
        return render_csv(("index", "energy"), [(i, float(e)) for i, e in enumerate(ev)])
    if command == "chain bethe":
        roots = payload["sweep"]["roots"] if "sweep" in payload else payload["roots"]
        header = ("quantum_numbers", "momenta", "energy", "status", "matched_ed_eigenvalue")
        rows = [
            (
                " ".join(str(q) for q in r["quantum_numbers"]),
                " ".join(format(float(k), ".17g") for k in r["momenta"]),
                float(r["energy"]),
                r["status"],
                "" if r["matched_ed_eigenvalue"] is None else float(r["matched_ed_eigenvalue"]),
            )
            for r in roots
        ]
        return render_csv(header, rows)
    if command == "wave dispersion":
        return render_csv(continuum.WAVE_HEADER, [[r[h] for h in continuum.WAVE_HEADER] for r in payload["rows"]])
    if command == "wave integrate":
        return render_csv(continuum.WAVE_HEADER, [[payload[h] for h in continuum.WAVE_HEADER]])
    if command == "landau minimize":
        header = ("tau", "phi0", "phi0_reference", "phi0_stationary_point", "free_energy")
        return render_csv(header, [[r[h] for h in header] for r in payload["rows"]])
    if command == "toric degeneracy":
        header = ("method", "n", "rank", "degeneracy")
        return render_csv(header, [["" if payload[h] is None else payload[h] for h in header]])
    if command == "toric braid":
        header = ("w_path", "b_path", "crossings", "phase")
        return render_csv(header, [[r[h] for h in header] for r in payload["pairs"]])
    if command == "stack spectra":
        return render_csv(("index", "energy"), [(i, float(e)) for i, e in enumerate(payload["eigenvalues"])])
    raise ParameterError(f"no CSV view for '{command}'; use --format json")


# ---------------------------------------------------------------------------
# parser


def vars_for_key(args) -> dict[str, Any]:
    """Result-determining arguments in canonical (sorted) form."""
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_KEY_FLAGS}


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", default=None, help="defaults to $SPINLAB_CACHE_DIR or ~/.cache/spinlab")
    common.add_argument("--no-cache", action="store_true", help="skip cache lookup and store")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=_positive_int, default=None, help="accepted for compatibility")
    common.add_argument("--tol", type=float, default=spectrum.DEFAULT_TOL, help="eigen-residual tolerance")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def _chain_flags(p: argparse.ArgumentParser, boundary: bool = True) -> None:
    p.add_argument("--n", type=_positive_int, required=True, help="number of sites")
    p.add_argument("--j", type=_finite, default=1.0, help="exchange coupling")
    p.add_argument("--b", type=_finite, default=0.0, help="magnetic field")
    if boundary:
        p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="spinlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spinlab {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name: str, handler: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(handler=handler)
        return p

    chain = groups.add_parser("chain", help="Heisenberg chain").add_subparsers(dest="action", required=True)
    p = leaf(chain, "spectrum", chain_spectrum, "sector or full spectrum")
    _chain_flags(p)
    p.add_argument("--sector", type=_sector, default=None, help="magnon number, or 'all'")
    p.add_argument("--k", type=_count_or_all, default="all", help="lowest k levels, or 'all'")
    p = leaf(chain, "dispersion", chain_dispersion, "one-magnon dispersion table")
    _chain_flags(p, boundary=False)
    p.set_defaults(boundary="periodic")
    p = leaf(chain, "bethe", chain_bethe, "Bethe roots")
    _chain_flags(p, boundary=False)
    p.add_argument("--magnons", type=_positive_int, required=True)
    p.add_argument("--quantum-numbers", type=int, nargs="+", default=None)
    p.add_argument("--sweep", action="store_true", help="solve every quantum-number tuple")
    p.add_argument("--compare-ed", action="store_true", help="match energies to the sector spectrum")
    p = leaf(chain, "yangian", chain_yangian, "symmetry commutator norms")
    _chain_flags(p, boundary=False)

    tor = groups.add_parser("toric", help="toric code").add_subparsers(dest="action", required=True)
    p = leaf(tor, "spectrum", toric_spectrum_cmd, "exact spectrum")
    p.add_argument("--lx", type=int, required=True)
    p.add_argument("--ly", type=int, required=True)
    p.add_argument("--k", type=_count_or_all, default="all")
    p = leaf(tor, "degeneracy", toric_degeneracy, "ground-space degeneracy certificate")
    p.add_argument("--lx", type=int, required=True)
    p.add_argument("--ly", type=int, required=True)
    p.add_argument("--method", choices=("auto", "ed", "gf2", "gf2_rank"), default="auto")
    p = leaf(tor, "braid", toric_braid, "braiding phases of W/B path pairs")
    p.add_argument("--paths", required=True, help="path JSON file, or '-' for stdin")
    p = leaf(tor, "lines", toric_lines, "line operators, or the logical algebra")
    p.add_argument("--paths", default=None, help="path JSON file, or '-' for stdin")
    p.add_argument("--lx", type=int, default=4)
    p.add_argument("--ly", type=int, default=4)

    wave = groups.add_parser("wave", help="lattice wave equation").add_subparsers(dest="action", required=True)
    p = leaf(wave, "dispersion", wave_dispersion, "measured vs analytic dispersion")
    p.add_argument("--n", type=_positive_int, default=64)
    p.add_argument("--a", type=_finite, default=1.0)
    p.add_argument("--dt", type=_finite, default=None)
    p.add_argument("--m", type=int, nargs="+", default=None, help="momentum numerators (default: all)")
    p = leaf(wave, "integrate", wave_integrate, "integrate one mode")
    p.add_argument("--n", type=_positive_int, default=64)
    p.add_argument("--a", type=_finite, default=1.0)
    p.add_argument("--m", type=int, required=True, help="momentum numerator, k = 2 pi m / (N a)")
    p.add_argument("--dt", type=_finite, default=None)
    p.add_argument("--t-final", type=_finite, default=None)

    landau = groups.add_parser("landau", help="Landau free energy").add_subparsers(dest="action", required=True)
    p = leaf(landau, "minimize", landau_minimize, "equilibrium order parameter")
    p.add_argument("--tau", type=_finite, nargs="+", required=True)
    p.add_argument("--tau-c", type=_finite, default=0.0)
    p.add_argument("--lam", type=_finite, default=1.0)

    stack = groups.add_parser("stack", help="decoupled systems").add_subparsers(dest="action", required=True)
    p = leaf(stack, "spectra", stack_spectra_cmd, "spectrum of two uncoupled chains")
    for i in ("1", "2"):
        p.add_argument(f"--n{i}", type=_positive_int, required=True)
        p.add_argument(f"--j{i}", type=_finite, default=1.0)
        p.add_argument(f"--b{i}", type=_finite, default=0.0)
    return parser


_UNCACHED = {"toric braid", "toric lines"}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=stderr)
    command = f"{args.group} {args.action}"
    try:
        # Path-file commands read their input at run time and are cheap, so skip the cache.
        key_params = vars_for_key(args)
        if command in _UNCACHED:
            payload = json.loads(dumps(args.handler(args)))
        else:
            cache = ResultCache(args.cache_dir, enabled=not args.no_cache)
            payload = cache.get_or_compute(command, key_params, lambda: args.handler(args))
        text = _csv_view(command, payload) if args.format == "csv" else dumps(payload) + "\n"
    except SpinLabError as exc:
        stdout.write(dumps(exc.as_dict()) + "\n")
        stderr.write(f"spinlab: {exc.error_kind}: {exc.message}\n")
        return 1
    except OSError as exc:
        err = {"error_kind": "io_error", "message": str(exc), "context": {}}
        stdout.write(dumps(err) + "\n")
        stderr.write(f"spinlab: io_error: {exc}\n")
        return 1
    stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
