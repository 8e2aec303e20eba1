import csv
import io
import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from spinlab import cache as cache_mod
from spinlab.cli import run
from spinlab.serialize import dumps, format_float, render_csv


def schema(name):
    text = resources.files("spinlab").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def invoke(argv, cache_dir):
    out, err = io.StringIO(), io.StringIO()
    code = run([*argv, "--cache-dir", str(cache_dir)], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


def test_dispersion_csv_for_one_magnon_sector(cache_dir):
    code, out, _ = invoke(["chain", "spectrum", "--n", "8", "--j", "1.0", "--b", "0.3", "--sector", "1", "--format", "csv"], cache_dir)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    for r in rows:
        k = float(r["k"])
        assert float(r["E_numeric"]) == pytest.approx(0.3 + 2 * math.sin(k / 2) ** 2, abs=1e-12)
        assert float(r["residual"]) <= 1e-12


CASES = [
    ("chain_spectrum", ["chain", "spectrum", "--n", "6", "--sector", "2"]),
    ("chain_spectrum", ["chain", "spectrum", "--n", "6", "--sector", "1"]),
    ("chain_dispersion", ["chain", "dispersion", "--n", "6"]),
    ("chain_bethe", ["chain", "bethe", "--n", "8", "--magnons", "2", "--sweep", "--compare-ed"]),
    ("chain_bethe", ["chain", "bethe", "--n", "8", "--magnons", "2", "--quantum-numbers", "1", "3", "--compare-ed"]),
    ("chain_yangian", ["chain", "yangian", "--n", "4"]),
    ("toric_spectrum", ["toric", "spectrum", "--lx", "2", "--ly", "2"]),
    ("toric_degeneracy", ["toric", "degeneracy", "--lx", "6", "--ly", "6", "--method", "gf2"]),
    ("toric_lines", ["toric", "lines", "--lx", "4", "--ly", "4"]),
    ("wave_dispersion", ["wave", "dispersion", "--n", "16", "--m", "1", "4"]),
    ("wave_integrate", ["wave", "integrate", "--n", "16", "--m", "3"]),
    ("landau_minimize", ["landau", "minimize", "--tau", "-1", "0.5"]),
    ("stack_spectra", ["stack", "spectra", "--n1", "2", "--n2", "2", "--b2", "0.3"]),
]


@pytest.mark.parametrize("name,argv", CASES, ids=[" ".join(c[1][:2]) + f"-{i}" for i, c in enumerate(CASES)])
def test_json_outputs_match_schemas(name, argv, cache_dir):
    code, out, _ = invoke(argv, cache_dir)
    assert code == 0, out
    jsonschema.validate(json.loads(out), schema(name))


def test_toric_degeneracy_six_by_six(cache_dir):
    code, out, _ = invoke(["toric", "degeneracy", "--lx", "6", "--ly", "6", "--method", "gf2"], cache_dir)
    doc = json.loads(out)
    assert code == 0 and doc["degeneracy"] == 4 and doc["rank"] == 34


def test_bethe_sweep_reports_coverage(cache_dir):
    code, out, _ = invoke(["chain", "bethe", "--n", "12", "--magnons", "2", "--sweep", "--compare-ed"], cache_dir)
    sweep = json.loads(out)["sweep"]
    assert code == 0
    assert all(r["matched_ed_eigenvalue"] is not None for r in sweep["roots"])
    assert 0 < sweep["coverage"] < 1
    assert sweep["ed_dimension"] == 66


@pytest.fixture
def path_file(tmp_path):
    doc = {
        "lx": 6,
        "ly": 6,
        "paths": [
            {"color": "black", "faces": [[1, 0], [2, 1], [3, 2]], "closed": False},
            {"color": "white", "faces": [[3, 1], [2, 2]], "closed": False},
            {"color": "black", "faces": [[3, 2], [2, 3], [1, 2], [2, 1]], "closed": True},
        ],
    }
    jsonschema.validate(doc, schema("path_input"))
    p = tmp_path / "paths.json"
    p.write_text(json.dumps(doc))
    return p


def test_toric_braid(path_file, cache_dir):
    code, out, _ = invoke(["toric", "braid", "--paths", str(path_file)], cache_dir)
    doc = json.loads(out)
    assert code == 0
    jsonschema.validate(doc, schema("toric_braid"))
    phases = {(p["w_path"], p["b_path"]): p["phase"] for p in doc["pairs"]}
    assert phases[(0, 1)] == -1
    # the closed loop around white face (2, 2) encloses one end of the white string
    assert phases[(2, 1)] == -1


def test_toric_lines(path_file, cache_dir):
    code, out, _ = invoke(["toric", "lines", "--paths", str(path_file)], cache_dir)
    doc = json.loads(out)
    assert code == 0
    jsonschema.validate(doc, schema("toric_lines"))
    open_w, _, loop = doc["lines"]
    assert open_w["excitation_energy"] == 4.0 and not open_w["commutes_with_hamiltonian"]
    assert sorted(open_w["anticommuting_plaquettes"]) == [[1, 0], [3, 2]]
    assert loop["excitation_energy"] == 0.0 and loop["commutes_with_hamiltonian"]


def test_malformed_path_is_domain_error(tmp_path, cache_dir):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"lx": 4, "ly": 4, "paths": [{"color": "white", "faces": [[0, 0], [2, 0]]}]}))
    code, out, err = invoke(["toric", "lines", "--paths", str(bad)], cache_dir)
    assert code == 1
    doc = json.loads(out)
    jsonschema.validate(doc, schema("error"))
    assert doc["error_kind"] == "invalid_path"
    assert "invalid_path" in err


def test_domain_error_exit_code(cache_dir):
    code, out, err = invoke(["toric", "degeneracy", "--lx", "3", "--ly", "4"], cache_dir)
    assert code == 1
    doc = json.loads(out)
    assert doc["error_kind"] == "invalid_lattice" and doc["context"] == {"lx": 3, "ly": 4}
    assert err


def test_unstable_timestep_error(cache_dir):
    code, out, _ = invoke(["wave", "integrate", "--m", "2", "--dt", "0.5"], cache_dir)
    assert code == 1 and json.loads(out)["error_kind"] == "unstable_timestep"


@pytest.mark.parametrize(
    "argv",
    [
        ["chain", "spectrum", "--n", "4", "--bogus"],
        ["chain", "spectrum"],
        ["chain", "spectrum", "--n", "4", "--sector", "x"],
        ["nonsense"],
        ["wave", "integrate", "--m", "1", "--format", "xml"],
    ],
)
def test_usage_errors_exit_two(argv, cache_dir):
    code, out, _ = invoke(argv, cache_dir)
    assert code == 2 and out == ""


def test_usage_error_via_subprocess():
    proc = subprocess.run([sys.executable, "-m", "spinlab", "chain", "spectrum", "--n", "4", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stdout == ""
    assert "unrecognized arguments" in proc.stderr


def test_csv_without_view_is_domain_error(cache_dir):
    code, out, _ = invoke(["chain", "yangian", "--n", "4", "--format", "csv"], cache_dir)
    assert code == 1 and json.loads(out)["error_kind"] == "invalid_parameters"


def test_cache_hit_is_byte_identical(cache_dir):
    argv = ["chain", "spectrum", "--n", "8", "--sector", "3"]
    _, first, _ = invoke(argv, cache_dir)
    files = list(cache_dir.rglob("*.json"))
    assert len(files) == 1
    _, second, _ = invoke(argv, cache_dir)
    assert first == second
    _, fresh, _ = invoke([*argv, "--no-cache"], cache_dir)
    assert fresh == first


def test_cache_hit_skips_computation(cache_dir, monkeypatch):
    argv = ["chain", "spectrum", "--n", "6", "--sector", "2"]
    invoke(argv, cache_dir)
    import spinlab.cli as cli

    def boom(args):
        raise AssertionError("recomputed")

    monkeypatch.setattr(cli, "chain_spectrum", boom)
    code, _, _ = invoke(argv, cache_dir)
    assert code == 0
    with pytest.raises(AssertionError, match="recomputed"):
        invoke([*argv, "--no-cache"], cache_dir)


def test_no_cache_neither_reads_nor_writes(cache_dir):
    invoke(["chain", "dispersion", "--n", "5", "--no-cache"], cache_dir)
    assert not cache_dir.exists()


def test_flag_changes_key():
    base = {"n": 8, "j": 1.0, "b": 0.0}
    k0 = cache_mod.cache_key("chain spectrum", base)
    assert k0 == cache_mod.cache_key("chain spectrum", dict(base))
    assert k0 != cache_mod.cache_key("chain spectrum", {**base, "b": 0.1})
    assert k0 != cache_mod.cache_key("chain dispersion", base)


def test_corrupt_entry_is_recomputed(cache_dir, caplog):
    argv = ["chain", "dispersion", "--n", "5"]
    _, first, _ = invoke(argv, cache_dir)
    (entry,) = cache_dir.rglob("*.json")
    entry.write_text("{not json")
    with caplog.at_level("WARNING"):
        code, second, _ = invoke(argv, cache_dir)
    assert code == 0 and second == first
    assert "corrupt" in caplog.text
    assert json.loads(entry.read_text())["payload"]


def test_env_var_sets_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINLAB_CACHE_DIR", str(tmp_path / "env"))
    out = io.StringIO()
    assert run(["chain", "dispersion", "--n", "4"], stdout=out, stderr=io.StringIO()) == 0
    assert list((tmp_path / "env").rglob("*.json"))


def test_repeated_runs_are_bit_reproducible(tmp_path):
    argv = ["chain", "spectrum", "--n", "14", "--sector", "7", "--k", "4", "--no-cache"]
    outs = {invoke(argv, tmp_path)[1] for _ in range(2)}
    assert len(outs) == 1


def test_float_rendering_is_lossless():
    for x in (0.1, 1 / 3, 2.0, -1e-300, 6.02214076e23, math.pi):
        s = format_float(x)
        assert float(s) == x
        assert len(s.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17
    assert format_float(2.0) == "2.0"
    with pytest.raises(ValueError):
        format_float(math.nan)


def test_dumps_and_csv():
    doc = json.loads(dumps({"a": [0.1, 2], "b": {"c": None, "d": 1 + 2j}}))
    assert doc == {"a": [0.1, 2], "b": {"c": None, "d": {"re": 1.0, "im": 2.0}}}
    assert render_csv(("x", "y"), [(1, 0.5)]) == "x,y\n1,0.5\n"
