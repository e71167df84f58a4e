import csv
import io
import json

import pytest

from quasispec.cli import config_hash, load_defaults, resolve_config, run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(body))


def test_cf_golden_gives_fibonacci_denominators():
    code, out, _ = invoke("cf", "--alpha", "golden", "--terms", "20")
    assert code == 0
    rows = csv_rows(out)
    assert rows[0] == ["n", "a", "p", "q"]
    q = [int(r[3]) for r in rows[1:]]
    fib = [1, 1]
    while len(fib) < len(q):
        fib.append(fib[-1] + fib[-2])
    assert q == fib and len(q) >= 20


def test_spectrum_free_case_measure_four():
    code, out, _ = invoke("spectrum", "--lambda", "0", "--alpha", "55/89", "--json", "--oracle-n", "0")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"tool", "version", "config_hash", "config", "meta", "columns", "rows"}
    assert doc["meta"]["measure"] == pytest.approx(4.0, abs=1e-9)
    assert doc["columns"] == ["lo", "hi"]


def test_spectrum_requires_rational():
    code, _, err = invoke("spectrum", "--alpha", "golden")
    assert code == 2 and "rational" in err


@pytest.mark.parametrize("argv", [
    ["cf", "--set", "model.colour=red"],
    ["cf", "--set", "nosection.key=1"],
    ["lyapunov", "--points", "many"],
    ["cf", "--set", "oops"],
    ["cf", "--threads", "0"],
    ["frobnicate"],
])
def test_configuration_errors_exit_2(argv):
    code, _, err = invoke(*argv)
    assert code == 2


def test_config_file_layering(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[model]\nalpha = 8/13\n[cf]\nterms = 3\n")
    cfg = resolve_config(str(ini), [("cf", "terms", "4")])
    assert cfg["model"]["alpha"] == "8/13"
    assert cfg["cf"]["terms"] == "4"
    assert cfg["model"]["lambda"] == load_defaults()["model"]["lambda"]
    code, out, _ = invoke("cf", "--config", str(ini))
    assert code == 0
    assert [r[2:] for r in csv_rows(out)[-1:]] == [["8", "13"]]


def test_missing_config_file_is_config_error(tmp_path):
    code, _, _ = invoke("cf", "--config", str(tmp_path / "absent.ini"))
    assert code == 2


def test_csv_header_carries_hash_and_config():
    code, out, _ = invoke("cf", "--terms", "5")
    header = [line for line in out.splitlines() if line.startswith("#")]
    cfg = resolve_config(None, [("cf", "terms", "5")])
    assert f"config_hash={config_hash(cfg)}" in header[0]
    assert json.loads(header[1][len("# config "):]) == cfg


def test_config_hash_depends_on_values():
    a = resolve_config(None, [])
    b = resolve_config(None, [("run", "seed", "1")])
    assert config_hash(a) != config_hash(b) and config_hash(a) == config_hash(resolve_config(None, []))


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("QUASISPEC_THREADS", "zero")
    assert invoke("cf")[0] == 2
    monkeypatch.setenv("QUASISPEC_THREADS", "1")
    code, out, _ = invoke("lyapunov", "--points", "3", "--schedule", "64,128", "--grid", "16")
    assert code == 0 and len(csv_rows(out)) == 4


def test_numeric_failure_exits_1_with_context():
    code, _, err = invoke("cohomology", "--T", "0,1", "--alpha", "1/2")
    assert code == 1
    assert "cohomology" in err and "alpha=1/2" in err and "SmallDivisorError" in err


def test_cohomology_and_equivalence_succeed():
    code, out, _ = invoke("cohomology", "--T", "0,2", "--json")
    assert code == 0 and json.loads(out)["meta"]["slope"] > 0.9
    code, out, _ = invoke("equivalence", "--lambda", "3", "--m", "1000", "--samples", "3",
                          "--set", "equivalence.sweep_points=3")
    assert code == 0


def test_gordon_and_herman_run():
    code, out, _ = invoke("gordon", "--alpha", "liouville:2", "--levels", "1,2", "--energies", "0", "--json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 2 and "four_norm" in doc["columns"]
    code, _, _ = invoke("herman", "--lambda", "3", "--points", "3", "--schedule", "64,128", "--grid", "16")
    assert code == 0


def test_verify_subset_is_deterministic(tmp_path):
    outdir = tmp_path / "v"
    args = ["verify", "--criteria", "4,6", "--outdir", str(outdir)]
    code, out, _ = invoke(*args)
    assert code == 0 and out.count("[PASS]") == 2
    first = {p.name: p.read_bytes() for p in outdir.iterdir()}
    assert set(first) == {"acceptance.csv", "acceptance.json"}
    invoke(*args)
    assert first == {p.name: p.read_bytes() for p in outdir.iterdir()}
    assert invoke("verify", "--criteria", "99", "--outdir", str(outdir))[0] == 2
