import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from ecpoisson import cli, verify
from ecpoisson.verify import SuiteResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("ECPOISSON_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("ECPOISSON_WORKERS", raising=False)
    return tmp_path / "cache"


def test_order(capsys):
    assert run(capsys, "order", "--p", "5", "--s", "1", "--t", "1")[:2] == (0, "9\n")


@pytest.mark.parametrize("argv,msg", [
    (["order", "--p", "5", "--s", "0", "--t", "0"], "singular reduction"),
    (["order", "--p", "4", "--s", "1", "--t", "1"], "not prime"),
    (["order", "--p", "3", "--s", "1", "--t", "1"], "small characteristic"),
    (["classnum", "--D", "-10"], "not a discriminant"),
    (["dcoeff", "--ell", "3", "--r", "1", "--m", "2"], "d_coeff"),
    (["kconst", "--N", "0"], "N >= 1"),
    (["scan", "--A", "5", "--B", "5", "--N", "100..110"], "--aggregate"),
    (["scan", "--A", "0", "--B", "5", "--N", "9"], "positive"),
    (["moments", "--A", "5", "--B", "5", "--x", "50"], "x must be"),
    (["scan", "--A", "5", "--B", "5", "--N", "9", "--workers", "0"], "workers"),
])
def test_user_errors_exit_2(capsys, argv, msg):
    code, _, err = run(capsys, *argv)
    assert code == 2 and msg in err


def test_argparse_errors_exit_2(capsys):
    for argv in (["scan", "--A", "5", "--B", "5", "--N", "x..y"], ["order", "--p", "5"], ["nope"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_internal_failure_exit_1(capsys, monkeypatch):
    def boom(*a):
        raise RuntimeError("kaboom")

    monkeypatch.setattr(cli, "curve_order", boom)
    code, _, err = run(capsys, "order", "--p", "5", "--s", "1", "--t", "1")
    assert code == 1 and "kaboom" in err


def test_classnum(capsys):
    assert run(capsys, "classnum", "--D", "-11")[1].split() == ["1/2", "0.5"]
    code, out, _ = run(capsys, "classnum", "--D", "-12")
    assert code == 0 and out.split()[0] == "2/3"
    assert float(out.split()[1]) == pytest.approx(2 / 3)


def test_constants_commands(capsys):
    code, out, _ = run(capsys, "cconst", "--m", "1")
    assert code == 0 and abs(float(out.split()[0]) - 1) < 5e-3
    code, out, _ = run(capsys, "kconst", "--N", "5", "--prime-bound", "10000")
    assert code == 0 and float(out.split()[0]) == pytest.approx(0.44598, abs=1e-4)
    assert run(capsys, "dcoeff", "--ell", "2", "--r", "2", "--m", "3")[1] == "-1/2\n"


def test_scan_json_manifest_and_warm_rerun(capsys, tmp_path, schema, isolated_cache):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    argv = ["scan", "--A", "50", "--B", "50", "--N", "9"]
    assert run(capsys, *argv, "--out", str(out1))[0] == 0
    doc = json.loads((out1 / "census.json").read_text())
    jsonschema.validate(doc, schema("census_report"))
    assert sum(h["count"] for h in doc["histogram"]) == doc["family"]["size"] == 10196
    man = json.loads((out1 / "manifest.json").read_text())
    jsonschema.validate(man, schema("run_manifest"))
    assert man["outputs"] == [str(out1 / "census.json")]
    assert man["parameters"]["config"]["cache_dir"] == str(isolated_cache)

    tables = sorted(isolated_cache.glob("*.eot1"))
    assert [t.name for t in tables] == [f"p{p:08d}.eot1" for p in (5, 7, 11, 13)]
    mtimes = [t.stat().st_mtime_ns for t in tables]
    assert run(capsys, *argv, "--out", str(out2))[0] == 0
    assert [t.stat().st_mtime_ns for t in tables] == mtimes
    assert (out1 / "census.json").read_bytes() == (out2 / "census.json").read_bytes()
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    for m, d in ((m1, out1), (m2, out2)):
        m.pop("wall_time")
        m["outputs"] = [o.replace(str(d), "OUT") for o in m["outputs"]]
        m["parameters"].pop("out", None)
    assert m1 == m2


def test_scan_cached_equals_uncached(capsys):
    a = run(capsys, "scan", "--A", "20", "--B", "20", "--N", "30..40", "--aggregate")[1]
    b = run(capsys, "scan", "--A", "20", "--B", "20", "--N", "30..40", "--aggregate", "--no-cache")[1]
    assert a == b


def test_csv_and_json_agree(capsys):
    argv = ["scan", "--A", "30", "--B", "30", "--N", "60..70", "--aggregate"]
    doc = json.loads(run(capsys, *argv)[1])
    rows = list(csv.DictReader(io.StringIO(run(capsys, *argv, "--format", "csv")[1])))
    counts = {h["ell"]: h["count"] for h in doc["histogram"]}
    for row in rows:
        ell = int(row["ell"])
        assert int(row["count"]) == counts.get(ell, 0)
        pr = doc["poisson_rows"][ell]
        for key in ("empirical", "poisson_raw", "poisson", "ratio"):
            assert float(row[key]) == pr[key]
    assert len(rows) == len(doc["poisson_rows"])


def test_scan_acceptance_shape(capsys):
    code, out, _ = run(capsys, "scan", "--A", "400", "--B", "400", "--N", "100..200",
                       "--aggregate", "--ell-max", "3", "--workers", "8", "--block", "128",
                       "--no-cache")
    doc = json.loads(out)
    assert code == 0
    assert [r["ell"] for r in doc["poisson_rows"]] == [0, 1, 2, 3]
    assert "calibration" in doc and doc["N"] == {"lo": 100, "hi": 200}


def test_moments_json_csv_plot(capsys, tmp_path, schema):
    out = tmp_path / "m"
    argv = ["moments", "--A", "10", "--B", "10", "--x", "300", "--gamma1", "2"]
    assert run(capsys, *argv, "--out", str(out), "--plot-data")[0] == 0
    doc = json.loads((out / "moments.json").read_text())
    jsonschema.validate(doc, schema("moment_report"))
    man = json.loads((out / "manifest.json").read_text())
    assert str(out / "moments.term_contribution.dat") in man["outputs"]
    line = (out / "moments.term_contribution.dat").read_text().splitlines()[0]
    assert len(line.split("\t")) == 2
    rows = list(csv.DictReader(io.StringIO(run(capsys, *argv, "--format", "csv")[1])))
    for row, term in zip(rows, doc["terms"]):
        assert float(row["C"]) == term["C"] and row["d"] == term["d"]
        assert float(row["li"]) == term["li"] and float(row["empirical"]) == doc["empirical"]


def test_plot_data_needs_out(capsys):
    code, _, err = run(capsys, "scan", "--A", "5", "--B", "5", "--N", "9", "--plot-data")
    assert code == 2 and "--out" in err


def test_scan_plot_data(capsys, tmp_path):
    out = tmp_path / "s"
    assert run(capsys, "scan", "--A", "10", "--B", "10", "--N", "20..30", "--aggregate",
               "--out", str(out), "--plot-data")[0] == 0
    names = {p.name for p in out.iterdir()}
    assert {"census.json", "manifest.json", "census.empirical.dat", "census.poisson.dat",
            "census.lambda_by_N.dat"} <= names


@pytest.mark.parametrize("argv", [
    ["verify", "deuring", "--pmax", "199"],
    ["verify", "combinatorics", "--max", "12"],
    ["verify", "weil", "--cases", "1000", "--seed", "7"],
    ["verify", "mass"],
    ["verify", "constants"],
    ["verify", "oracle-census"],
])
def test_verify_suites_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.startswith("PASS 0 failures")


def test_verify_weil_reproducible(capsys):
    a = run(capsys, "verify", "weil", "--cases", "200", "--seed", "3")[1]
    assert a == run(capsys, "verify", "weil", "--cases", "200", "--seed", "3")[1]


def test_verify_failure_exit_1(capsys, monkeypatch):
    monkeypatch.setitem(verify.SUITES, "mass", lambda pmax: SuiteResult("mass", 1, ["p=5 sum 1/#Aut = 4"]))
    code, out, _ = run(capsys, "verify", "mass")
    assert code == 1 and out.startswith("FAIL 1 failures") and "p=5" in out


def test_verify_writes_manifest(capsys, tmp_path):
    out = tmp_path / "v"
    assert run(capsys, "verify", "combinatorics", "--out", str(out))[0] == 0
    assert (out / "verify-combinatorics.txt").read_text().startswith("PASS")
    assert json.loads((out / "manifest.json").read_text())["command"] == "verify"


def test_cache_lifecycle(capsys, isolated_cache):
    assert run(capsys, "cache", "warm", "--pmax", "40", "--workers", "2")[0] == 0
    code, out, _ = run(capsys, "cache", "ls")
    assert code == 0 and out.strip().endswith("bytes") and out.count("\tok\t") == 10
    (isolated_cache / "p00000037.eot1").write_bytes(b"EOT1trunc")
    assert "INVALID" in run(capsys, "cache", "ls")[1]
    assert run(capsys, "cache", "gc")[1] == "removed 1 files\n"
    assert run(capsys, "cache", "gc", "--all")[1] == "removed 9 files\n"


def test_cache_dir_flag_beats_env(capsys, tmp_path, isolated_cache):
    other = tmp_path / "other"
    assert run(capsys, "cache", "warm", "--pmax", "7", "--cache-dir", str(other))[0] == 0
    assert sorted(p.name for p in other.iterdir()) == ["p00000005.eot1", "p00000007.eot1"]
    assert not isolated_cache.exists()


def test_budget_error_exit_2(capsys):
    code, _, err = run(capsys, "scan", "--A", "5", "--B", "5", "--N", "9", "--budget", "100")
    assert code == 2 and "budget" in err


def test_config_file_flag(capsys, tmp_path):
    f = tmp_path / "c.conf"
    f.write_text("output_format = csv\n")
    out = run(capsys, "scan", "--A", "5", "--B", "5", "--N", "9", "--config", str(f))[1]
    assert out.startswith("ell,count,")
    f.write_text("bogus = 1\n")
    assert run(capsys, "scan", "--A", "5", "--B", "5", "--N", "9", "--config", str(f))[0] == 2


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "ecpoisson.cli", "order", "--p", "5", "--s", "1",
                        "--t", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "9\n"
    r = subprocess.run([sys.executable, "-m", "ecpoisson.cli", "classnum", "--D", "-10"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "not a discriminant" in r.stderr
