import json
import subprocess
import sys

import pytest

from ciprng.bitcore import builtin_function, load_functions
from ciprng.cli import main

FAST = ["--streams", "55", "--bits", "2000", "--serial-m", "3", "--apen-m", "3", "--block-length", "20"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def fn_file(tmp_path):
    path = tmp_path / "b.json"
    path.write_text(builtin_function("b").to_json())
    return path


def test_trace(capsys, fn_file, tmp_path):
    code, out, _ = run(capsys, "trace", "--fn", fn_file, "--x0", 4, "--strategy", "2,4,2,3")
    assert code == 0 and out.strip() == "4,0,0,4,6"
    code, out, _ = run(capsys, "trace", "--fn", "b", "--x0", 6, "--strategy", "4,1,1", "--out", tmp_path / "t")
    assert out.strip() == "6,7,15,7"
    doc = json.loads((tmp_path / "t" / "trace.json").read_text())
    assert doc["states"] == [6, 7, 15, 7]
    manifest = json.loads((tmp_path / "t" / "manifest.json").read_text())
    assert manifest["subcommand"] == "trace" and manifest["outputs"] == ["trace.json"]


def test_gen_fn_and_verify(capsys, tmp_path):
    out_dir = tmp_path / "g"
    code, _, _ = run(capsys, "gen-fn", "--n", 4, "--rate", 0.5, "--count", 3, "--seed", 9, "--out", out_dir)
    assert code == 0
    fs = load_functions(out_dir / "functions.jsonl")
    assert len(fs) == 3 and all(f.n == 4 for f in fs)
    code, out, _ = run(capsys, "gen-fn", "--verify", out_dir / "functions.jsonl")
    assert code == 0 and out.count("scc") == 3 and "NOT-SCC" not in out
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"n": 2, "images": [0, 1, 2, 3]}\n')
    code, out, _ = run(capsys, "gen-fn", "--verify", bad)
    assert code == 2 and "NOT-SCC" in out


def test_gen_fn_dedup(capsys):
    code, out, _ = run(capsys, "gen-fn", "--n", 2, "--rate", 0.6, "--count", 6, "--seed", 1, "--dedup")
    assert code == 0
    assert 1 <= len(out.strip().splitlines()) < 6


def test_analyze(capsys, tmp_path):
    code, _, _ = run(capsys, "analyze", "--fn", "fig1_f", "--tmax", 30, "--out", tmp_path / "a")
    assert code == 0
    rows = (tmp_path / "a" / "deviation.csv").read_text().splitlines()
    assert rows[0] == "t,relative_deviation,deviation_rate" and len(rows) == 31
    first = next(int(r.split(",")[0]) for r in rows[1:] if float(r.split(",")[1]) < 0.01)
    assert first == 14
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["converged"] is True and summary["start"] == 0
    code, out, err = run(capsys, "analyze", "--fn", "neg", "--tmax", 50, "--worst-case")
    assert json.loads(err)["period"] == 2 and json.loads(err)["start"] == "worst-case"


def test_generate_formats(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "--fn", "b", "--b", 4, "--seed", 1, "--rounds", 8, "--format", "ints")
    assert code == 0 and out.split() == ["13", "2", "10", "15", "4", "3", "9", "14"]
    _, bits, _ = run(capsys, "generate", "--fn", "b", "--b", 4, "--seed", 1, "--rounds", 8, "--format", "bits")
    assert bits.strip() == "".join(format(v, "04b") for v in (13, 2, 10, 15, 4, 3, 9, 14))
    run(capsys, "generate", "--fn", "b", "--b", 4, "--seed", 1, "--rounds", 8, "--format", "bytes",
        "--out", tmp_path / "g")
    assert (tmp_path / "g" / "stream.bin").read_bytes() == bytes([0xD2, 0xAF, 0x43, 0x9E])


def test_generate_legacy(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "--fn", "neg", "--algorithm", "legacy", "--seed", 5, "--rounds", 8,
                       "--format", "ints")
    assert code == 0 and out.split() == ["0", "4", "13", "1", "13", "0", "12", "10"]
    run(capsys, "generate", "--fn", "neg", "--algorithm", "legacy", "--strict-paper", "--seed", 5,
        "--rounds", 8, "--out", tmp_path / "s")
    manifest = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert manifest["params"]["strict_paper"] is True and "--strict-paper" in manifest["argv"]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CIPRNG_SEED", "1")
    _, out, _ = run(capsys, "generate", "--fn", "b", "--b", 4, "--rounds", 8, "--format", "ints")
    assert out.split()[:3] == ["13", "2", "10"]


def test_test_subcommand_and_rerun(capsys, tmp_path, fn_file):
    first = tmp_path / "one"
    code, out, _ = run(capsys, "test", "--fn", fn_file, "--b", 5, "--seed", 42, *FAST, "--out", first)
    assert code == 0 and "Success" in out
    report = json.loads((first / "report.json").read_text())
    assert report["sequence_count"] == 55 and report["sequence_length"] == 2000
    assert len(report["tests"]) == 15
    manifest = json.loads((first / "manifest.json").read_text())
    assert manifest["inputs"]["sha256"] and manifest["inputs"]["fn"] == str(fn_file.resolve())
    second = tmp_path / "two"
    code, _, _ = run(capsys, "rerun", first / "manifest.json", "--out", second)
    assert code == 0
    for name in ("report.json", "report.txt", "repartition.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    # a changed input is refused
    fn_file.write_text(builtin_function("d").to_json())
    code, _, err = run(capsys, "rerun", first / "manifest.json")
    assert code == 2 and "changed" in err


def test_pipeline(capsys, tmp_path):
    code, out, _ = run(capsys, "pipeline", "--n", 4, "--rate", 0.3, "--seed", 3, "--tmax", 200, *FAST,
                       "--out", tmp_path / "p")
    assert code == 0
    files = {p.name for p in (tmp_path / "p").iterdir()}
    assert {"function.json", "deviation.csv", "summary.json", "report.json", "report.txt",
            "repartition.csv", "manifest.json"} <= files


def test_error_codes(capsys, tmp_path):
    code, _, err = run(capsys, "generate", "--fn", tmp_path / "missing.json", "--b", 3, "--rounds", 4)
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "generate", "--fn", "neg", "--rounds", 4, "--seed", 1)
    assert code == 2
    code, _, _ = run(capsys, "generate", "--fn", "identity-ish", "--b", 3, "--rounds", 4)
    assert code in (1, 2)
    code, _, _ = run(capsys, "trace", "--fn", "b", "--x0", 4, "--strategy", "2,5")
    assert code == 2
    code, _, _ = run(capsys, "gen-fn", "--n", 4)
    assert code == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "ciprng.cli", "trace", "--fn", "b", "--x0", "4",
                          "--strategy", "2,4,2,3"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "4,0,0,4,6"
