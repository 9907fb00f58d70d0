import csv
import io
import json
import subprocess
import sys

import pytest

from seqlab.census import CSV_HEADER
from seqlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_census_csv(capsys):
    code, out, _ = run(capsys, "census", "--m", "8", "--limit", "1000000", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 9
    assert sum(int(r[2]) for r in rows[1:]) == 10**6
    assert rows[1][2] == "0"  # S_{0,8}


def test_census_json_has_manifest(capsys):
    code, out, _ = run(capsys, "census", "--m", "5", "--limit", "1000")
    data = json.loads(out)
    assert code == 0 and data["limit"] == 1000
    man = data["manifest"]
    assert man["subcommand"] == "census"
    assert man["parameters"]["m"] == 5
    assert man["tool_version"].startswith("seqlab ")


def test_census_interrupt_and_resume(tmp_path, capsys):
    ck = tmp_path / "c.sqlb"
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, _, err = run(capsys, "census", "--m", "12", "--limit", "200000", "--checkpoint", str(ck),
                       "--checkpoint-every", "30000", "--stop-after", "90000")
    assert code == 3 and "resume" in err
    code, _, _ = run(capsys, "census", "--m", "12", "--limit", "200000", "--checkpoint", str(ck),
                     "--resume", "--format", "csv", "--out", str(a))
    assert code == 0
    run(capsys, "census", "--m", "12", "--limit", "200000", "--format", "csv", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "a.csv.manifest.json").read_text())["outputs"] == [str(a)]


def test_corrupt_checkpoint_is_usage_error(tmp_path, capsys):
    ck = tmp_path / "c.sqlb"
    run(capsys, "census", "--m", "7", "--limit", "5000", "--checkpoint", str(ck), "--stop-after", "100")
    blob = bytearray(ck.read_bytes())
    blob[30] ^= 0xFF
    ck.write_bytes(bytes(blob))
    code, _, err = run(capsys, "census", "--m", "7", "--limit", "5000", "--checkpoint", str(ck),
                       "--resume")
    assert code == 2 and "checksum" in err


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--max-m", "6", "--limit", "100000", "--threshold", "0.01")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert sorted(r["modulus"] for r in data["reports"]) == [2, 3, 4, 5, 6]
    code, _, _ = run(capsys, "scan", "--max-m", "6", "--limit", "1000", "--threshold", "1e-9")
    assert code == 1


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--limit", "100000")
    data = json.loads(out)
    assert code == 0
    assert {"parity", "quadrupling_mod32", "even_quadruples", "window_disjoint(j=2)"} <= {
        v["lemma_id"] for v in data["results"]}


def test_verify_empirical_with_cert(tmp_path, capsys):
    cert = tmp_path / "cert.json"
    assert run(capsys, "certify", "--x", "0", "--m", "3", "--j", "2", "--out", str(cert))[0] == 0
    code, out, _ = run(capsys, "verify", "--suite", "empirical", "--cert", str(cert),
                       "--limit", "10000")
    assert code == 0 and json.loads(out)["results"][0]["status"] == "pass"


def test_certify_and_verify_certificate(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "certify", "--x", "0", "--m", "3", "--j", "2", "--out", str(path))
    data = json.loads(path.read_text())
    assert code == 0
    assert data["e"] == 1 and data["witness_tuple"] == [0, 1] and data["certified"]
    code, out, _ = run(capsys, "verify-certificate", str(path))
    assert code == 0 and json.loads(out)["density_lower_bound"] == "1/6"
    data["e"] = 2
    path.write_text(json.dumps(data))
    assert run(capsys, "verify-certificate", str(path))[0] == 1


def test_certify_budget_exit(tmp_path, capsys):
    code, out, _ = run(capsys, "certify", "--x", "0", "--m", "5", "--j", "8", "--tuple-budget", "1")
    assert code == 3 and json.loads(out)["certified"] is False


def test_certify_checkpoint_resume(tmp_path, capsys):
    ck = tmp_path / "s.json"
    code, _, _ = run(capsys, "certify", "--x", "0", "--m", "7", "--j", "7", "--tuple-budget",
                     "100000", "--checkpoint", str(ck))
    assert code == 3 and ck.exists()
    code, out, _ = run(capsys, "certify", "--x", "0", "--m", "7", "--j", "7", "--checkpoint",
                       str(ck), "--resume")
    ref = json.loads(run(capsys, "certify", "--x", "0", "--m", "7", "--j", "7")[1])
    got = json.loads(out)
    assert code == 0 and (got["e"], got["witness_tuple"]) == (ref["e"], ref["witness_tuple"])


@pytest.mark.parametrize("argv", [
    ["certify", "--x", "0", "--m", "8", "--j", "3"],
    ["certify", "--x", "5", "--m", "3", "--j", "2"],
    ["verify-certificate", "/nonexistent/cert.json"],
    ["lemmas", "--grid-density", "3"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_rejects_missing_arguments(capsys):
    with pytest.raises(SystemExit) as info:
        main(["census", "--m", "3"])
    assert info.value.code == 2


def test_growth(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "growth", "--from", "141", "--to", "5000", "--format", "csv",
                     "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 5000 - 140 and {r["verdict"] for r in rows} == {"pass"}
    code, out, _ = run(capsys, "growth", "--from", "2", "--to", "500")
    data = json.loads(out)
    assert code == 1 and data["largest_failing"] == 140


def test_probe_and_lemmas(capsys):
    code, out, _ = run(capsys, "probe", "--epsilon", "0.5", "1.0", "--limit", "5000")
    data = json.loads(out)["results"]
    assert code == 0 and [p["epsilon"] for p in data] == [0.5, 1.0]
    code, out, _ = run(capsys, "lemmas", "--grid-density", "20")
    assert code == 0 and len(json.loads(out)["results"]) == 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "seqlab", "census", "--m", "3", "--limit", "10",
                           "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(CSV_HEADER)
