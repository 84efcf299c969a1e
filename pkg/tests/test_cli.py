import io
import json
import subprocess
import sys

import pytest

from ramseykit.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_enumerate_tsv():
    code, out = call("enumerate", "--class", "rigid-surjection", "--L", "3", "--K", "2", "--format", "tsv")
    assert code == 0
    assert len(out.splitlines()) == 3


def test_global_flags_before_the_subcommand():
    code, out = call("--format", "tsv", "enumerate", "--class", "rigid-surjection", "--L", "3", "--K", "2")
    assert code == 0 and len(out.splitlines()) == 3


def test_enumerate_jsonl_counts():
    code, out = call("enumerate", "--class", "increasing-injection", "--L", "2", "--K", "5")
    assert code == 0 and len(records(out)) == 10


def test_compose():
    code, out = call("compose", "--kind", "full", "--left", "2|1 2", "--right", "2|1 2 2")
    assert code == 0
    assert records(out)


def test_verify_walks():
    code, out = call("verify-walks", "--M", "8")
    assert code == 0
    rec = records(out)[0]
    assert rec["theorem"] == "T74" and rec["M"] == 8 and rec["result"] is True
    code, out = call("verify-walks", "--M", "5")
    assert code == 0 and records(out)[0]["result"] == "vacuous"


def test_search_classical_and_certificates(tmp_path):
    code, out = call("search", "--statement", "classical", "--d", "2", "--K", "2", "--L", "3",
                     "--max-M", "8", "--certificate-dir", str(tmp_path))
    assert code == 0
    summary = records(out)[-1]
    assert summary["min_M"] == 6
    assert summary["budget"]["max_colorings"] == 10 ** 7
    bad = summary["bad_coloring_certificate"]
    assert bad.endswith("classical-M5.json")
    for path in sorted(tmp_path.iterdir()):
        code, out = call("check", "--certificate", str(path))
        assert code == 0, path
        assert records(out)[0]["verified"] is True


def test_search_inconclusive_exit_code():
    code, out = call("search", "--statement", "classical", "--d", "2", "--K", "2", "--L", "3",
                     "--max-colorings", "100")
    assert code == 3
    assert records(out)[-1]["min_M"] == "Inconclusive"


def test_check_ph_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    bad = tmp_path / "bad.json"
    code, _ = call("check-ph", "--instance", "example-b", "--param", "K0=2", "--cutoff", "6",
                   "--d", "2", "--S", "3", "--F", "[4,3]", "--certificate-out", str(good))
    assert code == 0
    code, _ = call("check-ph", "--instance", "example-b", "--param", "K0=2", "--cutoff", "6",
                   "--d", "2", "--S", "3", "--F", "[3,3]", "--certificate-out", str(bad))
    assert code == 1
    for path in (good, bad):
        code, out = call("check", "--certificate", str(path))
        assert code == 0 and records(out)[0]["verified"] is True


def test_tampered_certificate_fails(tmp_path):
    path = tmp_path / "bad.json"
    call("check-ph", "--instance", "example-b", "--param", "K0=2", "--cutoff", "6",
         "--d", "2", "--S", "3", "--F", "[3,3]", "--certificate-out", str(path))
    cert = json.loads(path.read_text())
    cert["coloring"] = {k: 1 for k in cert["coloring"]}
    path.write_text(json.dumps(cert))
    code, _ = call("check", "--certificate", str(path))
    assert code == 1


def test_check_axioms():
    code, out = call("check-axioms", "--instance", "example-a", "--cutoff", "4")
    assert code == 0
    assert all(r["pass"] for r in records(out))


def test_translate():
    code, out = call("translate", "--to-rigid", '{"A":1,"n":3,"blocks":[[1,3]],"g":{"2":1}}')
    assert code == 0 and records(out)[0]["rigid"] == "2|1 2 1 2"
    code, out = call("translate", "--to-parameter", "2|1 2 1 2", "--A", "1")
    assert records(out)[0]["parameter_set"]["blocks"] == [[1, 3]]
    code, out = call("translate", "--to-connection", '{"R":[[1,2]],"C":[2]}')
    assert code == 0


def test_witness_replay():
    code, out = call("witness", "--instance", "example-a", "--cutoff", "5", "--theorem", "T31",
                     "--t", "1", "--S", "[2,1]", "--limit", "5", "--replay")
    assert code == 0
    rec = records(out)[-1]
    assert rec["replay_failures"] == 0 and rec["replayed_colorings"] == 2 ** 3


@pytest.mark.parametrize("argv", [
    [],
    ["enumerate", "--class", "rigid-surjection", "--L", "3"],
    ["enumerate", "--class", "nope", "--L", "3", "--K", "1"],
    ["enumerate", "--class", "rigid-surjection", "--L", "3", "--K", "1", "--bogus"],
    ["search", "--statement", "hales-jewett", "--L", "2"],
    ["translate"],
    ["--threads", "0", "verify-walks", "--M", "6"],
])
def test_usage_errors(argv, capsys):
    code, out = call(*argv)
    assert code == 2
    assert out == ""
    assert capsys.readouterr().err


def test_output_is_identical_across_thread_counts():
    argv = ["search", "--statement", "classical", "--d", "2", "--K", "2", "--L", "3"]
    one = call("--threads", "1", *argv)
    four = call("--threads", "4", *argv)
    assert one == four


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ramseykit", "verify-walks", "--M", "6"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"] is True
