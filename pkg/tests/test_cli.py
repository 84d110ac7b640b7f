import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from modbm.cli import run

GOLDEN = Path(__file__).parent / "golden"

SUBCOMMANDS = ["witness", "sharpness", "cd-verify", "sumset", "beatty", "avoid", "hits", "equidist"]

# one small, quick invocation per subcommand
EXAMPLES = {
    "witness": ["witness", "--A", "(0..3/10)", "--B", "(1/2..1)", "--k", "2"],
    "sharpness": ["sharpness", "--beta", "1/2", "--k", "2", "--grid", "50"],
    "cd-verify": ["cd-verify", "--p", "5"],
    "sumset": ["sumset", "--p", "7", "--residues", "0,1,3", "--with", "0,2"],
    "beatty": ["beatty", "--alpha", "quad:0,1,2,1", "--terms", "10"],
    "avoid": ["avoid", "--alpha", "quad:0,1,2,1", "--N", "2000", "--spot-checks", "300"],
    "hits": ["hits", "--alpha", "quad:0,1,2,1", "--J", "(0..1/5)", "--N", "100,300"],
    "equidist": ["equidist", "--rho", "quad:0,1,2,1", "--poly", "poly:0,0,1", "--J", "(0..1/2)", "--N", "500"],
}


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    assert run([cmd, "--help"]) == 0
    assert f"usage: modbm {cmd}" in capsys.readouterr().out


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
@pytest.mark.parametrize("fmt", ["json", "csv", "plain"])
def test_deterministic(cmd, fmt):
    argv = EXAMPLES[cmd] + ["--format", fmt]
    first = call(argv)
    assert first[0] == 0, first[2]
    assert call(argv) == first


def test_witness_golden():
    code, out, _ = call(EXAMPLES["witness"])
    assert code == 0
    assert out == (GOLDEN / "cli_witness_worked.json").read_text()
    d = json.loads(out)
    assert d["p"] == 727 and d["verified"] is True and d["verification_failure"] is None


def test_sumset_output():
    d = json.loads(call(EXAMPLES["sumset"])[1])
    assert d["members"] == [0, 1, 2, 3, 5]


def test_beatty_terms():
    d = json.loads(call(EXAMPLES["beatty"])[1])
    assert d["terms"] == [1, 2, 4, 5, 7, 8, 9, 11, 12, 14]


def test_hits_csv_table():
    code, out, _ = call(EXAMPLES["hits"] + ["--format", "csv"])
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("N,set_size") and len(lines) == 3


@pytest.mark.parametrize(("argv", "code"), [
    (["witness", "--A", "(0..1/4)", "--B", "(1/2..1)"], 1),      # delta = 0
    (["witness", "--A", "(0..3/10)", "--B", "[1/2..1)"], 1),     # B not open
    (["witness", "--A", "(0..3/10", "--B", "(1/2..1)"], 2),
    (["beatty", "--alpha", "rat:3/2", "--terms", "5"], 1),
    (["beatty", "--alpha", "quad:1,x,5,2", "--terms", "5"], 2),
    (["hits", "--alpha", "quad:0,1,2,1", "--J", "(0..1/10)", "--N", "50"], 1),
    (["sumset", "--p", "8", "--residues", "1,2"], 1),
    (["sumset", "--p", "7", "--residues", "1,a"], 2),
    (["witness", "--A", "(0..3/10)", "--B", "(1/2..1)", "--prime-cap", "100"], 3),
    (["beatty", "--alpha", "dec:1.4142", "--contains", "1000000"], 3),
])
def test_exit_codes(argv, code):
    got, out, err = call(argv)
    assert got == code
    assert err.startswith("modbm ") and not out


def test_argparse_error_exit_two():
    assert run(["witness", "--k", "2"], io.StringIO(), io.StringIO()) == 2


def test_out_file(tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = call(EXAMPLES["cd-verify"] + ["--out", str(target)])
    assert code == 0 and target.read_text() == out


def test_precision_env(monkeypatch):
    argv = ["beatty", "--alpha", "dec:1.41421356237309504880", "--contains", "7"]
    monkeypatch.setenv("MODBM_PRECISION", "5")
    assert call(argv)[0] == 0
    monkeypatch.setenv("MODBM_PRECISION", "x")
    assert call(argv)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modbm"] + EXAMPLES["sumset"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["members"] == [0, 1, 2, 3, 5]
