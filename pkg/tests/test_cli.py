import io
import json
import subprocess
import sys

import pytest

from nfbisim.bisim import NET_SIM, prove_bisimilarity
from nfbisim.cli import main
from nfbisim.laws import NAIVE_FIX_RELATION, Budgets, Law, run_table
from nfbisim.prelude import term
from nfbisim.vsc import big_step_vsc


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def records(*argv):
    code, out = run(*argv, "--format", "records")
    return code, [json.loads(line) for line in out.splitlines()]


def test_eval_omega_l_diverges():
    code, out = run("eval", "--calc", "vsc", "--fuel", "50", "Omega_L")
    assert code == 2
    assert "Diverged" in out


def test_eval_plotkin_converges():
    code, recs = records("eval", "--calc", "plotkin-weak", "Omega_L")
    assert code == 0
    assert recs == [{"result": "converged", "steps": 0, "nf": r"(\x. \x. x x) (y z) (\x. x x)"}]


def test_eval_trace():
    code, out = run("eval", "--trace", "3", "Omega_L")
    assert out.count("-m->") == 2 and out.count("-e->") == 1


def test_bisim_enf_proven_prints_relation():
    code, out = run("bisim", "--kind", "enf", "I (x x)", "x x")
    assert code == 0
    assert "Proven" in out and r"(\x. x) (x x)  ~  x x" in out


def test_bisim_net_refuted():
    code, out = run("bisim", "--kind", "net", "--mirror", "net", "x[x:=y I]", "y I")
    assert code == 1
    assert "Refuted" in out


def test_bisim_unknown_on_budget():
    code, _ = run("bisim", "--kind", "naive", "--pairs", "1", "Y_v", "Theta_v")
    assert code == 2


def test_records_roundtrip():
    code, recs = records("bisim", "--kind", "net", "Omega", "Omega_L")
    assert recs == [prove_bisimilarity(term("Omega"), term("Omega_L"), NET_SIM).to_record()]
    code, recs = records("eval", "Omega3")
    assert recs == [big_step_vsc(term("Omega3")).to_record()]
    code, recs = records("bench", "--laws", "dup", "--kinds", "enf,net", "--instances", "5")
    cells, _ = run_table(["enf", "net"], (Law.CBN_DUP,), Budgets(instances=5))
    assert recs == [c.to_record() for c in cells]


def test_records_are_deterministic():
    argv = ("proptest", "diamond", "--samples", "50", "--seed", "9", "--format", "records")
    assert run(*argv) == run(*argv)
    argv = ("bench", "--laws", "lid", "--seed", "2", "--format", "records")
    assert run(*argv) == run(*argv)


@pytest.mark.parametrize("argv", [
    ["eval", "--calc", "nope", "x"],
    ["bisim", "x"],
    ["bisim", "--kind", "enf", "--mirror", "com", "x", "y"],
    ["eval", "(x"],
    ["eval", "--fuel", "-1", "x"],
    ["checkrel", "--kind", "naive"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 3


def test_parse_error_shows_position(capsys):
    assert main(["eval", "x (y"]) == 3
    assert "position 4" in capsys.readouterr().err


def test_missing_prelude(tmp_path):
    assert run("eval", "--prelude", str(tmp_path / "none"), "x")[0] == 3


def test_custom_prelude(tmp_path):
    p = tmp_path / "defs.txt"
    p.write_text("K = \\x. \\y. x\n")
    code, out = run("eval", "--prelude", str(p), "K I z")
    assert code == 0 and r"\x. x" in out


def test_checkrel(tmp_path):
    p = tmp_path / "r.txt"
    p.write_text(NAIVE_FIX_RELATION)
    assert run("checkrel", "--kind", "naive", "--rel", str(p))[0] == 0
    p.write_text("Y_v ~ Theta_v\n")
    assert run("checkrel", "--kind", "naive", "--rel", str(p))[0] == 1


def test_nf_and_decompose():
    code, recs = records("nf", r"(\x. x) y[y:=z]")
    assert code == 0 and recs[0]["nf"] == "z" and recs[0]["class"] == "value"
    code, recs = records("decompose", "--side", "right", "x y (z w)")
    assert recs == [{"ctx": "x y <.>", "head": "z", "arg": "w"}]


def test_streq():
    assert run("streq", "(x y)[y:=z]", "x y[y:=z]")[0] == 0
    assert run("streq", "--mirror", "noncom", "(x w y)[y:=z]", "x w y[y:=z]")[0] == 1


def test_types():
    assert run("type-infer", "Omega")[0] == 1
    code, recs = records("type-infer", "x y", "--limit", "2")
    assert code == 0 and len(recs) == 2
    assert run("type-check", "x:[[] -o []] |- x I : []")[0] == 0
    assert run("type-check", "|- x y : []")[0] == 1
    assert run("type-preorder", r"(\x. y x x) (z w)", "y (z w) (z w)")[0] == 1
    assert run("type-preorder", "x", r"\y. x y")[0] == 0


def test_bench_targets():
    assert run("bench", "fixpoints")[0] == 0
    assert run("bench", "witnesses")[0] == 0
    assert run("bench", "--laws", "nope")[0] == 3


def test_proptest_mirrors():
    code, out = run("proptest", "mirrors", "--samples", "50")
    assert code == 0
    assert "expected to fail" in out


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "nfbisim", "bisim", "--kind", "enf", "I (x x)", "x x"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Proven" in r.stdout
