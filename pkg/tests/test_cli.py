import subprocess
import sys

import pytest

from ttstar.cli import main
from ttstar.corpus import corpus_dir

PROOFS = corpus_dir() / "proofs"
MUTATIONS = corpus_dir() / "mutations"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_accepts_eg(capsys):
    code, out, _ = run(capsys, "check", str(PROOFS / "eg-k1.proof"))
    assert code == 0
    assert out.splitlines()[0] == "Q(y):T, R(x,y)_(D(w)/x):T --> ∃(λx.R(x,y)):T"
    assert "  EXEC-INST: 1" in out


def test_check_with_oracle(capsys):
    code, out, _ = run(capsys, "check", str(PROOFS / "ae.proof"), "--oracle")
    assert code == 0 and "every rule instance valid" in out


def test_check_rejects_mutation(capsys):
    code, out, _ = run(capsys, "check", str(MUTATIONS / "eg-broken-freshness.proof"))
    assert code == 1 and out.startswith("FAIL")


def test_check_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.proof"
    empty.write_text("")
    code, _, err = run(capsys, "check", str(empty))
    assert code == 2 and "empty proof script" in err


def test_check_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "nope.proof"))
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize("text, want", [
    ("÷(3,0)", "improper"),
    ("∃(λ n . Odd(÷(3,n)))", "T"),
    ("⌈÷(3,0)⌉", "÷(3,0)"),
    ("exec_nu(sub1(acq[1],acq[n],acq[÷(3,n)]))", "3"),
])
def test_eval(capsys, text, want):
    code, out, _ = run(capsys, "eval", text, "-m", "arith7")
    assert code == 0 and out.strip() == want


def test_eval_with_assignment(capsys):
    code, out, _ = run(capsys, "eval", "÷(6,n)", "--assign", "n=2")
    assert code == 0 and out.strip() == "3"


def test_eval_intension_model(capsys):
    code, out, _ = run(capsys, "eval", "D(w)", "-m", "intension", "--assign", "w=w1")
    assert code == 0 and out.strip() == "improper"


@pytest.mark.parametrize("text", ["Odd(3", "÷(3,T)", "Frob(1)"])
def test_eval_input_errors(capsys, text):
    code, _, err = run(capsys, "eval", text)
    assert code == 2 and err.startswith("error:")


def test_eval_max_order(capsys):
    code, _, _ = run(capsys, "eval", "Improp(⌈3÷0⌉)", "--max-order", "1")
    assert code == 2


def test_corpus_subset(capsys):
    code, out, _ = run(capsys, "corpus", "--id", "a-e", "--id", "sub-a-h2")
    assert code == 0
    assert out.splitlines()[-1] == "2/2 corpus items as expected"
    assert "PASS sub-a-h2 correctly rejected" in out


def test_corpus_unknown_id(capsys):
    code, _, _ = run(capsys, "corpus", "--id", "nothing")
    assert code == 2


def test_oracle_fact1(capsys):
    code, out, _ = run(capsys, "oracle", "fact1")
    assert code == 0 and out.startswith("PASS fact1")
    code, out, _ = run(capsys, "oracle", "fact1", "--budget", "iota=1", "--budget", "partial=0")
    assert code == 1 and out.startswith("FAIL fact1")


def test_oracle_theorem1(capsys):
    code, out, _ = run(capsys, "oracle", "theorem1", "--count", "20")
    assert code == 0 and out.splitlines()[-1].startswith("20/20 passed")


def test_budget_exceeded_exit_code(capsys):
    code, _, err = run(capsys, "oracle", "theorem1", "--count", "20", "--budget", "assignments=1")
    assert code == 3 and "budget exceeded" in err


def test_bad_budget(capsys):
    code, _, _ = run(capsys, "oracle", "fact1", "--budget", "colour=1")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ttstar", "eval", "÷(6,2)"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "3"
