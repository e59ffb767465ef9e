import json

import pytest

from src.cli import main
from src.utils.logger import set_level

W0 = "a:1 b:2 a:2 a:1 b:3 a:1 b:2"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


def test_eval(capsys):
    """Test positions of S on a short word"""
    code, payload, _ = run(capsys, "eval", "-f", "S", "-w", "a:1 b:2 a:2")
    assert code == 0, "Evaluation succeeds"
    assert payload == {"positions": [2]}, "Only position 2 continues its class next"


def test_eval_running_example(capsys):
    """Test a class eventuality on the running example"""
    _, payload, _ = run(capsys, "eval", "-f", "Fc a", "-w", W0)
    assert payload["positions"] == [1, 2, 3, 4, 6], "Some a later in the class"


def test_pretty_and_log_level(capsys):
    """Test that rendering and logging flags leave the payload unchanged"""
    code = main(["--pretty", "--log-level", "warning", "eval", "-f", "S", "-w", "a:1 b:2 a:2"])
    out = capsys.readouterr().out
    set_level("INFO")
    assert code == 0, "Evaluation succeeds"
    assert "\n  " in out, "Indented output"
    assert json.loads(out) == {"positions": [2]}, "Same payload as compact output"


def test_check_exit_codes(capsys):
    """Test that a non-model exits with 1"""
    code, payload, _ = run(capsys, "check", "-f", "a", "-w", W0)
    assert code == 0 and payload == {"models": True}, "Position 1 carries an a"
    code, payload, _ = run(capsys, "check", "-f", "b", "-w", W0)
    assert code == 1 and payload == {"models": False}, "Violation exit code"


def test_usage_errors(capsys):
    """Test that parse and argument errors exit with 2"""
    code, payload, err = run(capsys, "eval", "-f", "a &", "-w", W0)
    assert code == 2 and payload is None, "Parse error"
    assert err.startswith("error:"), "Message on stderr"
    code, _, _ = run(capsys)
    assert code == 2, "Missing subcommand"
    code, _, _ = run(capsys, "normalize", "-f", "Fg a")
    assert code == 2, "Normalize needs a mode"
    code, _, _ = run(capsys, "eval", "-f", "a", "--word-file", "/nonexistent/word.txt")
    assert code == 2, "Unreadable word file"


def test_classify_and_table(capsys):
    """Test fragment reports"""
    code, payload, _ = run(capsys, "classify", "-f", "mu x.(Xc Xg x | p)")
    assert code == 0 and payload["br"] == 1 and payload["bma"] is None, "BR only"
    _, payload, _ = run(capsys, "table", "--max-bridge", "2")
    rows = {row["name"]: (row["br"], row["bma"]) for row in payload["rows"]}
    assert rows["phi1"] == (2, 3), "phi1 heights"
    assert rows["bridge2"] == (1, 4), "Bridge of length 2"
    assert rows["bridge"] == (1, None), "Closed bridge is BR only"


def test_normalize(capsys):
    """Test the three normal forms"""
    code, guarded, _ = run(capsys, "normalize", "--guarded", "-f", "nu x.(Xg x | a) & b")
    assert code == 0 and guarded["formula"], "Guarded form printed"
    _, desugared, _ = run(capsys, "normalize", "--desugar", "-f", "Fg a")
    assert desugared["formula"].startswith("mu"), "F is a least fixpoint"
    code, _, _ = run(capsys, "normalize", "--dual", "-f", "Fg a")
    assert code == 0, "Dual of a sentence"


def test_data_automaton_commands(capsys):
    """Test automaton export, membership and bounded emptiness"""
    code, payload, _ = run(capsys, "to-da", "-f", "Gc a")
    assert code == 0 and "classAutomaton" in payload, "Automaton exported"
    code, payload, _ = run(capsys, "da-member", "-f", "Gg a", "-w", "a:1 a:2")
    assert code == 0 and payload["accepts"] and len(payload["run"]) == 2, "Accepted with a run"
    code, payload, _ = run(capsys, "da-member", "-f", "Gg a", "-w", "a:1 b:1")
    assert code == 1 and payload == {"accepts": False, "run": None}, "Rejected"
    _, payload, _ = run(capsys, "da-empty", "-f", "Xc a", "--max-len", "3")
    assert payload["witness"] is not None, "Witness found"


def test_cascade_commands(capsys):
    """Test cascade compilation and runs"""
    code, payload, _ = run(capsys, "to-cascade", "-f", "Xg Xc a")
    assert code == 0 and payload["height"] == 2, "Two stages"
    _, payload, _ = run(capsys, "run-cascade", "-f", "Fg b", "-w", "a:1 b:2")
    assert payload["accepts"] and payload["marking"] == [1, 2], "Both positions see a later b"
    _, payload, _ = run(capsys, "run-cascade", "--basis", "br", "-f", "Fc b", "-w", "a:1 b:1 a:2")
    assert payload["marking"] == [1, 2], "Class eventuality through class-memory transducers"


def test_translate(capsys):
    """Test translations and unsupported pairs"""
    code, payload, _ = run(capsys, "translate", "--from", "fo2", "--to", "udltl", "-f", "E y. (x~+1=y & a(y))")
    assert code == 0 and payload["depth"]["withinFactor"], "FO2 translation with a depth report"
    code, payload, _ = run(capsys, "translate", "--from", "dltl", "--to", "mu", "-f", "a Uc b")
    assert code == 0 and payload["formula"], "Data-LTL to mu-calculus"
    code, _, _ = run(capsys, "translate", "--from", "dltl", "--to", "fo2", "-f", "a")
    assert code == 2, "No direct Data-LTL to FO2 translation"


def test_equiv(capsys):
    """Test the exhaustive oracle from the command line"""
    code, payload, _ = run(capsys, "equiv", "--lhs", "mu:Fg a", "--rhs", "da:nu x. a | Xg x", "--max-len", "3")
    assert code == 0 and payload["counterexample"] is None, "Equivalent on finite words"
    code, payload, _ = run(
        capsys, "equiv", "--lhs", "mu:Fg a", "--rhs", "mu:a", "--max-len", "3", "--workers", "2", "--shrink"
    )
    assert code == 1, "Counterexample exits with 1"
    assert payload["counterexample"]["lhs"] is True and payload["counterexample"]["rhs"] is False, "Outcomes"


def test_enum(capsys):
    """Test enumeration counts"""
    _, payload, _ = run(capsys, "enum", "--sigma", "a,b", "--max-len", "5", "--count-only")
    assert payload == {"count": 1955}, "Words up to length 5 over two letters"
    _, payload, _ = run(capsys, "enum", "--sigma", "a", "--max-len", "2")
    assert payload["words"] == ["", "a:1", "a:1 a:1", "a:1 a:2"], "Canonical words in order"


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "instance.json"
    path.write_text(json.dumps([["ab", "a"], ["b", "bb"]]), encoding="utf-8")
    return str(path)


def test_pcp(capsys, instance_file):
    """Test encoding check and bounded search for a PCP instance"""
    code, payload, _ = run(capsys, "pcp", "--instance", instance_file, "--markers", "x,y", "--encode", "1 2")
    assert code == 0 and payload["holds"], "Encoding satisfies the instance sentence"
    code, payload, _ = run(capsys, "pcp", "--instance", instance_file, "--markers", "x,y", "--max-len", "9")
    assert code == 0 and payload["solution"] == [1, 2], "Search recovers the solution"
    code, _, _ = run(capsys, "pcp", "--instance", instance_file)
    assert code == 2, "Default markers clash with the instance letters"
