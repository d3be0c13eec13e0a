import json
import subprocess
import sys

import pytest

from condjust.cli import main, parse_sequent
from condjust.fixtures import fixture_json, fixture_text
from condjust.syntax import Dialect, ParseError, parse_formula


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def model_path(tmp_path, name):
    path = tmp_path / name
    path.write_text(json.dumps(fixture_json(name)), encoding="utf-8")
    return str(path)


def text_path(tmp_path, name):
    path = tmp_path / name
    path.write_text(fixture_text(name), encoding="utf-8")
    return str(path)


class TestParseSequent:
    def test_premises_and_goal(self):
        premises, goal = parse_sequent("p, p ~> q |- q", Dialect.JRC)
        assert premises == (parse_formula("p", Dialect.JRC),
                            parse_formula("p ~> q", Dialect.JRC))
        assert goal == parse_formula("q", Dialect.JRC)

    def test_bare_formula(self):
        premises, goal = parse_sequent("p ~> p", Dialect.JRC)
        assert premises == ()
        assert goal == parse_formula("p ~> p", Dialect.JRC)

    def test_empty_left_side(self):
        premises, goal = parse_sequent("|- q", Dialect.JRC)
        assert premises == ()
        assert goal == parse_formula("q", Dialect.JRC)

    def test_two_turnstiles_rejected(self):
        with pytest.raises(ParseError):
            parse_sequent("p |- q |- r", Dialect.JRC)


class TestParseCommand:
    def test_formula_roundtrip(self, capsys):
        code, out, _ = run(capsys, "parse", "--dialect", "l", "p > (q & p)")
        assert code == 0
        assert out.strip() == "p > q & p"

    def test_term(self, capsys):
        code, out, _ = run(capsys, "parse", "--dialect", "l", "--term", "(c.x)+y")
        assert code == 0
        assert out.strip() == "c.x+y"

    def test_json_payload(self, capsys):
        code, out, _ = run(capsys, "parse", "--dialect", "jrc", "--format", "json",
                           "p ~> q")
        assert code == 0
        doc = json.loads(out)
        assert doc == {"dialect": "jrc", "kind": "formula",
                       "input": "p ~> q", "canonical": "p ~> q"}

    def test_parse_error_exits_2(self, capsys):
        code, _, err = run(capsys, "parse", "--dialect", "l", "p >> q")
        assert code == 2
        assert "error:" in err

    def test_dialect_gate_applies(self, capsys):
        # box is not in the jrc slice of the grammar
        code, _, err = run(capsys, "parse", "--dialect", "jrc", "[]p")
        assert code == 2
        assert "box" in err

    def test_unknown_dialect_is_an_argparse_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["parse", "--dialect", "k45", "p"])
        assert exc.value.code == 2


class TestEvalCommand:
    def test_gettier_jtb_true(self, capsys, tmp_path):
        code, out, _ = run(capsys, "eval", "--model",
                           model_path(tmp_path, "gettier.json"),
                           "--state", "w", "(p|q) & (c.x):(p|q)")
        assert code == 0
        assert out.strip() == "true"

    def test_negative_verdict_still_exits_0(self, capsys, tmp_path):
        code, out, _ = run(capsys, "eval", "--model",
                           model_path(tmp_path, "gettier.json"),
                           "--state", "w", "~(p | q) > ~(c.x):(p | q)")
        assert code == 0
        assert out.strip() == "false"

    def test_valid_flag(self, capsys, tmp_path):
        code, out, _ = run(capsys, "eval", "--model",
                           model_path(tmp_path, "aumann.json"), "--valid", "[]p")
        assert code == 0
        assert out.strip() == "true"

    def test_routley_model_dispatch(self, capsys, tmp_path):
        code, out, _ = run(capsys, "eval", "--model",
                           model_path(tmp_path, "chisholm.json"),
                           "--valid", "q ~> p")
        assert code == 0
        assert out.strip() == "true"

    def test_unknown_state_exits_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "eval", "--model",
                           model_path(tmp_path, "gettier.json"),
                           "--state", "nowhere", "p")
        assert code == 2
        assert "unknown state" in err

    def test_missing_model_file_exits_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "eval", "--model",
                           str(tmp_path / "absent.json"), "--state", "w", "p")
        assert code == 2
        assert "cannot read" in err

    def test_bare_fixture_name_resolves(self, capsys):
        code, out, _ = run(capsys, "eval", "--model", "gettier.json",
                           "--state", "w", "(p|q) & (c.x):(p|q)")
        assert code == 0
        assert out.strip() == "true"

    def test_json_payload(self, capsys, tmp_path):
        code, out, _ = run(capsys, "eval", "--model",
                           model_path(tmp_path, "gettier.json"),
                           "--state", "w", "--format", "json", "p | q")
        assert code == 0
        doc = json.loads(out)
        assert doc["value"] is True
        assert doc["state"] == "w"
        assert doc["formula"] == "~(~p & ~q)"


class TestCheckModelCommand:
    def test_gettier_passes_with_cs(self, capsys, tmp_path):
        cs = tmp_path / "cs.json"
        cs.write_text(json.dumps(fixture_json("gettier_cs.json")), encoding="utf-8")
        code, out, _ = run(capsys, "check-model",
                           "--model", model_path(tmp_path, "gettier.json"),
                           "--cs", str(cs), "p => (p | q)")
        assert code == 0
        assert "result: ok" in out
        assert "FAIL" not in out

    def test_profile_override_reports_failure(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-model",
                           "--model", model_path(tmp_path, "gettier.json"),
                           "--profile", "lpcplus", "(c.x):(p | q)")
        assert code == 0
        assert "condition 6: FAIL" in out
        assert "witness w, c" in out
        assert "result: conditions failed" in out

    def test_routley_conditions(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-model",
                           "--model", model_path(tmp_path, "chisholm.json"),
                           "q ~> p")
        assert code == 0
        assert "result: ok" in out

    def test_cs_rejected_for_routley(self, capsys, tmp_path):
        cs = tmp_path / "cs.json"
        cs.write_text("[]", encoding="utf-8")
        code, _, err = run(capsys, "check-model",
                           "--model", model_path(tmp_path, "chisholm.json"),
                           "--cs", str(cs))
        assert code == 2
        assert "jrc" in err

    def test_jrc_profile_rejected_for_kripke(self, capsys, tmp_path):
        code, _, err = run(capsys, "check-model",
                           "--model", model_path(tmp_path, "gettier.json"),
                           "--profile", "jrc")
        assert code == 2

    def test_json_payload(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-model", "--format", "json",
                           "--model", model_path(tmp_path, "rcea.json"),
                           "--profile", "lpckplus", "p > q", "(p & p) > q")
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is False
        failed = [r for r in doc["results"] if not r["passed"]]
        assert [r["condition"] for r in failed] == ["9"]
        assert failed[0]["witness"] == ["p", "p & p"]


class TestProveCommand:
    def test_closed_with_trace(self, capsys):
        code, out, _ = run(capsys, "prove", "s:p ~> (s+t):p")
        assert code == 0
        assert out.startswith("CLOSED in ")
        assert "[goal]" in out
        assert "closed" in out

    def test_open_prints_countermodel(self, capsys):
        code, out, _ = run(capsys, "prove", "(p & ~p) ~> q")
        assert code == 0
        assert out.startswith("OPEN")
        assert '"dialect": "jrc"' in out

    def test_open_json_is_verified(self, capsys):
        code, out, _ = run(capsys, "prove", "--format", "json", "q ~> (p | ~p)")
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "open"
        assert doc["verified"] is True
        assert doc["model"]["dialect"] == "jrc"

    def test_premises(self, capsys):
        code, out, _ = run(capsys, "prove", "p, p ~> q |- q")
        assert code == 0
        assert out.startswith("CLOSED")

    def test_exhausted_exits_3(self, capsys):
        code, out, _ = run(capsys, "prove", "--budget-steps", "1",
                           "s:p ~> (s+t):p")
        assert code == 3
        assert out.startswith("EXHAUSTED")

    def test_bad_budget_exits_2(self, capsys):
        code, _, err = run(capsys, "prove", "--budget-steps", "0", "p ~> p")
        assert code == 2
        assert "budget" in err


class TestFalsifyCommand:
    def test_finds_kripke_countermodel(self, capsys):
        code, out, _ = run(capsys, "falsify", "--dialect", "jcplus",
                           "--bound", "2", "x:p > p")
        assert code == 0
        assert "countermodel falsifies the sequent at state" in out

    def test_reports_absence(self, capsys):
        code, out, _ = run(capsys, "falsify", "--dialect", "l", "false > p")
        assert code == 0
        assert out.strip() == "no countermodel within 3 states"

    def test_jrc_counterpossible(self, capsys):
        code, out, _ = run(capsys, "falsify", "--dialect", "jrc",
                           "--format", "json", "(p & ~p) ~> q")
        assert code == 0
        doc = json.loads(out)
        assert doc["found"] is True
        assert doc["model"]["dialect"] == "jrc"

    def test_bad_bound_exits_2(self, capsys):
        code, _, err = run(capsys, "falsify", "--dialect", "l",
                           "--bound", "0", "p > p")
        assert code == 2
        assert "bound" in err


class TestCheckProofCommand:
    def test_cc_lemma_ok(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           text_path(tmp_path, "lemma_cc.txt"))
        assert code == 0
        assert out.splitlines()[0] == "OK"
        assert "conclusion: (p > q) & (p > r) => p > q & r" in out

    def test_premises_listed(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           text_path(tmp_path, "theorem_rck.txt"))
        assert code == 0
        assert "premises: q1 & q2 => r" in out

    def test_cs_fixture(self, capsys, tmp_path):
        cs = tmp_path / "cs.json"
        cs.write_text(json.dumps(fixture_json("gettier_cs.json")), encoding="utf-8")
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           "--cs", str(cs),
                           text_path(tmp_path, "gettier_derivation.txt"))
        assert code == 0
        assert out.splitlines()[0] == "OK"

    def test_bare_fixture_names_resolve(self, capsys):
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           "--cs", "gettier_cs.json", "gettier_derivation.txt")
        assert code == 0
        assert out.splitlines()[0] == "OK"

    def test_missing_cs_is_a_verdict_not_an_error(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           text_path(tmp_path, "gettier_derivation.txt"))
        assert code == 0
        assert out.startswith("REJECTED line ")

    def test_mutated_line_rejected(self, capsys, tmp_path):
        text = fixture_text("lemma_cc.txt").replace(
            "10. (p > q) & (p > r) => p > q & r ; mp 8 9",
            "10. (p > q) & (p > r) => p > r & q ; mp 8 9")
        bad = tmp_path / "bad.txt"
        bad.write_text(text, encoding="utf-8")
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus", str(bad))
        assert code == 0
        assert out.startswith("REJECTED line 10")

    def test_json_payload(self, capsys, tmp_path):
        code, out, _ = run(capsys, "check-proof", "--dialect", "lpcplus",
                           "--format", "json",
                           text_path(tmp_path, "lemma_cc.txt"))
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True
        assert doc["premises"] == []
        assert doc["error_line"] is None


class TestInternalizeCommand:
    def test_cc_lemma(self, capsys, tmp_path):
        code, out, _ = run(capsys, "internalize", "--dialect", "lpcplus",
                           text_path(tmp_path, "lemma_cc.txt"))
        assert code == 0
        assert out.startswith("term: ")
        assert "justifies" in out

    def test_json_has_constants(self, capsys, tmp_path):
        code, out, _ = run(capsys, "internalize", "--dialect", "lpcplus",
                           "--format", "json",
                           text_path(tmp_path, "lemma_cc.txt"))
        assert code == 0
        doc = json.loads(out)
        assert doc["constants"]
        assert doc["term"].startswith("c")
        assert "1." in doc["derivation"]

    def test_premises_rejected(self, capsys, tmp_path):
        code, _, err = run(capsys, "internalize", "--dialect", "lpcplus",
                           text_path(tmp_path, "theorem_rck.txt"))
        assert code == 2
        assert "premise-free" in err


class TestCorpusCommand:
    def test_bundled_corpus_passes(self, capsys):
        code, out, _ = run(capsys, "corpus")
        assert code == 0
        assert ", 0 failed" in out
        assert "FAIL" not in out

    def test_json_summary(self, capsys):
        code, out, _ = run(capsys, "corpus", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["failed"] == 0
        assert doc["passed"] == len(doc["cases"])
        assert all(c["note"] for c in doc["cases"])

    def test_failing_case_exits_1(self, capsys, tmp_path):
        model_path(tmp_path, "gettier.json")
        cases = tmp_path / "cases.json"
        cases.write_text(json.dumps({"cases": [
            {"name": "wrong", "note": "deliberately wrong expectation",
             "check": "eval", "model": "gettier.json", "state": "w",
             "formula": "p | q", "expect": False},
        ]}), encoding="utf-8")
        code, out, _ = run(capsys, "corpus", "--cases", str(cases))
        assert code == 1
        assert "FAIL  wrong" in out
        assert "expected false, got true" in out

    def test_unknown_kind_exits_2(self, capsys, tmp_path):
        cases = tmp_path / "cases.json"
        cases.write_text(json.dumps({"cases": [
            {"name": "odd", "check": "guess"},
        ]}), encoding="utf-8")
        code, _, err = run(capsys, "corpus", "--cases", str(cases))
        assert code == 2
        assert "unknown check kind" in err

    def test_case_errors_count_as_failures(self, capsys, tmp_path):
        cases = tmp_path / "cases.json"
        cases.write_text(json.dumps({"cases": [
            {"name": "unparseable", "note": "bad formula text",
             "check": "prove", "sequent": "p ~>", "expect": "closed"},
        ]}), encoding="utf-8")
        code, out, _ = run(capsys, "corpus", "--cases", str(cases))
        assert code == 1
        assert "case error" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "condjust.cli", "parse", "--dialect", "l", "p&q"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "p & q"
