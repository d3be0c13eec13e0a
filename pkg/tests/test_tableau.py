"""Tableau prover tests: pinned traces, countermodel extraction, budgets."""

import json
from importlib import resources
from textwrap import dedent

import pytest

from condjust.routley_models import (
    check_jrc_conditions,
    eval_jrc,
    routley_model_to_json,
)
from condjust.syntax import Dialect, parse_formula
from condjust.tableau import (
    Branch,
    Budget,
    Closed,
    Exhausted,
    FormulaEdge,
    Label,
    Open,
    Signed,
    TermEdge,
    Ternary,
    extract_model,
    prove,
    verify_result,
)


def pf(text: str):
    return parse_formula(text, Dialect.JRC)


def fixture_json(name: str) -> dict:
    path = resources.files("condjust") / "fixtures" / f"{name}.json"
    return json.loads(path.read_text())


class TestNodeRendering:
    def test_label_str(self):
        assert str(Label(0)) == "0"
        assert str(Label(2, sharped=True)) == "2#"

    def test_label_bar_toggles_sharp(self):
        lab = Label(1)
        assert lab.bar() == Label(1, sharped=True)
        assert lab.bar().bar() == lab

    def test_signed_str(self):
        assert str(Signed(pf("p"), True, Label(1))) == "p, +1"
        assert str(Signed(pf("p ~> q"), False, Label(0))) == "p ~> q, -0"

    def test_edge_strs(self):
        assert str(FormulaEdge(Label(0), pf("s:p"), Label(1))) == "0 -[s:p]-> 1"
        edge = TermEdge(Label(1), pf("s:p").term, Label(2))
        assert str(edge) == "1 -[s]-> 2"
        assert str(Ternary(Label(0), Label(1), Label(1))) == "r 0 1 1"


class TestBudget:
    def test_defaults(self):
        b = Budget()
        assert b.max_fresh_labels == 8
        assert b.max_steps == 2000

    @pytest.mark.parametrize("labels,steps", [(0, 100), (4, 0), (-1, 10)])
    def test_rejects_nonpositive(self, labels, steps):
        with pytest.raises(ValueError):
            Budget(labels, steps)

    def test_prove_accepts_mapping(self):
        r = prove([], pf("p ~> p"), {"max_fresh_labels": 4, "max_steps": 50})
        assert isinstance(r, Closed)


class TestDialectGate:
    def test_rejects_material_conditional_formula(self):
        goal = parse_formula("p > q", Dialect.LPCplus)
        with pytest.raises(ValueError):
            prove([], goal)

    def test_rejects_bad_premise(self):
        bad = parse_formula("[]p", Dialect.L)
        with pytest.raises(ValueError):
            prove([bad], pf("p"))


class TestClosedSequents:
    def test_justified_sum_monotonicity_trace(self):
        r = prove([], pf("s:p ~> (s+t):p"))
        assert isinstance(r, Closed)
        assert r.steps <= 20
        expected = dedent("""\
            1. s:p ~> (s+t):p, -0  [goal]
            2. 0 -[s:p]-> 1  [F~>0 1]
            3. s:p, +1  [F~>0 1]
            4. (s+t):p, -1  [F~>0 1]
            5. 1 -[s+t]-> 2  [F: 4]
            6. p, -2  [F: 4]
            7. 1 -[s]-> 2  [sum 5]
            8. 1 -[t]-> 2  [sum 5]
            9. p, +2  [T: 3 7]
            closed [6, 9]""")
        assert r.tree == expected

    def test_identity_conditional(self):
        r = prove([], pf("p ~> p"))
        assert isinstance(r, Closed)
        expected = dedent("""\
            1. p ~> p, -0  [goal]
            2. 0 -[p]-> 1  [F~>0 1]
            3. p, +1  [F~>0 1]
            4. p, -1  [F~>0 1]
            closed [3, 4]""")
        assert r.tree == expected

    def test_conditional_modus_ponens(self):
        r = prove([pf("p"), pf("p ~> q")], pf("q"))
        assert isinstance(r, Closed)
        expected = dedent("""\
            1. p, +0  [premise]
            2. p ~> q, +0  [premise]
            3. q, -0  [goal]
            4. r 0 0 0  [norm]
              5. p, -0  [cut]
              closed [1, 5]
              6. 0 -[p]-> 0  [cut]
              7. q, +0  [T~> 2 6]
              closed [3, 7]""")
        assert r.tree == expected

    def test_relevant_implication_identity(self):
        r = prove([], pf("p -> p"))
        assert isinstance(r, Closed)
        assert r.steps == 1
        assert r.tree.endswith("closed [3, 4]")

    def test_relevant_modus_ponens(self):
        r = prove([pf("p"), pf("p -> q")], pf("q"))
        assert isinstance(r, Closed)
        assert "[T-> 2 4]" in r.tree

    def test_closed_goals_share_an_atom(self):
        # premise-free relevant validities must connect antecedent and
        # consequent vocabularies
        from condjust.syntax import atoms

        for text in ["p ~> p", "s:p ~> (s+t):p", "p -> p", "(p & q) ~> p"]:
            r = prove([], pf(text))
            assert isinstance(r, Closed)
            goal = pf(text)
            assert atoms(goal.left) & atoms(goal.right)


class TestOpenSequents:
    PARADOXES = [
        "(p & ~p) ~> q",
        "q ~> (p | ~p)",
        "p ~> (q ~> p)",
        "~p ~> (p ~> q)",
    ]

    @pytest.mark.parametrize("text", PARADOXES)
    def test_paradoxes_of_strict_implication_fail(self, text):
        r = prove([], pf(text), Budget(6, 500))
        assert isinstance(r, Open)

    @pytest.mark.parametrize("text", PARADOXES)
    def test_extracted_model_verifies(self, text):
        goal = pf(text)
        r = prove([], goal, Budget(6, 500))
        assert verify_result(r, [], goal) is True

    @pytest.mark.parametrize("text", PARADOXES)
    def test_extracted_model_falsifies_goal_at_root(self, text):
        goal = pf(text)
        r = prove([], goal, Budget(6, 500))
        report = check_jrc_conditions(r.extracted, [goal])
        assert report.ok, report.results
        assert eval_jrc(r.extracted, r.root_state, goal) is False

    def test_counterpossible_extraction_matches_fixture(self):
        r = prove([], pf("(p & ~p) ~> q"), Budget(6, 500))
        assert routley_model_to_json(r.extracted) == fixture_json(
            "lemma_counterpossible"
        )

    def test_disjunction_extraction_matches_fixture(self):
        r = prove([], pf("q ~> (p | ~p)"), Budget(6, 500))
        assert routley_model_to_json(r.extracted) == fixture_json(
            "lemma_disjunction"
        )

    def test_negated_antecedent_model_uses_sharped_states(self):
        r = prove([], pf("~p ~> (p ~> q)"), Budget(6, 500))
        doc = routley_model_to_json(r.extracted)
        assert doc["states"] == ["w0", "w0s", "w1", "w1s", "w2", "w2s"]
        assert doc["star"] == {
            "w0": "w0s", "w0s": "w0",
            "w1": "w1s", "w1s": "w1",
            "w2": "w2s", "w2s": "w2",
        }

    def test_relevance_failure_for_arrow_weakening(self):
        goal = pf("q -> (p -> p)")
        r = prove([], goal, Budget(6, 500))
        assert isinstance(r, Open)
        assert verify_result(r, [], goal) is True

    def test_open_branch_transcript_available(self):
        r = prove([], pf("(p & ~p) ~> q"), Budget(6, 500))
        text = r.branch.text()
        assert "[goal]" in text and "open" in text

    def test_verify_rejects_model_that_satisfies_goal(self):
        # an Open result only counts if its model genuinely falsifies
        # the sequent it was extracted for
        r = prove([], pf("(p & ~p) ~> q"), Budget(6, 500))
        assert verify_result(r, [], pf("p ~> p")) is False


class TestBudgetExhaustion:
    def test_fresh_label_starvation(self):
        r = prove([], pf("s:p ~> (s+t):p"), Budget(1, 500))
        assert isinstance(r, Exhausted)
        assert "fresh-label budget of 1" in r.report

    def test_step_starvation(self):
        r = prove([], pf("s:p ~> (s+t):p"), Budget(6, 1))
        assert isinstance(r, Exhausted)
        assert "step budget of 1" in r.report

    def test_exhausted_verifies_vacuously(self):
        goal = pf("s:p ~> (s+t):p")
        r = prove([], goal, Budget(6, 1))
        assert verify_result(r, [], goal) is True


class TestDeterminism:
    @pytest.mark.parametrize("text", TestOpenSequents.PARADOXES)
    def test_repeat_runs_agree(self, text):
        a = prove([], pf(text), Budget(6, 500))
        b = prove([], pf(text), Budget(6, 500))
        assert routley_model_to_json(a.extracted) == routley_model_to_json(
            b.extracted
        )
        assert a.branch.text() == b.branch.text()

    def test_closed_trace_stable(self):
        a = prove([], pf("s:p ~> (s+t):p"))
        b = prove([], pf("s:p ~> (s+t):p"))
        assert a.tree == b.tree


class TestExtraction:
    def test_incomplete_branch_rejected(self):
        with pytest.raises(ValueError):
            extract_model(Branch())

    def test_root_state_is_normal(self):
        r = prove([], pf("(p & ~p) ~> q"), Budget(6, 500))
        assert r.root_state in r.extracted.normal
