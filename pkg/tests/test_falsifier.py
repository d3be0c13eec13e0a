"""Falsifier tests: bounded enumeration, oracle cross-checks, samplers."""

import random

import pytest

import condjust.tableau as tableau
from condjust.falsifier import (
    CrossCheckReport,
    SearchSignature,
    cross_check,
    find_countermodel,
    iter_kripke_models,
    sample_models,
)
from condjust.kripke_models import (
    check_conditions,
    eval as kripke_eval,
    model_to_json,
    profile_for,
)
from condjust.routley_models import (
    check_jrc_conditions,
    eval_jrc,
    routley_model_to_json,
)
from condjust.syntax import (
    And,
    Atom,
    Dialect,
    Just,
    Neg,
    RelCf,
    RelImp,
    Sum,
    Variable,
    atoms,
    parse_formula,
    parse_term,
)
from condjust.tableau import Budget, Closed, Exhausted, Open, Signed

J = Dialect.JRC
L = Dialect.LPCplus


def pf(text: str, dialect=J):
    return parse_formula(text, dialect)


class TestSearchSignature:
    def test_rejects_nonpositive_bound(self):
        with pytest.raises(ValueError):
            SearchSignature.for_sequent([], pf("p"), J, 0)

    def test_derived_fields(self):
        sig = SearchSignature.for_sequent(
            [pf("q", L)], pf("s:p > (s+t):p", L), L, 2)
        assert sig.atoms == ("p", "q")
        assert sig.antecedents == (pf("s:p", L),)
        assert set(sig.terms) == {parse_term("s", L), parse_term("t", L),
                                  parse_term("s+t", L)}

    def test_jrc_antecedents_use_relevant_conditional(self):
        sig = SearchSignature.for_sequent([], pf("(p & ~p) ~> q"), J, 3)
        assert sig.antecedents == (pf("p & ~p"),)

    def test_dialect_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SearchSignature.for_sequent([], pf("p ~> q"), L, 2)


class TestKripkeEnumeration:
    def test_model_count_for_tiny_signature(self):
        sig = SearchSignature.for_sequent([], pf("p", L), L, 2)
        models = list(iter_kripke_models(sig))
        # k=1: 2 valuations; k=2 one normal: 2*2; k=2 both normal: 4
        assert len(models) == 10

    def test_smallest_first(self):
        sig = SearchSignature.for_sequent([], pf("p", L), L, 2)
        sizes = [len(m.states) for m in iter_kripke_models(sig)]
        assert sizes == sorted(sizes)


class TestKripkeCountermodels:
    def test_justification_regularity_fails(self):
        goal = pf("x:p == x:(p & p)", L)
        found = find_countermodel([], goal, L, 2)
        assert found is not None
        model, w = found
        assert len(model.states) == 2
        assert len(model.normal) == 1
        assert not kripke_eval(model, w, goal)
        assert kripke_eval(model, w, pf("x:p", L)) != kripke_eval(
            model, w, pf("x:(p & p)", L))

    def test_counterpossibles_are_vacuous(self):
        assert find_countermodel([], pf("false > p", L), L, 3) is None

    def test_factivity_tracks_reflexivity_condition(self):
        # condition 6 backs factivity; the plain-belief dialect drops both
        assert find_countermodel([], pf("x:p > p", L), L, 2) is None
        found = find_countermodel([], pf("x:p > p", Dialect.JCplus),
                                  Dialect.JCplus, 2)
        assert found is not None
        model, w = found
        assert len(model.states) == 1
        assert model.term_rels[parse_term("x", Dialect.JCplus)] == frozenset()

    def test_returned_model_passes_conditions(self):
        goal = pf("x:p == x:(p & p)", L)
        model, _ = find_countermodel([], goal, L, 2)
        assert check_conditions(model, profile_for(L), [goal]).ok

    def test_deterministic(self):
        goal = pf("x:p == x:(p & p)", L)
        a, wa = find_countermodel([], goal, L, 2)
        b, wb = find_countermodel([], goal, L, 2)
        assert model_to_json(a, L) == model_to_json(b, L) and wa == wb

    def test_profile_must_be_dialect(self):
        with pytest.raises(TypeError):
            find_countermodel([], pf("p", L), "lpcplus", 2)

    def test_bound_must_be_positive(self):
        with pytest.raises(ValueError):
            find_countermodel([], pf("p", L), L, 0)


class TestRoutleyCountermodels:
    def test_counterpossible_refutable(self):
        goal = pf("(p & ~p) ~> q")
        found = find_countermodel([], goal, J, 3)
        assert found is not None
        model, w = found
        assert w == "w0"
        assert check_jrc_conditions(model, [goal]).ok
        assert not eval_jrc(model, w, goal)
        assert len(model.states) == 2

    def test_validities_have_no_countermodel(self):
        for text in ["p ~> p", "s:p ~> (s+t):p", "p -> p", "(p & q) ~> p",
                     "s:(p & q) ~> s:p", "~(~p) ~> p"]:
            assert find_countermodel([], pf(text), J, 2) is None, text

    def test_premises_constrain_search(self):
        found = find_countermodel([pf("p"), pf("p ~> q")], pf("q"), J, 3)
        assert found is None
        found = find_countermodel([pf("p")], pf("q"), J, 2)
        assert found is not None
        model, w = found
        assert eval_jrc(model, w, pf("p")) and not eval_jrc(model, w, pf("q"))

    def test_deterministic(self):
        a = find_countermodel([], pf("(p & ~p) ~> q"), J, 3)
        b = find_countermodel([], pf("(p & ~p) ~> q"), J, 3)
        assert routley_model_to_json(a[0]) == routley_model_to_json(b[0])


class TestCrossCheck:
    def test_closed_validity_agrees(self):
        rep = cross_check([], pf("s:p ~> (s+t):p"), Budget(6, 500), 3)
        assert isinstance(rep.proof, Closed)
        assert rep.countermodel is None
        assert rep.verdict == "agree" and not rep.contradiction

    def test_open_with_countermodel_agrees(self):
        rep = cross_check([], pf("p ~> (q ~> p)"), Budget(6, 500), 3)
        assert isinstance(rep.proof, Open)
        assert rep.countermodel is not None
        assert rep.verdict == "agree"

    def test_premiseful_modus_ponens_agrees(self):
        rep = cross_check([pf("p"), pf("p ~> q")], pf("q"), Budget(6, 500), 3)
        assert isinstance(rep.proof, Closed) and rep.verdict == "agree"

    def test_exhausted_without_countermodel_inconclusive(self):
        rep = cross_check([], pf("s:p ~> (s+t):p"), Budget(6, 1), 3)
        assert isinstance(rep.proof, Exhausted)
        assert rep.verdict == "inconclusive"

    def test_exhausted_with_countermodel_agrees(self):
        rep = cross_check([], pf("(p & ~p) ~> q"), Budget(6, 1), 3)
        assert isinstance(rep.proof, Exhausted)
        assert rep.countermodel is not None and rep.verdict == "agree"

    def test_broken_rule_is_flagged(self, monkeypatch):
        # corrupt the conditional elimination rule: it now concludes the
        # negated consequent, so the proof goes open with a bogus branch
        orig = tableau._Prover._conclusions

        def broken(self, branch, rule, data):
            if rule == "T~>":
                s, edge = data
                return [Signed(Neg(s.formula.right), True, edge.dst)]
            return orig(self, branch, rule, data)

        monkeypatch.setattr(tableau._Prover, "_conclusions", broken)
        rep = cross_check([pf("p"), pf("p ~> q")], pf("q"), Budget(6, 500), 3)
        assert rep.contradiction
        assert "failed verification" in rep.detail

    def test_fabricated_closed_is_flagged(self, monkeypatch):
        import condjust.falsifier as falsifier

        monkeypatch.setattr(falsifier, "prove",
                            lambda premises, goal, budget=None: Closed("", 0))
        rep = cross_check([], pf("(p & ~p) ~> q"), None, 3)
        assert rep.contradiction
        assert "countermodel exists" in rep.detail


class TestRandomAgreement:
    ATOMS = ("p", "q")
    VARS = (Variable("s"), Variable("t"))

    @classmethod
    def random_term(cls, rng, depth):
        if depth <= 0 or rng.random() < 0.7:
            return rng.choice(cls.VARS)
        return Sum(cls.random_term(rng, depth - 1),
                   cls.random_term(rng, depth - 1))

    @classmethod
    def random_formula(cls, rng, depth):
        if depth <= 0:
            return Atom(rng.choice(cls.ATOMS))
        pick = rng.random()
        if pick < 0.22:
            return Atom(rng.choice(cls.ATOMS))
        if pick < 0.40:
            return Neg(cls.random_formula(rng, depth - 1))
        if pick < 0.56:
            return And(cls.random_formula(rng, depth - 1),
                       cls.random_formula(rng, depth - 1))
        if pick < 0.74:
            return RelCf(cls.random_formula(rng, depth - 1),
                         cls.random_formula(rng, depth - 1))
        if pick < 0.87:
            return RelImp(cls.random_formula(rng, depth - 1),
                          cls.random_formula(rng, depth - 1))
        return Just(cls.random_term(rng, 1),
                    cls.random_formula(rng, depth - 1))

    def test_no_contradictions_on_seeded_batch(self):
        rng = random.Random(404)
        for _ in range(30):
            goal = self.random_formula(rng, 3)
            premises = ([self.random_formula(rng, 2)]
                        if rng.random() < 0.3 else [])
            rep = cross_check(premises, goal, Budget(6, 500), 3)
            assert not rep.contradiction, rep.detail


class TestSampleModels:
    DIALECTS = [Dialect.LPCplus, Dialect.LPCint, Dialect.LPCprime,
                Dialect.LPCKplus, Dialect.J4Cplus, Dialect.JCplus, Dialect.L]

    @pytest.mark.parametrize("dialect", DIALECTS, ids=lambda d: d.value)
    def test_samples_pass_their_profile(self, dialect):
        rng = random.Random(7)
        univ = [pf("(x:(p => q) & y:p) > (x.y):q", dialect)]
        terms = [parse_term("x", dialect), parse_term("y", dialect),
                 parse_term("x.y", dialect)]
        models = sample_models(dialect, ["p", "q"], terms, 4, rng,
                               universe=univ)
        assert len(models) == 4
        for m in models:
            assert len(m.states) <= 3
            assert check_conditions(m, profile_for(dialect), univ).ok
            for w in m.normal:
                assert kripke_eval(m, w, univ[0])

    def test_single_normal_state_dialects(self):
        rng = random.Random(3)
        for dialect in (Dialect.LPCint, Dialect.LPCprime):
            for m in sample_models(dialect, ["p"], [], 6, rng):
                assert len(m.normal) == 1

    def test_rejects_unknown_dialect(self):
        with pytest.raises(ValueError):
            sample_models(J, ["p"], [], 1, random.Random(0))
