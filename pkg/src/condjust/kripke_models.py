"""Relational models with impossible states for the counterfactual dialects.

A model has a set of states, a subset of normal states, an atomic valuation at
normal states, and a literal formula valuation at non-normal states. Truth is
compositional only at normal states; each counterfactual antecedent and each
justification term gets an accessibility relation, with per-formula overrides
on top of a default scheme derived from truth sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from condjust.syntax import (
    And, App, Atom, Bang, Box, Constant, Counterfactual, Dialect, Formula,
    Just, MatImp, Neg, Pair, RelCf, RelImp, Sum, Term, Variable,
    closure, formula_key, parse_formula, parse_term, print_formula,
    print_term, subterms, term_key, terms_of,
)

__all__ = [
    "RelScheme", "KripkeModel", "VariantProfile",
    "ConstantSpecification", "Explicit", "AxiomaticallyAppropriate",
    "cs_entries", "profile_for",
    "eval", "truthset", "valid_in_model", "consequence",
    "check_conditions", "default_universe",
    "ConditionResult", "ConditionReport",
    "jtb", "knowledge",
    "load_model", "model_to_json", "check_dialect_formula",
]


class RelScheme(enum.Enum):
    """Default accessibility for formulas without an explicit override."""

    TruthsetNormal = "truthset_normal"  # R_f(w) = truth set of f, normal states only
    TruthsetAll = "truthset_all"        # R_f(w) = full truth set of f
    Empty = "empty"


Pairs = frozenset[tuple[str, str]]


@dataclass(frozen=True, eq=False)
class KripkeModel:
    states: tuple[str, ...]
    normal: frozenset[str]
    valuation: dict[str, frozenset[str]] = field(default_factory=dict)
    nonnormal_valuation: dict[str, frozenset[Formula]] = field(default_factory=dict)
    term_rels: dict[Term, Pairs] = field(default_factory=dict)
    formula_rel_overrides: dict[Formula, Pairs] = field(default_factory=dict)
    formula_rel_default: RelScheme = RelScheme.TruthsetNormal

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "normal", frozenset(self.normal))
        if len(set(states)) != len(states) or not states:
            raise ValueError("states must be a nonempty sequence without repeats")
        if not self.normal <= set(states):
            raise ValueError("normal states must be listed in states")
        object.__setattr__(
            self, "valuation",
            {w: frozenset(v) for w, v in self.valuation.items()})
        object.__setattr__(
            self, "nonnormal_valuation",
            {w: frozenset(v) for w, v in self.nonnormal_valuation.items()})
        object.__setattr__(
            self, "term_rels",
            {t: frozenset(tuple(p) for p in v) for t, v in self.term_rels.items()})
        object.__setattr__(
            self, "formula_rel_overrides",
            {f: frozenset(tuple(p) for p in v) for f, v in self.formula_rel_overrides.items()})
        for w in self.valuation:
            if w not in self.normal:
                raise ValueError(f"valuation key {w!r} is not a normal state")
        for w in self.nonnormal_valuation:
            if w not in set(states) - self.normal:
                raise ValueError(f"nonnormal_valuation key {w!r} is not a non-normal state")
        all_states = set(states)
        for rel in self.term_rels.values():
            for a, b in rel:
                if a not in all_states or b not in all_states:
                    raise ValueError(f"relation pair ({a!r}, {b!r}) mentions unknown states")
        for rel in self.formula_rel_overrides.values():
            for a, b in rel:
                # Formula relations live on the normal states.
                if a not in self.normal or b not in self.normal:
                    raise ValueError(
                        f"formula relation pair ({a!r}, {b!r}) must join normal states")

    def state_index(self, w: str) -> int:
        return self.states.index(w)


# --- constant specifications -------------------------------------------


class ConstantSpecification:
    """Declares which axiom instances each proof constant justifies."""


@dataclass(frozen=True)
class Explicit(ConstantSpecification):
    entries: tuple[tuple[str, Formula], ...]


@dataclass(frozen=True, eq=False)
class AxiomaticallyAppropriate(ConstantSpecification):
    """Every axiom instance is justified by some constant; constants are
    allocated on demand and remembered, so repeated requests agree."""

    allocations: dict[Formula, str] = field(default_factory=dict)

    def allocate(self, f: Formula) -> str:
        name = self.allocations.get(f)
        if name is None:
            name = f"c{len(self.allocations) + 1}"
            self.allocations[f] = name
        return name


def cs_entries(cs: ConstantSpecification | None) -> tuple[tuple[str, Formula], ...]:
    """The concrete (constant, formula) pairs a specification has committed to."""
    if cs is None:
        return ()
    if isinstance(cs, Explicit):
        return tuple(cs.entries)
    if isinstance(cs, AxiomaticallyAppropriate):
        return tuple((name, f) for f, name in cs.allocations.items())
    raise TypeError(f"not a constant specification: {cs!r}")


# --- variant profiles ---------------------------------------------------


@dataclass(frozen=True)
class VariantProfile:
    name: str
    conditions: tuple[str, ...]
    box_enabled: bool = False


_PROFILES = {
    Dialect.LPCplus: VariantProfile("lpcplus", ("1", "2", "3", "4", "5", "6", "7")),
    Dialect.LPCint: VariantProfile("lpcint", ("1", "2", "3", "4", "5", "6", "7", "8")),
    Dialect.LPCprime: VariantProfile("lpcprime", ("1", "2", "3", "4", "5p", "6", "7")),
    Dialect.LPCKplus: VariantProfile("lpckplus", ("1", "2", "3", "4", "5", "6", "7", "9")),
    Dialect.J4Cplus: VariantProfile("j4cplus", ("1", "2", "3", "4", "5", "7")),
    Dialect.JCplus: VariantProfile("jcplus", ("1", "2", "3", "4", "5")),
    Dialect.L: VariantProfile("l", ("1", "2", "3", "4", "5", "7"), box_enabled=True),
}


def profile_for(dialect: Dialect) -> VariantProfile:
    profile = _PROFILES.get(dialect)
    if profile is None:
        raise ValueError(f"dialect {dialect.value} has no Kripke profile")
    return profile


# --- dialect validation --------------------------------------------------


def check_dialect_formula(f: Formula, dialect: Dialect) -> None:
    """Reject constructors that the dialect's grammar does not admit."""
    stack: list[Formula | Term] = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Box):
            if dialect is not Dialect.L:
                raise ValueError(f"box is not in dialect {dialect.value}")
            stack.append(g.inner)
        elif isinstance(g, (RelImp, RelCf)):
            if dialect is not Dialect.JRC:
                raise ValueError(f"relevant connectives are not in dialect {dialect.value}")
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (MatImp, Counterfactual)):
            if dialect is Dialect.JRC:
                raise ValueError("material and counterfactual conditionals are not in dialect jrc")
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, And):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Neg):
            stack.append(g.inner)
        elif isinstance(g, Just):
            stack.append(g.term)
            stack.append(g.inner)
        elif isinstance(g, Pair):
            if dialect is not Dialect.LPCint:
                raise ValueError(f"pair terms are not in dialect {dialect.value}")
            stack.append(g.inner)
            stack.append(g.antecedent)
        elif isinstance(g, (App, Bang, Constant)):
            if dialect is Dialect.JRC:
                raise ValueError("dialect jrc terms are variables and sums only")
            if isinstance(g, App):
                stack.append(g.left)
                stack.append(g.right)
            elif isinstance(g, Bang):
                stack.append(g.inner)
        elif isinstance(g, Sum):
            stack.append(g.left)
            stack.append(g.right)


# --- evaluation -----------------------------------------------------------


class _Evaluator:
    """Truth sets for one model, cached per formula."""

    def __init__(self, m: KripkeModel):
        self.m = m
        self.ts_cache: dict[Formula, frozenset[str]] = {}
        self.rel_cache: dict[Formula, dict[str, frozenset[str]]] = {}
        self.term_cache: dict[Term, dict[str, frozenset[str]]] = {}

    def truthset(self, f: Formula) -> frozenset[str]:
        ts = self.ts_cache.get(f)
        if ts is None:
            ts = frozenset(w for w in self.m.states if self.holds(w, f))
            self.ts_cache[f] = ts
        return ts

    def holds(self, w: str, f: Formula) -> bool:
        m = self.m
        if w not in m.normal:
            return f in m.nonnormal_valuation.get(w, frozenset())
        if isinstance(f, Atom):
            return f.name in m.valuation.get(w, frozenset())
        if isinstance(f, Neg):
            return not self.holds(w, f.inner)
        if isinstance(f, And):
            return self.holds(w, f.left) and self.holds(w, f.right)
        if isinstance(f, MatImp):
            return not self.holds(w, f.left) or self.holds(w, f.right)
        if isinstance(f, Counterfactual):
            return self.rel(f.left, w) <= self.truthset(f.right)
        if isinstance(f, Just):
            return self.term_rel(f.term, w) <= self.truthset(f.inner)
        if isinstance(f, Box):
            return m.normal <= self.truthset(f.inner)
        raise ValueError(
            f"{type(f).__name__} has no clause on relational models; use a Routley model")

    def rel(self, f: Formula, w: str) -> frozenset[str]:
        table = self.rel_cache.get(f)
        if table is None:
            ov = self.m.formula_rel_overrides.get(f)
            if ov is not None:
                rows: dict[str, set[str]] = {}
                for a, b in ov:
                    rows.setdefault(a, set()).add(b)
                table = {v: frozenset(rows.get(v, ())) for v in self.m.states}
            else:
                scheme = self.m.formula_rel_default
                if scheme is RelScheme.Empty:
                    shared = frozenset()
                elif scheme is RelScheme.TruthsetNormal:
                    shared = self.truthset(f) & self.m.normal
                else:
                    shared = self.truthset(f)
                table = {v: shared for v in self.m.states}
            self.rel_cache[f] = table
        return table[w]

    def term_rel(self, t: Term, w: str) -> frozenset[str]:
        table = self.term_cache.get(t)
        if table is None:
            rows: dict[str, set[str]] = {}
            for a, b in self.m.term_rels.get(t, ()):
                rows.setdefault(a, set()).add(b)
            table = {v: frozenset(rows.get(v, ())) for v in self.m.states}
            self.term_cache[t] = table
        return table[w]


def eval(m: KripkeModel, w: str, f: Formula, dialect: Dialect | None = None) -> bool:
    """Truth of f at state w."""
    if w not in set(m.states):
        raise ValueError(f"unknown state {w!r}")
    if dialect is not None:
        if dialect is Dialect.JRC:
            raise ValueError("dialect jrc is evaluated on Routley models")
        check_dialect_formula(f, dialect)
    return _Evaluator(m).holds(w, f)


def truthset(m: KripkeModel, f: Formula, dialect: Dialect | None = None) -> frozenset[str]:
    """States where f is true, non-normal states by literal membership."""
    if dialect is not None:
        check_dialect_formula(f, dialect)
    return _Evaluator(m).truthset(f)


def valid_in_model(m: KripkeModel, f: Formula, dialect: Dialect | None = None) -> bool:
    """True at every normal state."""
    ts = truthset(m, f, dialect)
    return m.normal <= ts


def consequence(m: KripkeModel, premises, goal: Formula,
                dialect: Dialect | None = None) -> bool:
    """Goal holds at every normal state where all premises hold."""
    ev = _Evaluator(m)
    if dialect is not None:
        for f in (*premises, goal):
            check_dialect_formula(f, dialect)
    for w in sorted(m.normal, key=m.state_index):
        if all(ev.holds(w, f) for f in premises) and not ev.holds(w, goal):
            return False
    return True


# --- knowledge macros -----------------------------------------------------


def jtb(f: Formula, t: Term) -> Formula:
    """Justified true belief: f holds and t justifies it."""
    return And(f, Just(t, f))


def knowledge(f: Formula, t: Term) -> Formula:
    """JTB plus sensitivity and adherence counterfactuals."""
    return And(
        And(
            And(f, Just(t, f)),
            Counterfactual(Neg(f), Neg(Just(t, f))),
        ),
        Counterfactual(f, Just(t, f)),
    )


# --- condition checking ----------------------------------------------------

APPROXIMATION_NOTE = (
    "universally quantified conditions are checked over the supplied finite "
    "universe only; a pass is relative to that universe"
)


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    passed: bool
    witness: tuple | None = None
    detail: str = ""


@dataclass(frozen=True)
class ConditionReport:
    profile: str
    results: tuple[ConditionResult, ...]
    approximation_note: str = APPROXIMATION_NOTE

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> tuple[ConditionResult, ...]:
        return tuple(r for r in self.results if not r.passed)


def default_universe(m: KripkeModel, queries=()) -> set[Formula]:
    """Subformula closure of the queries, relation overrides and non-normal
    valuation entries: the formulas a condition check can say anything about."""
    seeds = list(queries)
    seeds.extend(m.formula_rel_overrides)
    for entry in m.nonnormal_valuation.values():
        seeds.extend(entry)
    return closure(seeds)


def _term_universe(m: KripkeModel, universe) -> list[Term]:
    terms: set[Term] = set()
    for t in m.term_rels:
        terms |= subterms(t)
    for f in universe:
        terms |= terms_of(f)
    return sorted(terms, key=term_key)


def _normal_in_order(m: KripkeModel) -> list[str]:
    return [w for w in m.states if w in m.normal]


def check_conditions(m: KripkeModel, profile: VariantProfile, universe,
                     cs: ConstantSpecification | None = None) -> ConditionReport:
    """Check the profile's frame conditions over a finite formula universe."""
    formulas = sorted(closure(universe), key=formula_key)
    terms = _term_universe(m, formulas)
    ev = _Evaluator(m)
    checks = {
        "1": _cond_antecedent_truth,
        "2": _cond_weak_centering,
        "3": _cond_constants,
        "4": _cond_sum,
        "5": _cond_application,
        "5p": _cond_chained_application,
        "6": _cond_reflexive_terms,
        "7": _cond_checker,
        "8": _cond_pair,
        "9": _cond_rel_extensionality,
    }
    results = []
    for cid in profile.conditions:
        passed, witness, detail = checks[cid](m, ev, formulas, terms, cs)
        results.append(ConditionResult(cid, passed, witness, detail))
    return ConditionReport(profile.name, tuple(results))


def _cond_antecedent_truth(m, ev, formulas, terms, cs):
    for f in formulas:
        ts = ev.truthset(f)
        for w in _normal_in_order(m):
            stray = ev.rel(f, w) - ts
            if stray:
                v = min(stray, key=m.state_index)
                return False, (w, f, v), (
                    f"R[{print_formula(f)}]({w}) reaches {v} where the antecedent fails")
    return True, None, ""


def _cond_weak_centering(m, ev, formulas, terms, cs):
    for f in formulas:
        ts = ev.truthset(f)
        for w in _normal_in_order(m):
            if w in ts and w not in ev.rel(f, w):
                return False, (w, f), (
                    f"{w} satisfies {print_formula(f)} but R[{print_formula(f)}]({w}) misses it")
    return True, None, ""


def _cond_constants(m, ev, formulas, terms, cs):
    in_scope = set(formulas)
    for name, f in cs_entries(cs):
        if f not in in_scope:
            continue
        ts = ev.truthset(f)
        c = Constant(name)
        for w in _normal_in_order(m):
            stray = ev.term_rel(c, w) - ts
            if stray:
                v = min(stray, key=m.state_index)
                return False, (w, c, f), (
                    f"R[{name}]({w}) reaches {v} outside the specified formula's truth set")
    return True, None, ""


def _cond_sum(m, ev, formulas, terms, cs):
    for t in terms:
        if not isinstance(t, Sum):
            continue
        for w in _normal_in_order(m):
            rows = ev.term_rel(t, w)
            if not rows <= (ev.term_rel(t.left, w) & ev.term_rel(t.right, w)):
                return False, (w, t.left, t.right), (
                    f"R[{print_term(t)}]({w}) exceeds the intersection of its parts")
    return True, None, ""


def _cond_application(m, ev, formulas, terms, cs):
    for t in terms:
        if not isinstance(t, App):
            continue
        for w in _normal_in_order(m):
            rows = ev.term_rel(t, w)
            if not rows:
                continue
            for a in formulas:
                for b in formulas:
                    for hook in (Counterfactual, MatImp):
                        if not ev.holds(w, Just(t.left, hook(a, b))):
                            continue
                        if not ev.holds(w, Just(t.right, a)):
                            continue
                        stray = rows - ev.truthset(b)
                        if stray:
                            v = min(stray, key=m.state_index)
                            return False, (w, t, v), (
                                f"R[{print_term(t)}]({w}) reaches {v} although "
                                f"{print_term(t.left)} justifies the step from "
                                f"{print_formula(a)} to {print_formula(b)}")
    return True, None, ""


def _cond_chained_application(m, ev, formulas, terms, cs):
    normal = set(_normal_in_order(m))
    for t in terms:
        if not isinstance(t, App):
            continue
        for a in formulas:
            for b in formulas:
                f1 = Just(t.left, Counterfactual(a, b))
                f2 = Just(t.right, a)
                ts_b = ev.truthset(b)
                for w in _normal_in_order(m):
                    for v in ev.rel(f1, w):
                        if v not in normal:
                            continue
                        for u in ev.rel(f2, v):
                            if u not in normal:
                                continue
                            stray = ev.term_rel(t, u) - ts_b
                            if stray:
                                u2 = min(stray, key=m.state_index)
                                return False, (w, v, u, u2, t, a, b), (
                                    f"chained application through {print_term(t)} escapes "
                                    f"the consequent truth set at {u2}")
    return True, None, ""


def _cond_reflexive_terms(m, ev, formulas, terms, cs):
    for t in terms:
        for w in _normal_in_order(m):
            if w not in ev.term_rel(t, w):
                return False, (w, t), f"R[{print_term(t)}] is not reflexive at {w}"
    return True, None, ""


def _cond_checker(m, ev, formulas, terms, cs):
    for t in terms:
        if not isinstance(t, Bang):
            continue
        inner = t.inner
        for w in _normal_in_order(m):
            reach = ev.term_rel(inner, w)
            for v in ev.term_rel(t, w):
                for u in ev.term_rel(inner, v):
                    if u not in reach:
                        return False, (w, v, u, inner), (
                            f"R[{print_term(t)}] step to {v} then R[{print_term(inner)}] "
                            f"to {u} is not matched by R[{print_term(inner)}]({w})")
    return True, None, ""


def _cond_pair(m, ev, formulas, terms, cs):
    for t in terms:
        if not isinstance(t, Pair):
            continue
        for b in formulas:
            target = Counterfactual(t.antecedent, b)
            for w in _normal_in_order(m):
                if not ev.holds(w, Just(t.inner, b)):
                    continue
                for v in ev.term_rel(t, w):
                    if not ev.holds(v, target):
                        return False, (w, t, b, v), (
                            f"R[{print_term(t)}]({w}) reaches {v} where "
                            f"{print_formula(target)} fails")
    return True, None, ""


def _cond_rel_extensionality(m, ev, formulas, terms, cs):
    normal = m.normal
    normal_order = _normal_in_order(m)
    for a in formulas:
        for b in formulas:
            if a == b:
                continue
            if ev.truthset(a) & normal != ev.truthset(b) & normal:
                continue
            if any(ev.rel(a, w) != ev.rel(b, w) for w in normal_order):
                return False, (a, b), (
                    f"{print_formula(a)} and {print_formula(b)} agree on normal states "
                    f"but have different relations")
    return True, None, ""


# --- JSON documents ---------------------------------------------------------


def load_model(doc: dict) -> tuple[KripkeModel, Dialect]:
    """Build a model from its JSON document; returns the declared dialect too."""
    if "star" in doc or "ternary" in doc:
        raise ValueError("document describes a Routley model, not a relational one")
    dialect = Dialect(doc.get("dialect", "lpcplus"))
    states = tuple(doc["states"])
    m = KripkeModel(
        states=states,
        normal=frozenset(doc.get("normal", states)),
        valuation={w: frozenset(v) for w, v in doc.get("valuation", {}).items()},
        nonnormal_valuation={
            w: frozenset(parse_formula(s, dialect) for s in entries)
            for w, entries in doc.get("nonnormal_valuation", {}).items()},
        term_rels={
            parse_term(t, dialect): frozenset((a, b) for a, b in pairs)
            for t, pairs in doc.get("term_rels", {}).items()},
        formula_rel_overrides={
            parse_formula(s, dialect): frozenset((a, b) for a, b in pairs)
            for s, pairs in doc.get("formula_rels", {}).items()},
        formula_rel_default=RelScheme(doc.get("formula_rel_default", "truthset_normal")),
    )
    return m, dialect


def model_to_json(m: KripkeModel, dialect: Dialect) -> dict:
    idx = m.state_index

    def pairs(rel):
        return [list(p) for p in sorted(rel, key=lambda p: (idx(p[0]), idx(p[1])))]

    return {
        "dialect": dialect.value,
        "states": list(m.states),
        "normal": sorted(m.normal, key=idx),
        "valuation": {w: sorted(m.valuation.get(w, ())) for w in m.states if w in m.normal},
        "nonnormal_valuation": {
            w: sorted(print_formula(f) for f in m.nonnormal_valuation.get(w, ()))
            for w in m.states if w not in m.normal},
        "term_rels": {
            print_term(t): pairs(rel)
            for t, rel in sorted(m.term_rels.items(), key=lambda kv: term_key(kv[0]))},
        "formula_rels": {
            print_formula(f): pairs(rel)
            for f, rel in sorted(m.formula_rel_overrides.items(), key=lambda kv: formula_key(kv[0]))},
        "formula_rel_default": m.formula_rel_default.value,
    }
