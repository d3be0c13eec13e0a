"""Bounded countermodel search for sequents in every dialect.

Models are enumerated up to a state-count bound in a fixed canonical order:
fewer states first, then ascending over the membership bitmasks. Relational
models are enumerated directly (valuations, term relations, and relation
overrides for the conditional antecedents that occur in the sequent) and
filtered through the dialect's frame conditions. For the relevant dialect
the walk runs over truth assignments to the conditional, implication, and
justification subformulas instead; accessibility rows are then realized
maximally, which succeeds exactly when some model realizes the assignment,
and every hit is re-verified by the evaluator before it is returned.

The search is exponential in the sequent's vocabulary and meant for the
small bounds where countermodels are legible. It doubles as the independent
oracle the tableau prover is cross-checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kripke_models import (
    KripkeModel,
    RelScheme,
    check_conditions,
    check_dialect_formula,
    eval as kripke_eval,
    profile_for,
)
from .routley_models import RoutleyModel, check_jrc_conditions, eval_jrc
from .syntax import (
    And,
    Atom,
    Constant,
    Counterfactual,
    Dialect,
    Formula,
    Just,
    Neg,
    RelCf,
    RelImp,
    Sum,
    Term,
    Variable,
    atoms,
    closure,
    formula_key,
    subterms,
    term_key,
)
from .tableau import Closed, Exhausted, Open, ProofResult, prove, verify_result

__all__ = [
    "SearchSignature",
    "CrossCheckReport",
    "find_countermodel",
    "cross_check",
    "iter_kripke_models",
    "sample_models",
]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SearchSignature:
    """Everything the enumeration must cover for one sequent."""

    dialect: Dialect
    bound: int
    atoms: tuple[str, ...]
    terms: tuple[Term, ...]
    antecedents: tuple[Formula, ...]
    universe: tuple[Formula, ...]

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("state bound must be at least 1")

    @classmethod
    def for_sequent(cls, premises, goal: Formula, dialect: Dialect,
                    bound: int) -> "SearchSignature":
        seq = (*premises, goal)
        for f in seq:
            check_dialect_formula(f, dialect)
        universe = tuple(sorted(closure(seq), key=formula_key))
        names = tuple(sorted({a for f in seq for a in atoms(f)}))
        term_set: set[Term] = set()
        for f in universe:
            if isinstance(f, Just):
                term_set |= subterms(f.term)
        hook = RelCf if dialect is Dialect.JRC else Counterfactual
        antecedents = tuple(dict.fromkeys(
            f.left for f in universe if isinstance(f, hook)))
        return cls(dialect, bound, names,
                   tuple(sorted(term_set, key=term_key)), antecedents, universe)


# --- relational enumeration ----------------------------------------------


def iter_kripke_models(sig: SearchSignature):
    """Every relational model over the signature, unfiltered, smallest first.

    Membership slots are ordered valuation, non-normal valuation, term
    relations, relation overrides; ascending integers over those bits give
    the canonical order.
    """
    for k in range(1, sig.bound + 1):
        states = tuple(f"w{i}" for i in range(k))
        for n in range(1, k + 1):
            normal = states[:n]
            rest = states[n:]
            slots: list[tuple] = []
            slots += [("val", a, w) for a in sig.atoms for w in normal]
            slots += [("nn", f, w) for f in sig.universe for w in rest]
            slots += [("term", t, a, b)
                      for t in sig.terms for a in states for b in states]
            slots += [("ov", f, a, b)
                      for f in sig.antecedents for a in normal for b in normal]
            for x in range(1 << len(slots)):
                valuation: dict[str, set[str]] = {w: set() for w in normal}
                nn_val: dict[str, set[Formula]] = {w: set() for w in rest}
                term_rels: dict[Term, set] = {t: set() for t in sig.terms}
                overrides: dict[Formula, set] = {f: set() for f in sig.antecedents}
                for i, slot in enumerate(slots):
                    if not x >> i & 1:
                        continue
                    kind = slot[0]
                    if kind == "val":
                        valuation[slot[2]].add(slot[1])
                    elif kind == "nn":
                        nn_val[slot[2]].add(slot[1])
                    elif kind == "term":
                        term_rels[slot[1]].add((slot[2], slot[3]))
                    else:
                        overrides[slot[1]].add((slot[2], slot[3]))
                yield KripkeModel(states, frozenset(normal), valuation, nn_val,
                                  term_rels, overrides, RelScheme.TruthsetNormal)


def _find_kripke(premises, goal: Formula, dialect: Dialect,
                 bound: int) -> tuple[KripkeModel, str] | None:
    sig = SearchSignature.for_sequent(premises, goal, dialect, bound)
    profile = profile_for(dialect)
    seq = [*premises, goal]
    for model in iter_kripke_models(sig):
        witness = None
        for w in model.states:
            if w not in model.normal:
                continue
            if all(kripke_eval(model, w, p) for p in premises) \
                    and not kripke_eval(model, w, goal):
                witness = w
                break
        if witness is None:
            continue
        if not check_conditions(model, profile, seq).ok:
            continue
        return model, witness
    return None


# --- relevant-dialect enumeration -----------------------------------------


def _involutions(k: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def build(mapping: dict[int, int]):
        free = [i for i in range(k) if i not in mapping]
        if not free:
            out.append(tuple(mapping[i] for i in range(k)))
            return
        i = free[0]
        for j in free:
            build({**mapping, i: j, j: i})

    build({})
    return sorted(out)


def _star_mask(mask: int, sigma: tuple[int, ...]) -> int:
    # states whose star image falls outside the mask
    out = 0
    for w, img in enumerate(sigma):
        if not mask >> img & 1:
            out |= 1 << w
    return out


def _bit_states(mask: int, k: int) -> list[int]:
    return [i for i in range(k) if mask >> i & 1]


class _RoutleySearch:
    def __init__(self, premises, goal: Formula):
        seq = (*premises, goal)
        self.premises = premises
        self.goal = goal
        self.universe = sorted(closure(seq), key=formula_key)
        self.atom_names = sorted({a for f in seq for a in atoms(f)})
        self.index = {f: i for i, f in enumerate(self.universe)}
        self.modal = [f for f in self.universe
                      if isinstance(f, (RelImp, RelCf, Just))]
        midx = {f: i for i, f in enumerate(self.modal)}
        plan: list[tuple] = []
        for f in self.universe:
            if isinstance(f, Atom):
                plan.append(("atom", self.atom_names.index(f.name)))
            elif isinstance(f, Neg):
                plan.append(("neg", self.index[f.inner]))
            elif isinstance(f, And):
                plan.append(("and", self.index[f.left], self.index[f.right]))
            else:
                plan.append(("modal", midx[f]))
        self.plan = plan
        cf_nodes = [f for f in self.modal if isinstance(f, RelCf)]
        self.antecedents = list(dict.fromkeys(f.left for f in cf_nodes))
        self.cf_by_ante = {a: [f for f in cf_nodes if f.left == a]
                           for a in self.antecedents}
        self.imps = [f for f in self.modal if isinstance(f, RelImp)]
        just_nodes = [f for f in self.modal if isinstance(f, Just)]
        term_set: set[Term] = set()
        for f in just_nodes:
            term_set |= subterms(f.term)
        self.terms = sorted(term_set, key=term_key)
        self.just_by_term = {t: [f for f in just_nodes if f.term == t]
                             for t in self.terms}

    def run(self, bound: int) -> tuple[RoutleyModel, str] | None:
        for k in range(1, bound + 1):
            found = self._run_size(k)
            if found is not None:
                return found
        return None

    def _run_size(self, k: int) -> tuple[RoutleyModel, str] | None:
        full = (1 << k) - 1
        modal_bits = len(self.modal) * k
        atom_bits = len(self.atom_names) * k
        for sigma in _involutions(k):
            star_tab = np.array([_star_mask(m, sigma) for m in range(1 << k)],
                                dtype=np.int64)
            for assign in range(1 << atom_bits):
                amasks = [assign >> i * k & full
                          for i in range(len(self.atom_names))]
                for base in range(0, 1 << modal_bits, _CHUNK):
                    stop = min(base + _CHUNK, 1 << modal_bits)
                    found = self._sweep_chunk(k, full, sigma, star_tab,
                                              amasks, base, stop)
                    if found is not None:
                        return found
        return None

    def _sweep_chunk(self, k, full, sigma, star_tab, amasks, base, stop):
        codes = np.arange(base, stop, dtype=np.int64)
        vals: list = []
        for ins in self.plan:
            if ins[0] == "atom":
                vals.append(amasks[ins[1]])
            elif ins[0] == "neg":
                v = vals[ins[1]]
                vals.append(star_tab[v] if isinstance(v, np.ndarray)
                            else int(star_tab[v]))
            elif ins[0] == "and":
                vals.append(vals[ins[1]] & vals[ins[2]])
            else:
                vals.append(codes >> ins[1] * k & full)
        ok = np.ones(len(codes), dtype=bool)
        for p in self.premises:
            ok &= np.asarray(vals[self.index[p]] & 1, dtype=bool)
        ok &= ~np.asarray(vals[self.index[self.goal]] & 1, dtype=bool)
        # implication truth at the normal state is forced by the diagonal
        for f in self.imps:
            want = np.asarray(
                (vals[self.index[f.left]] & ~vals[self.index[f.right]] & full) == 0)
            have = np.asarray((vals[self.index[f]] & 1) == 1)
            ok &= ~(want ^ have)
        for j in np.flatnonzero(ok):
            masks = {f: int(v[j]) if isinstance(v, np.ndarray) else v
                     for f, v in zip(self.universe, vals)}
            model = self._realize(k, full, sigma, amasks, masks)
            if model is None:
                continue
            seq = [*self.premises, self.goal]
            if not check_jrc_conditions(model, seq).ok:
                continue
            if any(not eval_jrc(model, "w0", p) for p in self.premises):
                continue
            if eval_jrc(model, "w0", self.goal):
                continue
            return model, "w0"
        return None

    def _realize(self, k, full, sigma, amasks, masks) -> RoutleyModel | None:
        # conditional rows: maximal under antecedent truth at the normal
        # state, the true conditionals' consequents, and self-support
        overrides: dict[Formula, set] = {}
        for ante in self.antecedents:
            m_ante = masks[ante]
            pairs = set()
            for w in range(k):
                row = full & (m_ante if w == 0 else full)
                for nd in self.cf_by_ante[ante]:
                    if masks[nd] >> w & 1:
                        row &= masks[nd.right]
                if m_ante >> w & 1 and not row >> w & 1:
                    return None
                for nd in self.cf_by_ante[ante]:
                    if not masks[nd] >> w & 1 and not row & ~masks[nd.right] & full:
                        return None
                pairs |= {(f"w{w}", f"w{v}") for v in _bit_states(row, k)}
            overrides[ante] = pairs
        ternary = {("w0", f"w{v}", f"w{v}") for v in range(k)}
        if self.imps:
            for x in range(1, k):
                slice_pairs = [
                    (y, z) for y in range(k) for z in range(k)
                    if all(not masks[nd] >> x & 1
                           or not masks[nd.left] >> y & 1
                           or masks[nd.right] >> z & 1
                           for nd in self.imps)]
                for nd in self.imps:
                    if masks[nd] >> x & 1:
                        continue
                    if not any(masks[nd.left] >> y & 1
                               and not masks[nd.right] >> z & 1
                               for y, z in slice_pairs):
                        return None
                ternary |= {(f"w{x}", f"w{y}", f"w{z}") for y, z in slice_pairs}
        rows_by_term: dict[Term, list[int]] = {}
        for t in self.terms:
            rows = []
            for w in range(k):
                row = full
                if isinstance(t, Sum):
                    row &= rows_by_term[t.left][w] & rows_by_term[t.right][w]
                for nd in self.just_by_term[t]:
                    if masks[nd] >> w & 1:
                        row &= masks[nd.inner]
                for nd in self.just_by_term[t]:
                    if not masks[nd] >> w & 1 and not row & ~masks[nd.inner] & full:
                        return None
                rows.append(row)
            rows_by_term[t] = rows
        term_rels = {
            t: {(f"w{a}", f"w{b}")
                for a in range(k) for b in _bit_states(rows[a], k)}
            for t, rows in rows_by_term.items()}
        valuation = {
            f"w{i}": {name for name, am in zip(self.atom_names, amasks)
                      if am >> i & 1}
            for i in range(k)}
        star = {f"w{i}": f"w{sigma[i]}" for i in range(k)}
        return RoutleyModel(
            states=tuple(f"w{i}" for i in range(k)),
            normal=frozenset({"w0"}),
            star=star,
            ternary=frozenset(ternary),
            valuation=valuation,
            term_rels=term_rels,
            formula_rel_overrides=overrides,
            formula_rel_default=RelScheme.TruthsetAll)


# --- entry points ----------------------------------------------------------


def find_countermodel(premises, goal: Formula, profile: Dialect,
                      bound: int = 3):
    """First condition-passing model of at most `bound` states that makes
    the premises true and the goal false at a normal state, or None."""
    if not isinstance(profile, Dialect):
        raise TypeError("profile must be a Dialect")
    if bound < 1:
        raise ValueError("state bound must be at least 1")
    premises = tuple(premises)
    if profile is Dialect.JRC:
        for f in (*premises, goal):
            check_dialect_formula(f, profile)
        return _RoutleySearch(premises, goal).run(bound)
    return _find_kripke(premises, goal, profile, bound)


@dataclass(frozen=True)
class CrossCheckReport:
    """prove and find_countermodel run side by side on one sequent."""

    proof: ProofResult
    countermodel: tuple[RoutleyModel, str] | None
    verdict: str  # "agree" | "contradiction" | "inconclusive"
    detail: str

    @property
    def contradiction(self) -> bool:
        return self.verdict == "contradiction"


def cross_check(premises, goal: Formula, budget=None,
                bound: int = 3) -> CrossCheckReport:
    """Pit the tableau against bounded enumeration on a relevant sequent.

    A contradiction means a genuine bug: a closed proof next to a verified
    countermodel, or an open branch whose extracted model does not check
    out. An exhausted proof with no bounded countermodel decides nothing.
    """
    premises = tuple(premises)
    proof = prove(premises, goal, budget)
    found = find_countermodel(premises, goal, Dialect.JRC, bound)
    if isinstance(proof, Closed):
        if found is not None:
            return CrossCheckReport(
                proof, found, "contradiction",
                f"proof closed but a countermodel exists within {bound} states")
        return CrossCheckReport(
            proof, None, "agree",
            f"proof closed and no countermodel exists within {bound} states")
    if isinstance(proof, Open):
        if not verify_result(proof, premises, goal):
            return CrossCheckReport(
                proof, found, "contradiction",
                "open branch extraction failed verification")
        if found is not None:
            return CrossCheckReport(
                proof, found, "agree",
                "open branch verified; enumeration confirms a countermodel")
        return CrossCheckReport(
            proof, None, "agree",
            f"open branch verified; no countermodel within {bound} states")
    assert isinstance(proof, Exhausted)
    if found is not None:
        return CrossCheckReport(
            proof, found, "agree",
            "proof budget ran out but enumeration found a countermodel")
    return CrossCheckReport(
        proof, None, "inconclusive",
        f"proof budget ran out and no countermodel within {bound} states")


# --- random condition-passing models ---------------------------------------


def sample_models(dialect: Dialect, atom_names, terms, count: int, rng,
                  universe=(), size_bound: int = 3) -> list[KripkeModel]:
    """Random relational models built to satisfy the dialect's conditions.

    Term rows always contain the diagonal, compound term rows are exactly
    the diagonal, and formula relations follow the normal-truthset default,
    which settles every frame condition structurally. The internalization
    and chained-application dialects keep a single normal state; their
    pairing and chained-application conditions need it. Non-normal states
    draw their literal memberships from the universe's subformulas.
    """
    profile_for(dialect)  # reject dialects without a Kripke profile
    single_normal = dialect in (Dialect.LPCint, Dialect.LPCprime)
    all_terms = sorted({s for t in terms for s in subterms(t)}, key=term_key)
    pool = sorted(closure(universe), key=formula_key)
    out: list[KripkeModel] = []
    for _ in range(count):
        k = rng.randint(1, size_bound)
        states = tuple(f"w{i}" for i in range(k))
        n = 1 if single_normal else rng.randint(1, k)
        valuation = {w: {a for a in atom_names if rng.random() < 0.5}
                     for w in states[:n]}
        nn_val = {w: {f for f in pool if rng.random() < 0.2}
                  for w in states[n:]}
        term_rels: dict[Term, set] = {}
        for t in all_terms:
            pairs = {(w, w) for w in states}
            if isinstance(t, (Variable, Constant)):
                pairs |= {(a, b) for a in states for b in states
                          if a != b and rng.random() < 0.3}
            term_rels[t] = pairs
        out.append(KripkeModel(states, frozenset(states[:n]), valuation,
                               nn_val, term_rels, {},
                               RelScheme.TruthsetNormal))
    return out
