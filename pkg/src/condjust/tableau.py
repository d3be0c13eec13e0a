"""Labelled tableau prover for the relevant conditional dialect.

Tableau nodes are signed formulas ``φ, +x`` / ``φ, -x``, conditional edges
``x -[φ]-> y``, evidence edges ``x -[t]-> y``, and ternary records
``r x y z``.  Labels are naturals with sharped twins (``1`` and ``1#``) that
stand for star images of each other.  Saturation is budgeted and fair: rule
instances fire FIFO within tiers (decomposition, then branching, then
normality, then cut), each at most once per branch, so a branch that
completes without closing is genuinely complete and induces a countermodel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .kripke_models import RelScheme, check_dialect_formula
from .routley_models import RoutleyModel, check_jrc_conditions, eval_jrc
from .syntax import (
    And, Atom, Dialect, Formula, Just, Neg, RelCf, RelImp, Sum, Term,
    print_formula, print_term,
)

__all__ = [
    "Label", "Signed", "FormulaEdge", "TermEdge", "Ternary", "NodeExpr",
    "Budget", "Branch", "Closed", "Open", "Exhausted", "ProofResult",
    "prove", "extract_model", "verify_result",
]


@dataclass(frozen=True, order=True)
class Label:
    index: int
    sharped: bool = False

    def bar(self) -> "Label":
        return Label(self.index, not self.sharped)

    def __str__(self) -> str:
        return f"{self.index}#" if self.sharped else str(self.index)


_ROOT = Label(0)


@dataclass(frozen=True)
class Signed:
    formula: Formula
    sign: bool
    label: Label

    def __str__(self) -> str:
        return f"{print_formula(self.formula)}, {'+' if self.sign else '-'}{self.label}"


@dataclass(frozen=True)
class FormulaEdge:
    src: Label
    antecedent: Formula
    dst: Label

    def __str__(self) -> str:
        return f"{self.src} -[{print_formula(self.antecedent)}]-> {self.dst}"


@dataclass(frozen=True)
class TermEdge:
    src: Label
    term: Term
    dst: Label

    def __str__(self) -> str:
        return f"{self.src} -[{print_term(self.term)}]-> {self.dst}"


@dataclass(frozen=True)
class Ternary:
    x: Label
    y: Label
    z: Label

    def __str__(self) -> str:
        return f"r {self.x} {self.y} {self.z}"


NodeExpr = Signed | FormulaEdge | TermEdge | Ternary


@dataclass(frozen=True)
class Budget:
    max_fresh_labels: int = 8
    max_steps: int = 2000

    def __post_init__(self):
        if self.max_fresh_labels < 1 or self.max_steps < 1:
            raise ValueError("budget must be positive")


class Branch:
    """One path of the tableau; copied when a branching rule fires."""

    def __init__(self):
        self.nodes: list[NodeExpr] = []
        self.node_set: set[NodeExpr] = set()
        self.node_line: dict[NodeExpr, int] = {}
        self.next_fresh = 1
        self.applied: set = set()
        self.agenda: list = []
        self.labels: dict[Label, None] = {}
        self.antecedents: dict[Formula, None] = {}
        self.entries: list[tuple[int, int, str]] = []
        self.depth = 0
        self.closed = False
        self.closure: tuple[int, int] | None = None
        self.blocked = False
        self.complete = False

    def copy(self) -> "Branch":
        twin = Branch.__new__(Branch)
        twin.nodes = list(self.nodes)
        twin.node_set = set(self.node_set)
        twin.node_line = dict(self.node_line)
        twin.next_fresh = self.next_fresh
        twin.applied = set(self.applied)
        twin.agenda = list(self.agenda)
        twin.labels = dict(self.labels)
        twin.antecedents = dict(self.antecedents)
        twin.entries = list(self.entries)
        twin.depth = self.depth
        twin.closed = self.closed
        twin.closure = self.closure
        twin.blocked = self.blocked
        twin.complete = self.complete
        return twin

    def text(self) -> str:
        return "\n".join("  " * depth + line for _, depth, line in self.entries)


@dataclass(frozen=True)
class Closed:
    tree: str
    steps: int


@dataclass(frozen=True)
class Open:
    branch: Branch
    extracted: RoutleyModel
    root_state: str


@dataclass(frozen=True)
class Exhausted:
    report: str


ProofResult = Closed | Open | Exhausted

# Scheduling tiers: decomposition rules run before branching ones, and the
# label-multiplying normality and cut rules go last so fresh labels settle
# before they fan out.
_TIERS = {
    "T&": 0, "T~": 0, "F~": 0, "F~>0": 0, "F~>": 0, "F:": 0, "F->": 0,
    "T~>": 0, "T:": 0, "sum": 0,
    "F&": 1, "T->": 1,
    "norm": 2,
    "cut": 3,
}
_BRANCHING = {"F&", "T->", "cut"}

_CLOSED, _EXHAUSTED, _OPEN = "closed", "exhausted", "open"


def _cond_antecedents(f: Formula):
    """Antecedents of every conditional subformula, in pre-order."""
    if isinstance(f, RelCf):
        yield f.left
    if isinstance(f, (Neg, Just)):
        yield from _cond_antecedents(f.inner)
    elif isinstance(f, (And, RelImp, RelCf)):
        yield from _cond_antecedents(f.left)
        yield from _cond_antecedents(f.right)


class _Prover:
    def __init__(self, premises, goal, budget: Budget):
        self.premises = tuple(premises)
        self.goal = goal
        self.budget = budget
        self.seq = 0
        self.steps = 0
        self.line_no = 0
        self.log: list[str] = []
        self.step_capped = False

    # -- trace -------------------------------------------------------------

    def _emit(self, branch: Branch, text: str, numbered=True) -> int:
        if numbered:
            self.line_no += 1
            line = f"{self.line_no}. {text}"
        else:
            line = text
        branch.entries.append((self.line_no, branch.depth, line))
        self.log.append("  " * branch.depth + line)
        return self.line_no

    # -- branch growth -----------------------------------------------------

    def add_node(self, branch: Branch, expr: NodeExpr, tag: str) -> bool:
        """Add expr if new; returns False when the branch just closed."""
        if expr in branch.node_set:
            return True
        branch.nodes.append(expr)
        branch.node_set.add(expr)
        line = self._emit(branch, f"{expr}  [{tag}]")
        branch.node_line[expr] = line
        self._enable(branch, expr)
        if isinstance(expr, Signed):
            twin = Signed(expr.formula, not expr.sign, expr.label)
            if twin in branch.node_set:
                pair = tuple(sorted((branch.node_line[twin], line)))
                branch.closed = True
                branch.closure = pair
                self._emit(branch, f"closed [{pair[0]}, {pair[1]}]", numbered=False)
                return False
        return True

    def _enqueue(self, branch: Branch, rule: str, key: tuple, data: tuple):
        if key in branch.applied:
            return
        branch.applied.add(key)
        self.seq += 1
        heapq.heappush(branch.agenda, (_TIERS[rule], self.seq, rule, data))

    def _register_label(self, branch: Branch, x: Label):
        if x in branch.labels:
            return
        branch.labels[x] = None
        self._enqueue(branch, "norm", ("norm", x), (x,))
        for ante in branch.antecedents:
            self._enqueue(branch, "cut", ("cut", ante, x), (ante, x))

    def _register_antecedent(self, branch: Branch, ante: Formula):
        if ante in branch.antecedents:
            return
        branch.antecedents[ante] = None
        for x in branch.labels:
            self._enqueue(branch, "cut", ("cut", ante, x), (ante, x))

    def _enable(self, branch: Branch, expr: NodeExpr):
        """Queue every rule instance the new expression participates in."""
        if isinstance(expr, Signed):
            f, x = expr.formula, expr.label
            self._register_label(branch, x)
            for ante in _cond_antecedents(f):
                self._register_antecedent(branch, ante)
            if expr.sign:
                if isinstance(f, And):
                    self._enqueue(branch, "T&", ("T&", expr), (expr,))
                elif isinstance(f, Neg):
                    self._enqueue(branch, "T~", ("T~", expr), (expr,))
                elif isinstance(f, RelImp):
                    for other in branch.nodes:
                        if isinstance(other, Ternary) and other.x == x:
                            self._enqueue(branch, "T->", ("T->", expr, other),
                                          (expr, other))
                elif isinstance(f, RelCf):
                    for other in branch.nodes:
                        if (isinstance(other, FormulaEdge) and other.src == x
                                and other.antecedent == f.left):
                            self._enqueue(branch, "T~>", ("T~>", expr, other),
                                          (expr, other))
                elif isinstance(f, Just):
                    for other in branch.nodes:
                        if (isinstance(other, TermEdge) and other.src == x
                                and other.term == f.term):
                            self._enqueue(branch, "T:", ("T:", expr, other),
                                          (expr, other))
            else:
                if isinstance(f, Neg):
                    self._enqueue(branch, "F~", ("F~", expr), (expr,))
                elif isinstance(f, And):
                    self._enqueue(branch, "F&", ("F&", expr), (expr,))
                elif isinstance(f, RelImp):
                    self._enqueue(branch, "F->", ("F->", expr), (expr,))
                elif isinstance(f, RelCf):
                    rule = "F~>0" if x == _ROOT else "F~>"
                    self._enqueue(branch, rule, (rule, expr), (expr,))
                elif isinstance(f, Just):
                    self._enqueue(branch, "F:", ("F:", expr), (expr,))
        elif isinstance(expr, FormulaEdge):
            self._register_label(branch, expr.src)
            self._register_label(branch, expr.dst)
            for other in branch.nodes:
                if (isinstance(other, Signed) and other.sign
                        and isinstance(other.formula, RelCf)
                        and other.label == expr.src
                        and other.formula.left == expr.antecedent):
                    self._enqueue(branch, "T~>", ("T~>", other, expr), (other, expr))
        elif isinstance(expr, TermEdge):
            self._register_label(branch, expr.src)
            self._register_label(branch, expr.dst)
            if isinstance(expr.term, Sum):
                self._enqueue(branch, "sum", ("sum", expr), (expr,))
            for other in branch.nodes:
                if (isinstance(other, Signed) and other.sign
                        and isinstance(other.formula, Just)
                        and other.label == expr.src
                        and other.formula.term == expr.term):
                    self._enqueue(branch, "T:", ("T:", other, expr), (other, expr))
        else:
            for lab in (expr.x, expr.y, expr.z):
                self._register_label(branch, lab)
            for other in branch.nodes:
                if (isinstance(other, Signed) and other.sign
                        and isinstance(other.formula, RelImp)
                        and other.label == expr.x):
                    self._enqueue(branch, "T->", ("T->", other, expr), (other, expr))

    # -- rule firing ---------------------------------------------------------

    def _cite(self, branch: Branch, rule: str, data: tuple) -> str:
        sources = [branch.node_line[d] for d in data if d in branch.node_line]
        return rule if not sources else rule + " " + " ".join(map(str, sources))

    def _fresh(self, branch: Branch, count: int) -> list[Label] | None:
        if branch.next_fresh + count - 1 >= self.budget.max_fresh_labels:
            branch.blocked = True
            return None
        out = [Label(branch.next_fresh + k) for k in range(count)]
        branch.next_fresh += count
        return out

    def _conclusions(self, branch: Branch, rule: str, data: tuple):
        """Nodes a non-branching instance adds, or None when fresh-blocked."""
        if rule == "T&":
            (s,) = data
            return [Signed(s.formula.left, True, s.label),
                    Signed(s.formula.right, True, s.label)]
        if rule == "T~":
            (s,) = data
            return [Signed(s.formula.inner, False, s.label.bar())]
        if rule == "F~":
            (s,) = data
            return [Signed(s.formula.inner, True, s.label.bar())]
        if rule == "T~>":
            s, edge = data
            return [Signed(s.formula.right, True, edge.dst)]
        if rule == "T:":
            s, edge = data
            return [Signed(s.formula.inner, True, edge.dst)]
        if rule == "sum":
            (edge,) = data
            return [TermEdge(edge.src, edge.term.left, edge.dst),
                    TermEdge(edge.src, edge.term.right, edge.dst)]
        if rule == "norm":
            (x,) = data
            return [Ternary(_ROOT, x, x)]
        if rule == "F~>0":
            (s,) = data
            fresh = self._fresh(branch, 1)
            if fresh is None:
                return None
            (j,) = fresh
            return [FormulaEdge(_ROOT, s.formula.left, j),
                    Signed(s.formula.left, True, j),
                    Signed(s.formula.right, False, j)]
        if rule == "F~>":
            (s,) = data
            fresh = self._fresh(branch, 1)
            if fresh is None:
                return None
            (j,) = fresh
            return [FormulaEdge(s.label, s.formula.left, j),
                    Signed(s.formula.right, False, j)]
        if rule == "F:":
            (s,) = data
            fresh = self._fresh(branch, 1)
            if fresh is None:
                return None
            (j,) = fresh
            return [TermEdge(s.label, s.formula.term, j),
                    Signed(s.formula.inner, False, j)]
        if rule == "F->":
            (s,) = data
            if s.label == _ROOT:
                fresh = self._fresh(branch, 1)
                if fresh is None:
                    return None
                j = k = fresh[0]
            else:
                fresh = self._fresh(branch, 2)
                if fresh is None:
                    return None
                j, k = fresh
            return [Ternary(s.label, j, k),
                    Signed(s.formula.left, True, j),
                    Signed(s.formula.right, False, k)]
        raise AssertionError(rule)

    def _alternatives(self, rule: str, data: tuple):
        """Node lists for a branching instance; the minus side comes first."""
        if rule == "F&":
            (s,) = data
            return [[Signed(s.formula.left, False, s.label)],
                    [Signed(s.formula.right, False, s.label)]]
        if rule == "T->":
            s, tern = data
            return [[Signed(s.formula.left, False, tern.y)],
                    [Signed(s.formula.right, True, tern.z)]]
        if rule == "cut":
            ante, x = data
            return [[Signed(ante, False, x)],
                    [Signed(ante, True, x), FormulaEdge(x, ante, x)]]
        raise AssertionError(rule)

    # -- search ----------------------------------------------------------------

    def saturate_linear(self, branch: Branch):
        """Fire non-branching work; stop at closure, completion, or a branch."""
        while True:
            if branch.closed:
                return _CLOSED
            if not branch.agenda:
                if branch.blocked:
                    self._emit(branch, "exhausted", numbered=False)
                    return _EXHAUSTED
                branch.complete = True
                self._emit(branch, "open", numbered=False)
                return _OPEN
            if self.steps >= self.budget.max_steps:
                self.step_capped = True
                self._emit(branch, "exhausted", numbered=False)
                return _EXHAUSTED
            _, _, rule, data = heapq.heappop(branch.agenda)
            if rule in _BRANCHING:
                self.steps += 1
                return (rule, data)
            nodes = self._conclusions(branch, rule, data)
            if nodes is None:
                continue
            self.steps += 1
            tag = self._cite(branch, rule, data)
            for expr in nodes:
                if not self.add_node(branch, expr, tag):
                    break

    def search(self, root: Branch):
        any_exhausted = False
        pending: list[tuple[Branch, list | None, str]] = [(root, None, "")]
        while pending:
            if self.step_capped:
                return _EXHAUSTED
            branch, alt, tag = pending.pop()
            if alt is not None:
                branch = branch.copy()
                branch.depth += 1
                alive = True
                for expr in alt:
                    if not self.add_node(branch, expr, tag):
                        alive = False
                        break
                if not alive:
                    continue
            outcome = self.saturate_linear(branch)
            if outcome == _OPEN:
                return branch
            if outcome == _CLOSED:
                continue
            if outcome == _EXHAUSTED:
                any_exhausted = True
                continue
            rule, data = outcome
            tag = self._cite(branch, rule, data)
            for nodes in reversed(self._alternatives(rule, data)):
                pending.append((branch, nodes, tag))
        return _EXHAUSTED if any_exhausted else _CLOSED

    def run(self) -> ProofResult:
        root = Branch()
        for f in self.premises:
            self.add_node(root, Signed(f, True, _ROOT), "premise")
        alive = self.add_node(root, Signed(self.goal, False, _ROOT), "goal")
        outcome = _CLOSED if not alive else self.search(root)
        if isinstance(outcome, Branch):
            model, root_state = extract_model(outcome)
            return Open(outcome, model, root_state)
        if outcome == _CLOSED:
            return Closed("\n".join(self.log), self.steps)
        why = ("step budget of %d reached" % self.budget.max_steps
               if self.step_capped
               else "fresh-label budget of %d blocked a branch"
               % self.budget.max_fresh_labels)
        return Exhausted(f"{why} after {self.steps} fired instances")


def prove(premises, goal: Formula, budget: Budget | dict | None = None) -> ProofResult:
    """Build a tableau for the sequent; never answers wrongly under budget."""
    if budget is None:
        budget = Budget()
    elif not isinstance(budget, Budget):
        budget = Budget(**budget)
    for f in (*premises, goal):
        check_dialect_formula(f, Dialect.JRC)
    return _Prover(premises, goal, budget).run()


def _state_name(x: Label) -> str:
    return f"w{x.index}s" if x.sharped else f"w{x.index}"


def extract_model(branch: Branch) -> tuple[RoutleyModel, str]:
    """Read the induced countermodel off an open complete branch."""
    if not branch.complete:
        raise ValueError("countermodels come only from complete open branches")
    labels = sorted(branch.labels)
    name = {x: _state_name(x) for x in labels}
    occurs = set(labels)
    star = {name[x]: name[x.bar()] if x.bar() in occurs else name[x] for x in labels}
    ternary = set()
    term_rels: dict[Term, set] = {}
    overrides: dict[Formula, set] = {f: set() for f in branch.antecedents}
    valuation: dict[str, set] = {name[x]: set() for x in labels}
    for expr in branch.nodes:
        if isinstance(expr, Ternary):
            ternary.add((name[expr.x], name[expr.y], name[expr.z]))
        elif isinstance(expr, TermEdge):
            term_rels.setdefault(expr.term, set()).add((name[expr.src], name[expr.dst]))
        elif isinstance(expr, FormulaEdge):
            overrides[expr.antecedent].add((name[expr.src], name[expr.dst]))
        elif expr.sign and isinstance(expr.formula, Atom):
            valuation[name[expr.label]].add(expr.formula.name)
    model = RoutleyModel(
        states=tuple(name[x] for x in labels),
        normal=frozenset({name[_ROOT]}),
        star=star,
        ternary=frozenset(ternary),
        valuation={w: frozenset(v) for w, v in valuation.items()},
        term_rels={t: frozenset(v) for t, v in term_rels.items()},
        formula_rel_overrides={f: frozenset(v) for f, v in overrides.items()},
        formula_rel_default=RelScheme.TruthsetAll,
    )
    return model, name[_ROOT]


def verify_result(r: ProofResult, premises, goal: Formula, size_bound: int = 3) -> bool:
    """Check a verdict against the semantics; Exhausted is vacuously fine."""
    if isinstance(r, Exhausted):
        return True
    if isinstance(r, Open):
        m = r.extracted
        if not check_jrc_conditions(m, (*premises, goal)).ok:
            return False
        if not all(eval_jrc(m, r.root_state, f) for f in premises):
            return False
        return not eval_jrc(m, r.root_state, goal)
    if isinstance(r, Closed):
        from .falsifier import find_countermodel

        return find_countermodel(premises, goal, Dialect.JRC, size_bound) is None
    raise TypeError(f"not a proof result: {r!r}")
