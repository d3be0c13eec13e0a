"""Syntax for the conditional justification logic family.

Two language families share one AST: the counterfactual dialects (material
implication, counterfactual conditional, justification terms built from
constants, variables, application, sum, proof checker and pair, plus an S5 box
in dialect L) and the relevant dialect JRC (relevant implication and
conditional, terms restricted to variables and sums). Derived connectives
(or, biconditionals, fusion, truth constants) are expanded at parse time, so
trees only ever contain the primitive constructors below.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

__all__ = [
    "Dialect",
    "Constant", "Variable", "App", "Sum", "Bang", "Pair", "Term",
    "Atom", "Neg", "And", "MatImp", "Counterfactual", "RelImp", "RelCf",
    "Just", "Box", "Formula",
    "ParseError", "DialectError",
    "parse_formula", "parse_term", "print_formula", "print_term",
    "subformulas", "atoms", "terms_of", "subterms",
    "node_count", "formula_key", "term_key", "closure",
]


class Dialect(enum.Enum):
    """Named logics sharing the grammar, each enabling a slice of it."""

    LPCplus = "lpcplus"
    LPCint = "lpcint"
    LPCprime = "lpcprime"
    LPCKplus = "lpckplus"
    J4Cplus = "j4cplus"
    JCplus = "jcplus"
    L = "l"
    JRC = "jrc"


class _TermNode:
    def __repr__(self) -> str:
        return print_term(self)


class _FormulaNode:
    def __repr__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Constant(_TermNode):
    name: str


@dataclass(frozen=True, repr=False)
class Variable(_TermNode):
    name: str


@dataclass(frozen=True, repr=False)
class App(_TermNode):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Sum(_TermNode):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Bang(_TermNode):
    inner: Term


@dataclass(frozen=True, repr=False)
class Pair(_TermNode):
    inner: Term
    antecedent: Formula


Term = Constant | Variable | App | Sum | Bang | Pair


@dataclass(frozen=True, repr=False)
class Atom(_FormulaNode):
    name: str


@dataclass(frozen=True, repr=False)
class Neg(_FormulaNode):
    inner: Formula


@dataclass(frozen=True, repr=False)
class And(_FormulaNode):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class MatImp(_FormulaNode):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Counterfactual(_FormulaNode):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class RelImp(_FormulaNode):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class RelCf(_FormulaNode):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Just(_FormulaNode):
    term: Term
    inner: Formula


@dataclass(frozen=True, repr=False)
class Box(_FormulaNode):
    inner: Formula


Formula = Atom | Neg | And | MatImp | Counterfactual | RelImp | RelCf | Just | Box

_CONDITIONALS = (MatImp, Counterfactual, RelImp, RelCf)


class ParseError(ValueError):
    """Raised on malformed input; carries the offset where parsing failed."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class DialectError(ParseError):
    """A construct that exists in the grammar but not in the chosen dialect."""


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<op><=>|~>|->|=>|==|\[\]|[~&|@>:+.!()<,])
      | (?P<ident>[a-z][a-z0-9_]*)
    """,
    re.VERBOSE,
)

_RESERVED_TERM_VARS = re.compile(r"[xyz][0-9]*$")
_CONSTANT_NAME = re.compile(r"c([0-9]*|_[a-z0-9_]+)$")


@dataclass(frozen=True)
class _Token:
    kind: str  # "op", "ident" or "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        if m.lastgroup != "ws":
            out.append(_Token(m.lastgroup, m.group(), i))
        i = m.end()
    out.append(_Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, dialect: Dialect):
        self.tokens = _tokenize(text)
        self.i = 0
        self.dialect = dialect

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.tokens[self.i]
        return tok.kind == "op" and tok.text == text

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.next()

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.pos)

    def need_dialect(self, ok: bool, what: str) -> None:
        if not ok:
            tok = self.peek()
            raise DialectError(f"{what} not available in dialect {self.dialect.value}", tok.pos)

    # --- formulas -----------------------------------------------------

    def formula(self) -> Formula:
        left = self.cond()
        while self.at("==") or self.at("<=>"):
            op = self.peek().text
            if op == "==":
                self.need_dialect(self.dialect is not Dialect.JRC, "material biconditional")
            self.next()
            right = self.cond()
            if op == "==":
                left = And(MatImp(left, right), MatImp(right, left))
            elif self.dialect is Dialect.JRC:
                left = And(RelCf(left, right), RelCf(right, left))
            else:
                left = And(Counterfactual(left, right), Counterfactual(right, left))
        return left

    def cond(self) -> Formula:
        left = self.disj()
        for op, cls in (("=>", MatImp), (">", Counterfactual), ("->", RelImp), ("~>", RelCf)):
            if self.at(op):
                jrc_only = cls in (RelImp, RelCf)
                self.need_dialect((self.dialect is Dialect.JRC) == jrc_only, f"{op!r}")
                self.next()
                return cls(left, self.cond())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("|") or self.at("@"):
            op = self.next()
            right = self.conj()
            if op.text == "@":
                if self.dialect is not Dialect.JRC:
                    raise DialectError(f"fusion not available in dialect {self.dialect.value}", op.pos)
                left = Neg(RelImp(left, Neg(right)))
            else:
                left = Neg(And(Neg(left), Neg(right)))
        return left

    def conj(self) -> Formula:
        left = self.prefix()
        while self.at("&"):
            self.next()
            left = And(left, self.prefix())
        return left

    def prefix(self) -> Formula:
        tok = self.peek()
        if self.at("~"):
            self.next()
            return Neg(self.prefix())
        if self.at("[]"):
            self.need_dialect(self.dialect is Dialect.L, "box")
            self.next()
            return Box(self.prefix())
        if self.at("!") or self.at("<"):
            return self.justified()
        if self.at("("):
            # A parenthesis can open a compound term (`(x+y):p`) or a
            # subformula; commit to the term reading only if ':' follows.
            mark = self.i
            try:
                term = self.term()
                self.expect(":")
            except ParseError:
                self.i = mark
                self.next()
                inner = self.formula()
                self.expect(")")
                return inner
            return Just(term, self.prefix())
        if tok.kind == "ident":
            if tok.text in ("false", "true"):
                self.next()
                bot = And(Atom("p0"), Neg(Atom("p0")))
                return bot if tok.text == "false" else Neg(bot)
            after = self.tokens[self.i + 1]
            if after.kind == "op" and after.text in (":", "+", "."):
                return self.justified()
            if _RESERVED_TERM_VARS.match(tok.text):
                raise ParseError(f"{tok.text!r} is reserved for justification terms", tok.pos)
            if _CONSTANT_NAME.match(tok.text):
                raise ParseError(f"constant {tok.text!r} cannot be used as an atom", tok.pos)
            self.next()
            return Atom(tok.text)
        self.fail(f"expected a formula, found {tok.text or 'end of input'!r}")

    def justified(self) -> Formula:
        term = self.term()
        self.expect(":")
        return Just(term, self.prefix())

    # --- terms --------------------------------------------------------

    def term(self) -> Term:
        left = self.term_app()
        while self.at("+"):
            self.next()
            left = Sum(left, self.term_app())
        return left

    def term_app(self) -> Term:
        left = self.term_unary()
        while self.at("."):
            self.need_dialect(self.dialect is not Dialect.JRC, "term application")
            self.next()
            left = App(left, self.term_unary())
        return left

    def term_unary(self) -> Term:
        tok = self.peek()
        if self.at("!"):
            self.need_dialect(self.dialect is not Dialect.JRC, "proof checker")
            self.next()
            return Bang(self.term_unary())
        if self.at("("):
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if self.at("<"):
            self.need_dialect(self.dialect is Dialect.LPCint, "pair terms")
            self.next()
            inner = self.term()
            self.expect(",")
            antecedent = self.disj()
            self.expect(">")
            return Pair(inner, antecedent)
        if tok.kind == "ident":
            if tok.text in ("false", "true"):
                raise ParseError(f"{tok.text!r} cannot name a term", tok.pos)
            self.next()
            if _CONSTANT_NAME.match(tok.text):
                if self.dialect is Dialect.JRC:
                    raise DialectError("constants not available in dialect jrc", tok.pos)
                return Constant(tok.text)
            return Variable(tok.text)
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}")


def parse_formula(text: str, dialect: Dialect) -> Formula:
    """Parse text in the given dialect, expanding derived connectives."""
    p = _Parser(text, dialect)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.text!r} after formula", tok.pos)
    return f


def parse_term(text: str, dialect: Dialect) -> Term:
    """Parse a bare justification term."""
    p = _Parser(text, dialect)
    t = p.term()
    tok = p.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.text!r} after term", tok.pos)
    return t


# --- printing ---------------------------------------------------------

_COND_OPS = {MatImp: "=>", Counterfactual: ">", RelImp: "->", RelCf: "~>"}


def print_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse_formula inverts this."""
    op = _COND_OPS.get(type(f))
    if op is not None:
        return f"{_print_conj(f.left)} {op} {print_formula(f.right)}"
    return _print_conj(f)


def _print_conj(f: Formula) -> str:
    if isinstance(f, And):
        return f"{_print_conj(f.left)} & {_print_prefix(f.right)}"
    return _print_prefix(f)


def _print_prefix(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Neg):
        return "~" + _print_prefix(f.inner)
    if isinstance(f, Box):
        return "[]" + _print_prefix(f.inner)
    if isinstance(f, Just):
        term = print_term(f.term)
        if isinstance(f.term, (App, Sum)):
            term = f"({term})"
        return f"{term}:{_print_prefix(f.inner)}"
    return f"({print_formula(f)})"


def print_term(t: Term) -> str:
    if isinstance(t, Sum):
        return f"{print_term(t.left)}+{_print_term_app(t.right)}"
    return _print_term_app(t)


def _print_term_app(t: Term) -> str:
    if isinstance(t, App):
        return f"{_print_term_app(t.left)}.{_print_term_unary(t.right)}"
    return _print_term_unary(t)


def _print_term_unary(t: Term) -> str:
    if isinstance(t, Bang):
        return "!" + _print_term_unary(t.inner)
    if isinstance(t, (Constant, Variable)):
        return t.name
    if isinstance(t, Pair):
        body = print_formula(t.antecedent)
        if isinstance(t.antecedent, _CONDITIONALS):
            body = f"({body})"
        return f"<{print_term(t.inner)},{body}>"
    return f"({print_term(t)})"


# --- structural helpers ------------------------------------------------


def subformulas(f: Formula) -> set[Formula]:
    """Subformulas of f, f included. Terms are opaque: a justified formula
    contributes itself and the subformulas of its body, and pair antecedents
    are not descended into."""
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Neg, Box, Just)):
            stack.append(g.inner)
        elif isinstance(g, (And, *_CONDITIONALS)):
            stack.append(g.left)
            stack.append(g.right)
    return out


def atoms(f: Formula) -> set[str]:
    """Names of all atoms occurring anywhere, pair antecedents included."""
    names: set[str] = set()
    stack: list[Formula | Term] = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            names.add(g.name)
        elif isinstance(g, (Neg, Box)):
            stack.append(g.inner)
        elif isinstance(g, (And, *_CONDITIONALS, App, Sum)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Just):
            stack.append(g.term)
            stack.append(g.inner)
        elif isinstance(g, Bang):
            stack.append(g.inner)
        elif isinstance(g, Pair):
            stack.append(g.inner)
            stack.append(g.antecedent)
    return names


def subterms(t: Term) -> set[Term]:
    """t and every term below it, descending into pair antecedents."""
    out: set[Term] = set()
    stack: list[Term] = [t]
    while stack:
        s = stack.pop()
        if s in out:
            continue
        out.add(s)
        if isinstance(s, (App, Sum)):
            stack.append(s.left)
            stack.append(s.right)
        elif isinstance(s, Bang):
            stack.append(s.inner)
        elif isinstance(s, Pair):
            stack.append(s.inner)
            out |= terms_of(s.antecedent)
    return out


def terms_of(f: Formula) -> set[Term]:
    """All terms occurring in f, subterms and pair antecedents included."""
    out: set[Term] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Neg, Box)):
            stack.append(g.inner)
        elif isinstance(g, (And, *_CONDITIONALS)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Just):
            out |= subterms(g.term)
            stack.append(g.inner)
    return out


def node_count(x: Formula | Term) -> int:
    """Number of constructors in a tree; the size half of the canonical order."""
    n = 0
    stack: list[Formula | Term] = [x]
    while stack:
        g = stack.pop()
        n += 1
        if isinstance(g, (Neg, Box, Bang)):
            stack.append(g.inner)
        elif isinstance(g, (And, *_CONDITIONALS, App, Sum)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Just):
            stack.append(g.term)
            stack.append(g.inner)
        elif isinstance(g, Pair):
            stack.append(g.inner)
            stack.append(g.antecedent)
    return n


def formula_key(f: Formula) -> tuple[int, str]:
    """Canonical sort key: smaller first, ties broken by printed form."""
    return (node_count(f), print_formula(f))


def term_key(t: Term) -> tuple[int, str]:
    return (node_count(t), print_term(t))


def closure(formulas) -> set[Formula]:
    """Union of the subformula sets of an iterable of formulas."""
    out: set[Formula] = set()
    for f in formulas:
        out |= subformulas(f)
    return out
