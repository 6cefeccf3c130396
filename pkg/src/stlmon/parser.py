"""Text format for specifications.

A spec file is a sequence of declaration lines followed by one formula::

    # comments run to end of line
    var v in [0, 20]
    var a in [-5, 5]
    spec G[0,100] (v > 5 || a > 0)

Formula grammar (lowest precedence first)::

    formula := disj ("->" formula)?
    disj    := conj ("||" conj)*
    conj    := unary ("&&" unary)*
    unary   := "!" unary
             | "G[" t "," t "]" unary
             | "F[" t "," t "]" unary
             | "(" formula ("U[" t "," t "]" formula)? ")"
             | pred
    pred    := "true" | "|" expr "|" cmp expr | expr cmp expr
    cmp     := ">" | ">=" | "<" | "<="
    t       := decimal | "inf"

Comparisons normalize to the single-expression form ``f > 0``: ``e1 > e2``
becomes the atom ``e1 - e2`` and ``e1 < e2`` becomes ``e2 - e1`` (>= and <=
are treated like their strict counterparts).  ``|e| < c`` desugars to the
conjunction of ``c - e > 0`` and ``c + e > 0``; ``|e| > c`` to the matching
disjunction.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import SpecSyntaxError
from .formula import (
    Always,
    And,
    Atom,
    BinOp,
    Const,
    Eventually,
    Expr,
    Formula,
    Implies,
    Neg,
    Not,
    Or,
    Predicate,
    TimeInterval,
    TrueNode,
    UNBOUNDED,
    Until,
    Var,
    VariableDeclarations,
    check_variables,
    negate_expr,
    subtract_exprs,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>&&|\|\||->|>=|<=|[-+*/!<>(),\[\]|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | sym | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind != "eof":
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind == "eof" or tok.text != text:
            shown = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise SpecSyntaxError(f"expected {text!r}, found {shown}", tok.line, tok.column)
        return self.advance()

    def fail(self, message: str):
        tok = self.peek()
        raise SpecSyntaxError(message, tok.line, tok.column)

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        node = self.conj()
        while self.accept("||"):
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.accept("&&"):
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.advance()
            return Not(self.unary())
        if tok.kind == "ident" and tok.text in ("G", "F") and self._next_is("["):
            self.advance()
            interval = self.interval()
            child = self.unary()
            return Always(interval, child) if tok.text == "G" else Eventually(interval, child)
        if tok.text == "(":
            # A '(' may open a parenthesized formula or a parenthesized
            # arithmetic expression; try the predicate reading first and
            # fall back on failure.
            saved = self.pos
            try:
                return self.pred()
            except SpecSyntaxError:
                self.pos = saved
            self.expect("(")
            inner = self.formula()
            if self.peek().kind == "ident" and self.peek().text == "U" and self._next_is("["):
                self.advance()
                interval = self.interval()
                right = self.formula()
                self.expect(")")
                return Until(interval, inner, right)
            self.expect(")")
            return inner
        return self.pred()

    def _next_is(self, text: str) -> bool:
        nxt = self.tokens[self.pos + 1]
        return nxt.kind != "eof" and nxt.text == text

    def interval(self) -> TimeInterval:
        self.expect("[")
        lower = self.endpoint()
        self.expect(",")
        upper = self.endpoint()
        self.expect("]")
        tok = self.tokens[self.pos - 1]
        try:
            return TimeInterval(lower, upper)
        except ValueError as exc:
            raise SpecSyntaxError(str(exc), tok.line, tok.column) from None

    def endpoint(self) -> float:
        tok = self.peek()
        if tok.text == "-":
            self.fail("interval endpoints must be non-negative")
        if tok.kind == "ident" and tok.text == "inf":
            self.advance()
            return UNBOUNDED
        if tok.kind == "number":
            self.advance()
            return float(tok.text)
        self.fail("expected a number or 'inf'")

    def pred(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.advance()
            return TrueNode()
        if tok.text == "|":
            self.advance()
            inner = self.expr()
            self.expect("|")
            op = self.cmp()
            bound = self.expr()
            # |e| < c  <=>  (c - e > 0) && (c + e > 0); dually for >.
            below = And(
                Atom(Predicate(subtract_exprs(bound, inner))),
                Atom(Predicate(BinOp("+", bound, inner))),
            )
            above = Or(
                Atom(Predicate(subtract_exprs(inner, bound))),
                Atom(Predicate(subtract_exprs(negate_expr(inner), bound))),
            )
            return below if op in ("<", "<=") else above
        lhs = self.expr()
        op = self.cmp()
        rhs = self.expr()
        if op in (">", ">="):
            return Atom(Predicate(subtract_exprs(lhs, rhs)))
        return Atom(Predicate(subtract_exprs(rhs, lhs)))

    def cmp(self) -> str:
        tok = self.peek()
        if tok.text in (">", ">=", "<", "<="):
            return self.advance().text
        self.fail("expected a comparison operator")

    # -- arithmetic expressions ---------------------------------------------

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "sym":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().text in ("*", "/") and self.peek().kind == "sym":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.text == "-":
            self.advance()
            return Neg(self.factor())
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            if tok.text in ("true", "inf"):
                self.fail(f"{tok.text!r} cannot appear in an arithmetic expression")
            self.advance()
            return Var(tok.text)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a variable, number, or parenthesized expression")

    # -- declarations --------------------------------------------------------

    def spec_file(self) -> tuple[Formula, VariableDeclarations]:
        ranges = []
        while self.peek().kind == "ident" and self.peek().text == "var":
            self.advance()
            name_tok = self.peek()
            if name_tok.kind != "ident" or name_tok.text in ("var", "spec", "in", "true", "inf"):
                self.fail("expected a variable name")
            self.advance()
            if not (self.peek().kind == "ident" and self.peek().text == "in"):
                self.fail("expected 'in'")
            self.advance()
            self.expect("[")
            lo = self.signed_number()
            self.expect(",")
            hi = self.signed_number()
            self.expect("]")
            if lo > hi:
                raise SpecSyntaxError(
                    f"variable {name_tok.text!r} declares min {lo} above max {hi}",
                    name_tok.line,
                    name_tok.column,
                )
            ranges.append((name_tok.text, (lo, hi)))
        if not (self.peek().kind == "ident" and self.peek().text == "spec"):
            self.fail("expected a 'var' declaration or the 'spec' line")
        self.advance()
        f = self.formula()
        if self.peek().kind != "eof":
            self.fail("trailing input after the formula")
        try:
            decls = VariableDeclarations(tuple(ranges))
        except ValueError as exc:
            raise SpecSyntaxError(str(exc), 1, 1) from None
        return f, decls

    def signed_number(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        tok = self.peek()
        if tok.kind != "number":
            self.fail("expected a number")
        self.advance()
        return sign * float(tok.text)


def parse_formula(text: str, decls: VariableDeclarations | None = None) -> Formula:
    """Parse a bare formula; validates variables when declarations are given."""
    parser = _Parser(_tokenize(text))
    f = parser.formula()
    if parser.peek().kind != "eof":
        parser.fail("trailing input after the formula")
    if decls is not None:
        check_variables(f, decls)
    return f


def parse_spec(text: str) -> tuple[Formula, VariableDeclarations]:
    """Parse declaration lines plus the final `spec` line."""
    f, decls = _Parser(_tokenize(text)).spec_file()
    check_variables(f, decls)
    return f, decls


def load_spec(path) -> tuple[Formula, VariableDeclarations]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ---------------------------------------------------------------------------
# printing


_FORMULA_PREC = {Implies: 0, Or: 1, And: 2}


def format_formula(f: Formula) -> str:
    """Render a formula back to grammar-conformant text.

    Reparsing the result reproduces the same tree, which makes the printer
    usable for canonical output and round-trip checks.
    """
    return _fmt(f, 0)


def _fmt(f: Formula, prec: int) -> str:
    if isinstance(f, TrueNode):
        return "true"
    if isinstance(f, Atom):
        return f"{format_expr(f.predicate.expr)} > 0"
    if isinstance(f, Not):
        return f"!({_fmt(f.operand, 0)})"
    if isinstance(f, Always):
        return f"G{_fmt_interval(f.interval)} ({_fmt(f.operand, 0)})"
    if isinstance(f, Eventually):
        return f"F{_fmt_interval(f.interval)} ({_fmt(f.operand, 0)})"
    if isinstance(f, Until):
        return f"({_fmt(f.left, 0)} U{_fmt_interval(f.interval)} {_fmt(f.right, 0)})"
    own = _FORMULA_PREC[type(f)]
    sep = {Implies: "->", Or: "||", And: "&&"}[type(f)]
    # implication nests to the right, the others to the left
    if isinstance(f, Implies):
        text = f"{_fmt(f.left, own + 1)} {sep} {_fmt(f.right, own)}"
    else:
        text = f"{_fmt(f.left, own)} {sep} {_fmt(f.right, own + 1)}"
    return f"({text})" if own < prec else text


def _fmt_interval(iv: TimeInterval) -> str:
    return f"[{_fmt_number(iv.lower)},{'inf' if iv.unbounded else _fmt_number(iv.upper)}]"


def _fmt_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e: Expr) -> str:
    return _fmt_expr(e, 0)


def _fmt_expr(e: Expr, prec: int) -> str:
    if isinstance(e, Const):
        if e.value < 0:
            # same shape a leading minus parses back to
            text = f"-{_fmt_number(-e.value)}"
            return f"({text})" if prec > 2 else text
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        text = f"-{_fmt_expr(e.operand, 3)}"
        return f"({text})" if prec > 2 else text
    own = _EXPR_PREC[e.op]
    # left-associative chains print bare; right operands always one level
    # tighter so that a - (b - c) and a * (b * c) keep their parentheses
    text = f"{_fmt_expr(e.left, own)} {e.op} {_fmt_expr(e.right, own + 1)}"
    return f"({text})" if own < prec else text


def format_spec(f: Formula, decls: VariableDeclarations) -> str:
    lines = [
        f"var {name} in [{_fmt_number(lo)}, {_fmt_number(hi)}]"
        for name, (lo, hi) in decls.ranges
    ]
    lines.append(f"spec {format_formula(f)}")
    return "\n".join(lines) + "\n"
