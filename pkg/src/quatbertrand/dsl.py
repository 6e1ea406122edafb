"""A tiny expression language over the curve parameter ``s``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := number | 'pi' | 's' | fn '(' expr ')' | '(' expr ')'
    fn     := 'sin' | 'cos' | 'sqrt' | 'exp'

Unary minus binds looser than ``^`` (``-s^2`` is ``-(s^2)``) and tighter than
the binary operators. Error offsets are 1-based byte positions; end of input
is reported at ``len(text) + 1``.

Trees evaluate over floats, numpy arrays, or :class:`TaylorJet` values with
the same recursion.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jet
from .errors import ParseError, SingularEvaluationError
from .jet import TaylorJet

FUNCTIONS = ("sin", "cos", "sqrt", "exp")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Apply:
    fn: str
    arg: "Expr"


Expr = Union[Num, Pi, Var, Neg, BinOp, Pow, Apply]


# lexer ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number | ident | op | eof
    text: str
    offset: int  # 1-based


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"lexical error: unexpected character {text[pos]!r}", pos + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text) + 1))
    return toks


# parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def unexpected(self, expected=None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        msg = f"unexpected token {found}"
        if expected:
            msg += f", expected {expected}"
        raise ParseError(msg, t.offset)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            if self.at_op(")"):
                raise ParseError("unbalanced parenthesis: unmatched ')'", self.tok.offset)
            self.unexpected("operator or end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.factor())
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            t = self.tok
            if t.kind != "number" or not t.text.isdigit():
                raise ParseError("malformed exponent: expected a non-negative integer literal", t.offset)
            self.advance()
            return Pow(base, int(t.text))
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text == "s":
                return Var()
            if t.text == "pi":
                return Pi()
            if t.text in FUNCTIONS:
                if not self.at_op("("):
                    self.unexpected(f"'(' after {t.text}")
                return Apply(t.text, self.group())
            if self.at_op("("):
                raise ParseError(f"unknown function {t.text!r}", t.offset)
            raise ParseError(f"unexpected token {t.text!r}: unknown identifier", t.offset)
        if self.at_op("("):
            return self.group()
        self.unexpected("a number, 's', 'pi', a function or '('")

    def group(self) -> Expr:
        self.advance()  # '('
        e = self.expr()
        if not self.at_op(")"):
            if self.tok.kind == "eof":
                raise ParseError("unbalanced parenthesis: expected ')'", self.tok.offset)
            self.unexpected("')'")
        self.advance()
        return e


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# printing ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e`` for every parsed tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Apply):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _prec(e.arg) < 3)
    if isinstance(e, Pow):
        return _wrap(e.base, _prec(e.base) < 5) + f"^{e.exponent}"
    p = _PREC[e.op]
    return f"{_wrap(e.left, _prec(e.left) < p)}{e.op}{_wrap(e.right, _prec(e.right) <= p)}"


def _wrap(e: Expr, paren: bool) -> str:
    s = to_text(e)
    return f"({s})" if paren else s


# evaluation ----------------------------------------------------------------


def _real_sqrt(x):
    if np.any(np.asarray(x) < 0):
        raise SingularEvaluationError("sqrt of a negative number")
    return np.sqrt(x)


_REAL_FUNCS = {"sin": np.sin, "cos": np.cos, "sqrt": _real_sqrt, "exp": np.exp}
_JET_FUNCS = {"sin": jet.sin, "cos": jet.cos, "sqrt": jet.sqrt, "exp": jet.exp}


def evaluate(e: Expr, at):
    """Evaluate ``e`` with ``s = at``; ``at`` is a float, an array, or a jet.

    Sub-expressions that do not involve ``s`` stay plain floats even during a
    jet evaluation.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        return at
    if isinstance(e, Neg):
        return -evaluate(e.arg, at)
    if isinstance(e, Pow):
        return evaluate(e.base, at) ** e.exponent
    if isinstance(e, Apply):
        x = evaluate(e.arg, at)
        funcs = _JET_FUNCS if isinstance(x, TaylorJet) else _REAL_FUNCS
        return funcs[e.fn](x)
    x = evaluate(e.left, at)
    y = evaluate(e.right, at)
    if e.op == "+":
        return x + y
    if e.op == "-":
        return x - y
    if e.op == "*":
        return x * y
    if not isinstance(y, TaylorJet) and np.any(np.asarray(y) == 0):
        raise SingularEvaluationError("division by zero")
    return x / y
