"""Tiny arithmetic language for weight tails.

Grammar (``^`` is right associative, there is no unary minus)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" factor)?
    base   := NUMBER | "n" | "(" expr ")" | FUNC "(" expr ")"
    FUNC   := sqrt | exp | ln | abs

``n`` is bound to the signed tail offset at evaluation time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ExpressionEvalError, SpecParseError

FUNCS: dict[str, Callable[[float], float]] = {
    "sqrt": math.sqrt,
    "exp": math.exp,
    "ln": math.log,
    "abs": abs,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    pos: int  # 0-based offset into the source


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise SpecParseError(f"unexpected character {source[pos]!r}", column=pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, n: float) -> float:
        return self.value


@dataclass(frozen=True)
class Var:
    def eval(self, n: float) -> float:
        return n


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"

    def eval(self, n: float) -> float:
        a = self.left.eval(n)
        b = self.right.eval(n)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return math.pow(a, b)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"

    def eval(self, n: float) -> float:
        return FUNCS[self.func](self.arg.eval(n))


Node = Union[Num, Var, BinOp, Call]


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None) -> SpecParseError:
        tok = tok or self.tok
        return SpecParseError(msg, column=tok.pos + 1)

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        base = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            return BinOp("^", base, self.factor())
        return base

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "n":
                return Var()
            if tok.text in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            raise self.error(f"unknown name {tok.text!r}", tok)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"expected a number, 'n', a function or '(', found {found!r}")


@dataclass(frozen=True)
class Expression:
    """A parsed tail expression; call it with the signed offset."""

    source: str
    root: Node

    def __call__(self, n: int) -> float:
        try:
            value = float(self.root.eval(float(n)))
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise ExpressionEvalError(f"expression {self.source!r} failed at n={n}: {exc}") from None
        if math.isnan(value) or math.isinf(value):
            raise ExpressionEvalError(f"expression {self.source!r} is not finite at n={n}")
        return value


def parse_expression(source: str) -> Expression:
    return Expression(source, _Parser(source).parse())
