"""Tiny exact-arithmetic expression language for function-atom bodies.

Grammar: integers, named parameters, the distinguished variable ``x``,
the four operations ``+ - * /``, unary minus and parentheses.  Rationals
are written as divisions (``2/3``), so every value stays a Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ContractError, ParseError, ValuationError


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "BodyExpr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "BodyExpr"
    right: "BodyExpr"


BodyExpr = Union[Num, Ref, Neg, BinOp]

_TOKEN_KINDS = {"+", "-", "*", "/", "(", ")"}


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_KINDS:
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("num", i, text[i:j]))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", i, text[i:j]))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} in expression", column=i)
    return tokens


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expression ended early in {self.text!r}")
        self.pos += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() and self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() and self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        tok = self.take()
        if tok[0] == "-":
            return Neg(self.factor())
        if tok[0] == "+":
            return self.factor()
        if tok[0] == "num":
            return Num(Fraction(tok[2]))
        if tok[0] == "name":
            return Ref(tok[2])
        if tok[0] == "(":
            node = self.expr()
            closing = self.take()
            if closing[0] != ")":
                raise ParseError(f"expected ')' in {self.text!r}", column=closing[1])
            return node
        raise ParseError(f"unexpected {tok[0]!r} in {self.text!r}", column=tok[1])


def parse_scalar(text: str) -> BodyExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, text)
    node = parser.expr()
    leftover = parser.peek()
    if leftover is not None:
        raise ParseError(f"trailing input in {text!r}", column=leftover[1])
    return node


def eval_scalar(expr: BodyExpr, x: Optional[Fraction], valuation) -> Fraction:
    """Evaluate with ``x`` bound to the point and names bound by the valuation."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Ref):
        if expr.name == "x":
            if x is None:
                raise ContractError("expression uses x but no point was supplied")
            if not isinstance(x, (int, Fraction)):
                raise ContractError(f"x must be a scalar here, got {x!r}")
            return Fraction(x)
        if valuation is None:
            raise ValuationError(f"no valuation supplied for parameter {expr.name!r}")
        return valuation.resolve(expr.name)
    if isinstance(expr, Neg):
        return -eval_scalar(expr.operand, x, valuation)
    if isinstance(expr, BinOp):
        a = eval_scalar(expr.left, x, valuation)
        b = eval_scalar(expr.right, x, valuation)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "/":
            if b == 0:
                raise ContractError("division by zero in body expression")
            return a / b
    raise TypeError(f"not a body expression: {expr!r}")


def _prec(expr) -> int:
    if isinstance(expr, (Num, Ref)):
        return 3
    if isinstance(expr, Neg):
        return 2
    return 1 if expr.op in ("+", "-") else 2


def render_scalar(expr: BodyExpr) -> str:
    if isinstance(expr, Num):
        return str(expr.value)
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Neg):
        inner = render_scalar(expr.operand)
        if _prec(expr.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, BinOp):
        left = render_scalar(expr.left)
        right = render_scalar(expr.right)
        if _prec(expr.left) < _prec(expr):
            left = f"({left})"
        # right side needs parens at equal precedence: a - (b - c)
        if _prec(expr.right) <= _prec(expr) and not (
            expr.op in ("+", "*") and _prec(expr.right) == _prec(expr)
        ):
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not a body expression: {expr!r}")
