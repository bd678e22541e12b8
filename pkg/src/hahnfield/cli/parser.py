"""Tokenizer, recursive-descent parser and printer for series expressions.

Grammar (whitespace insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | factor
    factor   := atom ('^' signed_rational)?
    atom     := rational | 'w' '^' '(' expr ')' | 'w'
              | name '(' args ')' | name | '(' expr ')'
    rational := int ('/' posint)?

``unparse`` emits text that ``parse`` maps back to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ExprSyntaxError, UnknownIdentifier

FUNCTIONS = {
    "log": 1,
    "exp": 1,
    "decompose": 1,
    "split": 1,
    "cmp": 2,
    "dom": 3,
    "O": 1,
    "log1p": 1,
    "geom": 1,
    "sin": 1,
    "cos": 1,
}
RELATIONS = ("vleq", "vless", "veq", "sim")


# -- syntax tree ---------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class W:
    pass


@dataclass(frozen=True)
class OmegaPow:
    exponent: object


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: Fraction


# -- tokens ----------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),])")


def tokenize(text: str) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.open = []  # unmatched '(' tokens, innermost last

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        if tok.kind == "eof" and self.open:
            opener = self.open[-1]
            raise ExprSyntaxError(f"unclosed {opener.text!r}", opener.line, opener.column)
        if tok.kind == "eof":
            message = f"{message}, found end of input"
        else:
            message = f"{message}, found {tok.text!r}"
        raise ExprSyntaxError(message, tok.line, tok.column)

    def expect(self, text: str, opener: Token | None = None) -> Token:
        if self.tok.text == text and self.tok.kind != "eof":
            if opener is not None:
                self.open.pop()
            return self.take()
        self.error(f"expected {text!r}")

    def parse(self):
        node = self.expr()
        if self.tok.kind != "eof":
            self.error("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.text == "-" and self.tok.kind == "op":
            self.take()
            return Neg(self.unary())
        return self.factor()

    def factor(self):
        node = self.atom()
        if self.tok.text == "^":
            self.take()
            node = Pow(node, self.signed_rational())
        return node

    def signed_rational(self) -> Fraction:
        sign = 1
        if self.tok.text == "-":
            self.take()
            sign = -1
        if self.tok.kind != "int":
            self.error("expected a rational exponent")
        return sign * self.rational()

    def rational(self) -> Fraction:
        num = int(self.take().text)
        if self.tok.text == "/" and self.peek().kind == "int":
            self.take()
            den_tok = self.take()
            den = int(den_tok.text)
            if den == 0:
                raise ExprSyntaxError("zero denominator", den_tok.line, den_tok.column)
            return Fraction(num, den)
        return Fraction(num)

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            return Num(self.rational())
        if tok.text == "(":
            self.open.append(self.take())
            node = self.expr()
            self.expect(")", tok)
            return node
        if tok.kind == "name":
            self.take()
            if tok.text == "w":
                if self.tok.text == "^" and self.peek().text == "(":
                    self.take()
                    opener = self.take()
                    self.open.append(opener)
                    node = self.expr()
                    self.expect(")", opener)
                    return OmegaPow(node)
                return W()
            if self.tok.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {tok.text!r} at line {tok.line}, column {tok.column}")
                opener = self.take()
                self.open.append(opener)
                args = [self.expr()]
                while self.tok.text == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")", opener)
                return Call(tok.text, tuple(args))
            if tok.text in RELATIONS:
                return Name(tok.text)
            raise UnknownIdentifier(f"unknown identifier {tok.text!r} at line {tok.line}, column {tok.column}")
        self.error("expected an expression")


def parse(text: str):
    """Parse ``text`` into a syntax tree, raising ``ExprSyntaxError`` with a position."""
    return _Parser(text).parse()


# -- printing --------------------------------------------------------------------

_SUM, _PRODUCT, _UNARY, _POWER = 1, 2, 3, 4


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _level(node) -> int:
    if isinstance(node, BinOp):
        return _SUM if node.op in "+-" else _PRODUCT
    if isinstance(node, Neg):
        return _UNARY
    if isinstance(node, Pow):
        return _POWER
    return 5


def _wrap(node, minimum: int) -> str:
    text = unparse(node)
    return f"({text})" if _level(node) < minimum else text


def unparse(node) -> str:
    if isinstance(node, Num):
        return _rat(node.value)
    if isinstance(node, W):
        return "w"
    if isinstance(node, Name):
        return node.id
    if isinstance(node, OmegaPow):
        return f"w^({unparse(node.exponent)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(unparse(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _UNARY)
    if isinstance(node, Pow):
        base = node.base
        # a bare Num base would merge with the exponent's '/' or read as a rational
        text = f"({unparse(base)})" if _level(base) < 5 or isinstance(base, Num) else unparse(base)
        return f"{text}^{'-' if node.exponent < 0 else ''}{_rat(abs(node.exponent))}"
    if isinstance(node, BinOp):
        level = _level(node)
        left = _wrap(node.left, level)
        right = _wrap(node.right, level + 1)
        if node.op == "/" and isinstance(node.right, Num):
            right = f"({right})"
        if node.op in "+-":
            return f"{left} {node.op} {right}"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not a syntax tree node: {node!r}")
