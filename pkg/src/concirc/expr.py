"""Expression language for metric components, covector components and scalars.

Grammar::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

``-t^2`` therefore reads as ``-(t^2)`` and ``a^b^c`` as ``a^(b^c)``.
Identifiers are coordinate names, the constants ``pi`` and ``e``, or one of
the built-in unary functions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

from .jet import DomainError, Jet2, JetError, j2_binary, j2_unary

FUNCTIONS = ("exp", "ln", "sin", "cos", "tan", "sinh", "cosh", "tanh", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class ParseError(ValueError):
    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {position}: expected {expected}, found {found}")


class UnknownIdentifier(ParseError):
    def __init__(self, position: int, name: str):
        super().__init__(position, "coordinate, constant or function", repr(name))
        self.name = name


class BindError(ValueError):
    pass


@dataclass(frozen=True)
class Number:
    value: float
    name: str | None = None
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Coord:
    index: int
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    fn: str
    child: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    pos: int = field(default=0, compare=False)


Expr = Union[Number, Coord, Unary, Binary, Call]


# -- lexing -----------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        raise ParseError(i, "expression", repr(ch))
    tokens.append(_Token("end", "", len(text)))
    return tokens


def _describe(tok: _Token) -> str:
    return "end of input" if tok.kind == "end" else repr(tok.text)


# -- parsing ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, coordinate_names: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.coords = {name: k for k, name in enumerate(coordinate_names)}

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind != "op":
            raise ParseError(self.tok.pos, repr(text), _describe(self.tok))
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, "operator or end of input", _describe(self.tok))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            node = Binary(op.text, node, self.term(), op.pos)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            node = Binary(op.text, node, self.unary(), op.pos)
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            op = self.advance()
            return Unary("neg", self.unary(), op.pos)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self.advance()
            return Binary("^", base, self.unary(), op.pos)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Number(float(tok.text), None, tok.pos)
        if tok.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            if tok.text in self.coords:
                return Coord(self.coords[tok.text], tok.text, tok.pos)
            if tok.text in CONSTANTS:
                return Number(CONSTANTS[tok.text], tok.text, tok.pos)
            raise UnknownIdentifier(tok.pos, tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(tok.pos, "expression", _describe(tok))

    def call(self, name: _Token) -> Expr:
        if name.text not in FUNCTIONS:
            raise UnknownIdentifier(name.pos, name.text)
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ParseError(name.pos, f"one argument to {name.text}", f"{len(args)} arguments")
        return Call(name.text, tuple(args), name.pos)


def parse(text: str, coordinate_names: Sequence[str]) -> Expr:
    names = list(coordinate_names)
    if not names:
        raise ValueError("at least one coordinate name is required")
    if len(set(names)) != len(names):
        raise ValueError(f"coordinate names must be distinct: {names}")
    for name in names:
        if not _IDENT_RE.fullmatch(name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in FUNCTIONS or name in CONSTANTS:
            raise ValueError(f"coordinate name {name!r} is reserved")
    return _Parser(text, names).parse()


# -- printing ---------------------------------------------------------------

_LEVEL_SUM, _LEVEL_PRODUCT, _LEVEL_UNARY, _LEVEL_POWER, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(node: Expr) -> int:
    if isinstance(node, Binary):
        if node.op in "+-":
            return _LEVEL_SUM
        if node.op in "*/":
            return _LEVEL_PRODUCT
        return _LEVEL_POWER
    if isinstance(node, Unary):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def to_text(node: Expr) -> str:
    """Canonical text for ``node``; re-parses to a structurally equal tree."""

    def wrap(child: Expr, needed: int) -> str:
        s = to_text(child)
        return f"({s})" if _level(child) < needed else s

    if isinstance(node, Number):
        if node.name is not None:
            return node.name
        if node.value < 0 or not math.isfinite(node.value):
            raise ValueError(f"cannot print literal {node.value!r}")
        return repr(float(node.value))
    if isinstance(node, Coord):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Unary):
        return f"-{wrap(node.child, _LEVEL_UNARY)}"
    if node.op in "+-":
        return f"{wrap(node.left, _LEVEL_SUM)} {node.op} {wrap(node.right, _LEVEL_PRODUCT)}"
    if node.op in "*/":
        return f"{wrap(node.left, _LEVEL_PRODUCT)} {node.op} {wrap(node.right, _LEVEL_UNARY)}"
    return f"{wrap(node.left, _LEVEL_ATOM)}^{wrap(node.right, _LEVEL_UNARY)}"


# -- evaluation -------------------------------------------------------------


def has_coordinates(node: Expr) -> bool:
    if isinstance(node, Coord):
        return True
    if isinstance(node, Number):
        return False
    if isinstance(node, Unary):
        return has_coordinates(node.child)
    if isinstance(node, Binary):
        return has_coordinates(node.left) or has_coordinates(node.right)
    return any(has_coordinates(a) for a in node.args)


def max_coordinate(node: Expr) -> int:
    """Largest coordinate index referenced, -1 if none."""
    if isinstance(node, Coord):
        return node.index
    if isinstance(node, Number):
        return -1
    if isinstance(node, Unary):
        return max_coordinate(node.child)
    if isinstance(node, Binary):
        return max(max_coordinate(node.left), max_coordinate(node.right))
    return max(max_coordinate(a) for a in node.args)


def _constant_value(node: Expr) -> float:
    return evaluate_float(node, ())


def evaluate(node: Expr, coords: Sequence[Jet2]) -> Jet2:
    """Jet of ``node`` given the coordinate jets of the evaluation point."""
    n = len(coords)
    if max_coordinate(node) >= n:
        raise BindError(f"expression references coordinate {max_coordinate(node)} of a {n}-chart")
    return _eval_jet(node, coords)


def _eval_jet(node: Expr, coords: Sequence[Jet2]) -> Jet2:
    try:
        if isinstance(node, Number):
            return Jet2.constant(node.value, len(coords))
        if isinstance(node, Coord):
            return coords[node.index]
        if isinstance(node, Unary):
            return j2_unary("neg", _eval_jet(node.child, coords))
        if isinstance(node, Call):
            return j2_unary(node.name, _eval_jet(node.args[0], coords))
        left = _eval_jet(node.left, coords)
        if node.op == "^":
            if has_coordinates(node.right):
                right = _eval_jet(node.right, coords)
                return j2_unary("exp", j2_binary("mul", right, j2_unary("ln", left)))
            return j2_unary("pow", left, _constant_value(node.right))
        right = _eval_jet(node.right, coords)
        return j2_binary({"+": "add", "-": "sub", "*": "mul", "/": "div"}[node.op], left, right)
    except DomainError as exc:
        if exc.position is None:
            raise DomainError(exc.fn, exc.value, node.pos) from exc
        raise
    except JetError as exc:
        if getattr(exc, "position", None) is None:
            exc.position = node.pos
        raise


_FLOAT_FUNCS = {
    "exp": math.exp,
    "ln": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "sqrt": math.sqrt,
}


def evaluate_float(node: Expr, point: Sequence[float]) -> float:
    """Plain floating-point evaluation, independent of the jet machinery."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Coord):
        return float(point[node.index])
    if isinstance(node, Unary):
        return -evaluate_float(node.child, point)
    if isinstance(node, Call):
        return _FLOAT_FUNCS[node.name](evaluate_float(node.args[0], point))
    a = evaluate_float(node.left, point)
    b = evaluate_float(node.right, point)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return a**b
