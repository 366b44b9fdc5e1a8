"""
gentwist expression library.

Scalar expressions in chart coordinates and their second-order jets.

Grammar (lowest to highest precedence)::

    expression = term { ("+" | "-") term }
    term       = unary { ("*" | "/") unary }
    unary      = "-" unary | power
    power      = atom [ "^" unary ]
    atom       = NUMBER | COORDINATE | FUNCTION "(" expression ")" | "(" expression ")"

Binary +, -, *, / associate to the left, ^ to the right. Functions: sin, cos, exp, log, sqrt, atan.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from .types import Matrix, Point

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "atan")

TOKEN_PATTERN = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<operator>[-+*/^()])"
    r"|(?P<space>\s+)"
)


@dataclass(frozen=True)
class Token:
    """Lexical token with its 1-based source position."""

    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Num:
    """Numeric literal."""

    value: float


@dataclass(frozen=True)
class Coord:
    """Chart coordinate, referenced by position."""

    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    """Unary minus."""

    operand: Expr


@dataclass(frozen=True)
class BinOp:
    """Binary operation."""

    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    """Function application."""

    function: str
    argument: Expr


Expr = Union[Num, Coord, Neg, BinOp, Call]


def tokenize(text: str) -> list[Token]:
    """Split expression text into tokens, ending with an `end` token."""
    tokens = []
    line, line_start, position = 1, 0, 0

    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if not match:
            raise ExprSyntaxError(f"unexpected character `{text[position]}`", line, position - line_start + 1)

        kind = match.lastgroup or ""
        if kind == "space":
            for offset, char in enumerate(match.group(), start=position):
                if char == "\n":
                    line, line_start = line + 1, offset + 1
        else:
            tokens.append(Token(kind, match.group(), line, position - line_start + 1))
        position = match.end()

    tokens.append(Token("end", "", line, position - line_start + 1))
    return tokens


class Parser:
    """Recursive descent parser for the expression grammar."""

    def __init__(self, text: str, coords: Sequence[str]) -> None:
        self.tokens = tokenize(text)
        self.position = 0
        self.coords = {name: index for index, name in enumerate(coords)}

    @property
    def current(self) -> Token:
        """Token under the cursor."""
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def _fail(self, expected: Iterable[str]) -> ExprSyntaxError:
        token = self.current
        found = "end of input" if token.kind == "end" else f"`{token.text}`"
        return ExprSyntaxError(f"unexpected {found}", token.line, token.column, frozenset(expected))

    def _expect(self, text: str) -> None:
        if self.current.text != text or self.current.kind == "end":
            raise self._fail({text})
        self._advance()

    def parse(self) -> Expr:
        """Parse the complete input."""
        if self.current.kind == "end":
            raise self._fail({"number", "coordinate", "function", "(", "-"})
        expression = self.expression()
        if self.current.kind != "end":
            raise self._fail({"+", "-", "*", "/", "^", "end of input"})
        return expression

    def expression(self) -> Expr:
        """expression = term { ("+" | "-") term }"""
        left = self.term()
        while self.current.text in ("+", "-") and self.current.kind == "operator":
            op = self._advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        """term = unary { ("*" | "/") unary }"""
        left = self.unary()
        while self.current.text in ("*", "/") and self.current.kind == "operator":
            op = self._advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        """unary = "-" unary | power"""
        if self.current.text == "-" and self.current.kind == "operator":
            self._advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        """power = atom [ "^" unary ]"""
        base = self.atom()
        if self.current.text == "^":
            self._advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        """atom = NUMBER | COORDINATE | FUNCTION "(" expression ")" | "(" expression ")" """
        token = self.current
        if token.kind == "number":
            self._advance()
            return Num(float(token.text))
        if token.kind == "name":
            self._advance()
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self.expression()
                self._expect(")")
                return Call(token.text, argument)
            if token.text not in self.coords:
                raise UnknownIdentifierError(token.text, token.line, token.column)
            return Coord(token.text, self.coords[token.text])
        if token.text == "(":
            self._advance()
            inner = self.expression()
            self._expect(")")
            return inner
        raise self._fail({"number", "coordinate", "function", "(", "-"})


def parse(text: str, coords: Sequence[str]) -> Expr:
    """Parse expression text over the given chart coordinates."""
    return Parser(text, coords).parse()


def to_text(expression: Expr) -> str:
    """Print an expression; binary operations are fully parenthesized so the output parses back identically."""
    if isinstance(expression, Num):
        return repr(expression.value)
    if isinstance(expression, Coord):
        return expression.name
    if isinstance(expression, Neg):
        return f"(-{to_text(expression.operand)})"
    if isinstance(expression, Call):
        return f"{expression.function}({to_text(expression.argument)})"
    return f"({to_text(expression.left)} {expression.op} {to_text(expression.right)})"


def constant(value: float) -> Expr:
    """Literal for a constant; negative values become a negated literal."""
    return Neg(Num(-float(value))) if value < 0 else Num(float(value))


@dataclass(frozen=True, eq=False)
class Jet2:
    """Second-order Taylor data of a scalar at a point: value, gradient and the full Hessian.

    The Hessian is stored as a dense symmetric matrix; every product rule adds only symmetric terms, so it stays
    exactly symmetric.
    """

    val: float
    grad: Matrix
    hess: Matrix

    @classmethod
    def constant(cls, value: float, n: int) -> Jet2:
        """Jet of a constant."""
        return cls(float(value), np.zeros(n), np.zeros((n, n)))

    @classmethod
    def coordinate(cls, index: int, point: Point) -> Jet2:
        """Jet of the coordinate function x_index."""
        n = len(point)
        grad = np.zeros(n)
        grad[index] = 1.0
        return cls(float(point[index]), grad, np.zeros((n, n)))

    def chain(self, value: float, first: float, second: float) -> Jet2:
        """Jet of φ∘self given φ, φ′, φ″ at self.val."""
        return Jet2(value, first * self.grad, second * np.outer(self.grad, self.grad) + first * self.hess)

    def __add__(self, other: Jet2) -> Jet2:
        return Jet2(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    def __sub__(self, other: Jet2) -> Jet2:
        return Jet2(self.val - other.val, self.grad - other.grad, self.hess - other.hess)

    def __neg__(self) -> Jet2:
        return Jet2(-self.val, -self.grad, -self.hess)

    def __mul__(self, other: Jet2) -> Jet2:
        cross = np.outer(self.grad, other.grad)
        return Jet2(
            self.val * other.val,
            self.val * other.grad + other.val * self.grad,
            self.val * other.hess + other.val * self.hess + cross + cross.T,
        )

    def reciprocal(self) -> Jet2:
        """Jet of 1/self."""
        inverse = 1.0 / self.val
        return self.chain(inverse, -(inverse**2), 2 * inverse**3)

    def __truediv__(self, other: Jet2) -> Jet2:
        return self * other.reciprocal()

    def integer_power(self, exponent: int) -> Jet2:
        """Jet of self^k for an integer k."""
        if exponent == 0:
            return Jet2.constant(1.0, self.grad.size)
        if exponent == 1:
            return self
        value = self.val
        return self.chain(
            value**exponent,
            exponent * value ** (exponent - 1),
            exponent * (exponent - 1) * value ** (exponent - 2),
        )

    def real_power(self, exponent: float) -> Jet2:
        """Jet of self^c for a real c and positive base."""
        value = self.val
        return self.chain(
            value**exponent,
            exponent * value ** (exponent - 1),
            exponent * (exponent - 1) * value ** (exponent - 2),
        )


def _log_jet(jet: Jet2) -> Jet2:
    return jet.chain(math.log(jet.val), 1 / jet.val, -1 / jet.val**2)


FUNCTION_JETS: dict[str, Callable[[Jet2], Jet2]] = {
    "sin": lambda jet: jet.chain(math.sin(jet.val), math.cos(jet.val), -math.sin(jet.val)),
    "cos": lambda jet: jet.chain(math.cos(jet.val), -math.sin(jet.val), -math.cos(jet.val)),
    "exp": lambda jet: jet.chain(math.exp(jet.val), math.exp(jet.val), math.exp(jet.val)),
    "log": _log_jet,
    "sqrt": lambda jet: jet.chain(math.sqrt(jet.val), 0.5 / math.sqrt(jet.val), -0.25 * jet.val**-1.5),
    "atan": lambda jet: jet.chain(
        math.atan(jet.val), 1 / (1 + jet.val**2), -2 * jet.val / (1 + jet.val**2) ** 2
    ),
}


def _constant_value(expression: Expr) -> float | None:
    """Value of a coordinate-free subexpression, None otherwise."""
    if isinstance(expression, Num):
        return expression.value
    if isinstance(expression, Neg):
        inner = _constant_value(expression.operand)
        return None if inner is None else -inner
    return None


def eval_jet(expression: Expr, point: Point) -> Jet2:
    """Evaluate value, gradient and Hessian of an expression at a point by forward-mode jet arithmetic."""
    point = np.asarray(point, dtype=float)
    n = point.size

    def walk(node: Expr) -> Jet2:
        if isinstance(node, Num):
            return Jet2.constant(node.value, n)
        if isinstance(node, Coord):
            if node.index >= n:
                raise ExprDomainError(f"coordinate index {node.index} outside a {n}-dimensional point", node.name)
            return Jet2.coordinate(node.index, point)
        if isinstance(node, Neg):
            return -walk(node.operand)
        try:
            jet = _call(node, walk(node.argument)) if isinstance(node, Call) else _binary(node, walk)
        except OverflowError as error:
            raise ExprDomainError("numerical overflow", to_text(node)) from error
        if not math.isfinite(jet.val):
            raise ExprDomainError("numerical overflow", to_text(node))
        return jet

    return walk(expression)


def _call(node: Call, argument: Jet2) -> Jet2:
    if node.function == "log" and argument.val <= 0:
        raise ExprDomainError("logarithm of a non-positive value", to_text(node))
    if node.function == "sqrt" and argument.val <= 0:
        raise ExprDomainError("square root of a non-positive value", to_text(node))
    return FUNCTION_JETS[node.function](argument)


def _binary(node: BinOp, walk: Callable[[Expr], Jet2]) -> Jet2:
    left = walk(node.left)

    if node.op == "^":
        exponent = _constant_value(node.right)
        if exponent is not None and float(exponent).is_integer():
            if exponent < 0 and left.val == 0:
                raise ExprDomainError("division by zero", to_text(node))
            return left.integer_power(int(exponent))
        if left.val <= 0:
            raise ExprDomainError("non-integer power of a non-positive value", to_text(node))
        if exponent is not None:
            return left.real_power(exponent)
        return FUNCTION_JETS["exp"](walk(node.right) * _log_jet(left))

    right = walk(node.right)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.val == 0:
        raise ExprDomainError("division by zero", to_text(node))
    return left / right


@dataclass(frozen=True, eq=False)
class ArrayJet:
    """Jets of an array of expressions: values, gradients (last axis) and Hessians (last two axes)."""

    val: Matrix
    grad: Matrix
    hess: Matrix


def eval_array(expressions: np.ndarray, point: Point) -> ArrayJet:
    """Evaluate an object array of expressions at a point."""
    expressions = np.asarray(expressions, dtype=object)
    point = np.asarray(point, dtype=float)
    n = point.size
    val = np.zeros(expressions.shape)
    grad = np.zeros(expressions.shape + (n,))
    hess = np.zeros(expressions.shape + (n, n))

    cache: dict[Expr, Jet2] = {}
    for index in np.ndindex(*expressions.shape):
        expression = expressions[index]
        if expression not in cache:
            cache[expression] = eval_jet(expression, point)
        jet = cache[expression]
        val[index], grad[index], hess[index] = jet.val, jet.grad, jet.hess
    return ArrayJet(val, grad, hess)


def evaluate(expression: Expr, point: Point) -> float:
    """Value of an expression at a point."""
    return eval_jet(expression, point).val
