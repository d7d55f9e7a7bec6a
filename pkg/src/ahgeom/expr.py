"""Closed-form coordinate expressions: parsing, printing and evaluation.

Grammar (whitespace is insignificant, no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' intexp)*
    intexp := INT | '-' INT | '(' ['-'] INT ')'
    atom   := NUMBER | 'pi' | 'e' | SYMBOL | FUNC '(' expr ')' | '(' expr ')'

Symbols are ``x1 .. xn`` (or another single-letter prefix, ``u1 .. uk`` for
embedding parameters).  Evaluation is generic over the scalar type: plain
floats, numpy arrays, or :class:`~ahgeom.jets.Jet` values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .jets import DomainError, Jet, ipow

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "atan")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class UnknownSymbolError(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class EvaluationError(ExprError):
    """Domain failure while evaluating; ``subexpr`` is the offending node."""

    def __init__(self, message: str, subexpr: "Expr"):
        super().__init__(f"{message} in '{to_text(subexpr)}'")
        self.subexpr = subexpr


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Sym:
    index: int  # 0-based
    prefix: str = "x"


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
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Const, Sym, Neg, BinOp, Pow, Call]


# -- tokenizer --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int, prefix: str):
        self.text = text
        self.dim = dim
        self.prefix = prefix
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind != "op":
            found = val if kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {found!r}", off, self.text)

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off, self.text)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        while self.peek()[:2] == ("op", "^"):
            self.take()
            node = Pow(node, self.intexp())
        return node

    def intexp(self) -> int:
        paren = False
        if self.peek()[:2] == ("op", "("):
            self.take()
            paren = True
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        kind, val, off = self.take()
        if kind != "num" or not val.isdigit():
            raise ExprSyntaxError("exponent must be an integer literal", off, self.text)
        if paren:
            self.expect(")")
        return sign * int(val)

    def atom(self) -> Expr:
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val in FUNCTIONS:
                return self.call(val, off)
            if val in CONSTANTS:
                return Const(val)
            m = re.fullmatch(re.escape(self.prefix) + r"([1-9]\d*)", val)
            if m:
                idx = int(m.group(1))
                if idx > self.dim:
                    raise UnknownSymbolError(
                        f"symbol {val!r} out of range for dimension {self.dim}", off, self.text
                    )
                return Sym(idx - 1, self.prefix)
            raise UnknownSymbolError(f"unknown symbol {val!r}", off, self.text)
        found = val if kind != "end" else "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", off, self.text)

    def call(self, func: str, off: int) -> Expr:
        if self.peek()[:2] != ("op", "("):
            raise ArityError(f"function {func!r} requires an argument list", self.peek()[2], self.text)
        self.take()
        if self.peek()[:2] == ("op", ")"):
            raise ArityError(f"{func} takes exactly 1 argument (0 given)", off, self.text)
        args = [self.expr()]
        while self.peek()[:2] == ("op", ","):
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError(f"{func} takes exactly 1 argument ({len(args)} given)", off, self.text)
        return Call(func, args[0])


def parse(text: str, dim: int, prefix: str = "x") -> Expr:
    """Parse ``text`` into an expression over ``prefix``1 .. ``prefix``dim."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text)
    if dim < 1:
        raise ValueError("dimension must be positive")
    return _Parser(text, dim, prefix).parse()


# -- printing ---------------------------------------------------------------


def to_text(e: Expr) -> str:
    """Render an expression; ``parse(to_text(e))`` reproduces ``e`` exactly."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Sym):
        return f"{e.prefix}{e.index + 1}"
    if isinstance(e, Neg):
        return f"(-{_atomic(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        k = e.exponent
        return f"{_atomic(e.base)}^{k if k >= 0 else f'({k})'}"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


def _atomic(e: Expr) -> str:
    s = to_text(e)
    if isinstance(e, (Num, Const, Sym, Call)) or s.startswith("("):
        return s
    return f"({s})"


def symbols(e: Expr) -> set[int]:
    """0-based indices of the coordinate symbols referenced by ``e``."""
    if isinstance(e, Sym):
        return {e.index}
    if isinstance(e, (Neg, Call)):
        return symbols(e.arg)
    if isinstance(e, Pow):
        return symbols(e.base)
    if isinstance(e, BinOp):
        return symbols(e.left) | symbols(e.right)
    return set()


# -- evaluation -------------------------------------------------------------


def _value(x):
    return x.val if isinstance(x, Jet) else x


_PLAIN = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "atan": np.arctan,
}


def _apply(func: str, x):
    if isinstance(x, Jet):
        return getattr(x, "arctan" if func == "atan" else func)()
    return _PLAIN[func](x)


def evaluate(e: Expr, point: Sequence):
    """Evaluate ``e`` with ``point[i]`` bound to symbol ``i + 1``.

    ``point`` entries may be floats, numpy arrays or jets; the result has the
    same scalar type (a constant subexpression yields a plain float).
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Sym):
        if e.index >= len(point):
            raise EvaluationError(f"point has {len(point)} coordinates", e)
        return point[e.index]
    if isinstance(e, BinOp):
        a = evaluate(e.left, point)
        b = evaluate(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if np.any(np.asarray(_value(b)) == 0):
            raise EvaluationError("division by zero", e)
        return a / b
    if isinstance(e, Neg):
        return -evaluate(e.arg, point)
    if isinstance(e, Pow):
        base = evaluate(e.base, point)
        if e.exponent < 0 and np.any(np.asarray(_value(base)) == 0):
            raise EvaluationError("division by zero", e)
        return ipow(base, e.exponent)
    if isinstance(e, Call):
        x = evaluate(e.arg, point)
        v = np.asarray(_value(x))
        if e.func == "log" and np.any(v <= 0):
            raise EvaluationError("log of non-positive value", e)
        if e.func == "sqrt" and (np.any(v < 0) or (isinstance(x, Jet) and x.order > 0 and np.any(v == 0))):
            raise EvaluationError("sqrt of negative value", e)
        try:
            return _apply(e.func, x)
        except DomainError as exc:
            raise EvaluationError(str(exc), e) from exc
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    raise TypeError(f"not an expression: {e!r}")
