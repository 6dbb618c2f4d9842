"""Parsing and evaluation of single-variable real function expressions.

Grammar (loosest binding first)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom (("^" | "**") unary)?
    atom    := NUMBER | "x" | "pi" | "e" | NAME "(" expr ")" | "(" expr ")"

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` while ``2^-1`` is still accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .exceptions import DomainFault, ParseError

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "tan", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
# log is accepted as a synonym of ln
_ALIASES = {"log": "ln"}
_TAN_POLE_TOL = 1e-12


@dataclass(frozen=True)
class Const:
    value: float
    name: str | None = None


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a name from FUNCTIONS
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Unary, Binary]


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, op, end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _expect_op(self, op: str) -> None:
        if not self._at_op(op):
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset, repr(op))
        self._advance()

    def _describe(self) -> str:
        t = self.tok
        return "end of input" if t.kind == "end" else f"token {t.text!r}"

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            if self._at_op(")"):
                raise ParseError("unbalanced ')'", self.tok.offset)
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset, "operator")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self._at_op("+", "-"):
            op = self._advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self._at_op("*", "/"):
            op = self._advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._at_op("-"):
            self._advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._at_op("^", "**"):
            self._advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self._advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {t.text!r} overflows", t.offset)
            return Const(value)
        if t.kind == "name":
            self._advance()
            name = _ALIASES.get(t.text, t.text)
            if name == "x":
                return Var()
            if name in CONSTANTS:
                return Const(CONSTANTS[name], name)
            if name in FUNCTIONS:
                self._expect_op("(")
                arg = self.expr()
                if not self._at_op(")"):
                    raise ParseError(
                        f"unbalanced parentheses, found {self._describe()}", self.tok.offset, "')'"
                    )
                self._advance()
                return Unary(name, arg)
            raise ParseError(f"unknown identifier {t.text!r}", t.offset)
        if self._at_op("("):
            self._advance()
            node = self.expr()
            if not self._at_op(")"):
                raise ParseError(
                    f"unbalanced parentheses, found {self._describe()}", self.tok.offset, "')'"
                )
            self._advance()
            return node
        raise ParseError(f"unexpected {self._describe()}", t.offset, "operand")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree, raising :class:`ParseError` on bad input."""
    return _Parser(text).parse()


def to_text(e: Expr) -> str:
    """Fully parenthesised rendering that :func:`parse` maps back to the same tree."""
    if isinstance(e, Const):
        return e.name if e.name else repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    return f"({to_text(e.left)} {e.op} {to_text(e.right)})"


def _fault(msg: str, x: float, node: Expr):
    return DomainFault(f"{msg} in {to_text(node)}", x, node)


def _eval(e: Expr, x: float) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Unary):
        a = _eval(e.arg, x)
        op = e.op
        try:
            if op == "neg":
                r = -a
            elif op == "exp":
                r = math.exp(a)
            elif op == "ln":
                if a <= 0:
                    raise _fault("logarithm of non-positive value", x, e)
                r = math.log(a)
            elif op == "sqrt":
                if a < 0:
                    raise _fault("square root of negative value", x, e)
                r = math.sqrt(a)
            elif op == "sin":
                r = math.sin(a)
            elif op == "cos":
                r = math.cos(a)
            elif op == "tan":
                if abs(math.cos(a)) < _TAN_POLE_TOL:
                    raise _fault("tangent pole", x, e)
                r = math.tan(a)
            elif op == "abs":
                r = abs(a)
            else:
                raise ValueError(f"unknown unary op {op!r}")
        except OverflowError:
            raise _fault("overflow", x, e) from None
    else:
        a = _eval(e.left, x)
        b = _eval(e.right, x)
        op = e.op
        try:
            if op == "+":
                r = a + b
            elif op == "-":
                r = a - b
            elif op == "*":
                r = a * b
            elif op == "/":
                if b == 0:
                    raise _fault("division by zero", x, e)
                r = a / b
            elif op == "^":
                if a == 0 and b < 0:
                    raise _fault("division by zero", x, e)
                if a < 0 and b != int(b):
                    raise _fault("non-integer power of negative value", x, e)
                r = math.pow(a, b)
            else:
                raise ValueError(f"unknown binary op {op!r}")
        except OverflowError:
            raise _fault("overflow", x, e) from None
    if not math.isfinite(r):
        raise _fault("non-finite result", x, e)
    return r


def evaluate(e: Expr, x: float) -> float:
    """Evaluate ``e`` at ``x`` in double precision.

    Raises
    ------
    DomainFault
        For ln/sqrt outside their domain, division by zero, tangent poles,
        or any non-finite intermediate.
    """
    if not math.isfinite(x):
        raise DomainFault("non-finite input", x, e)
    return _eval(e, float(x))


def _eval_vec(e: Expr, xs: np.ndarray) -> np.ndarray:
    if isinstance(e, Const):
        return np.full(xs.shape, e.value)
    if isinstance(e, Var):
        return xs
    if isinstance(e, Unary):
        a = _eval_vec(e.arg, xs)
        op = e.op
        if op == "ln":
            bad = a <= 0
        elif op == "sqrt":
            bad = a < 0
        elif op == "tan":
            bad = np.abs(np.cos(a)) < _TAN_POLE_TOL
        else:
            bad = None
        if bad is not None and bad.any():
            i = int(np.argmax(bad))
            # scalar path produces the precise message
            _eval(e, float(xs[i]))
        fn = {
            "neg": np.negative, "exp": np.exp, "ln": np.log, "sqrt": np.sqrt,
            "sin": np.sin, "cos": np.cos, "tan": np.tan, "abs": np.abs,
        }[op]
        r = fn(a)
    else:
        a = _eval_vec(e.left, xs)
        b = _eval_vec(e.right, xs)
        op = e.op
        if op == "/":
            bad = b == 0
        elif op == "^":
            bad = ((a == 0) & (b < 0)) | ((a < 0) & (b != np.trunc(b)))
        else:
            bad = None
        if bad is not None and bad.any():
            _eval(e, float(xs[int(np.argmax(bad))]))
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b
        else:
            r = np.power(a, b)
    nonfinite = ~np.isfinite(r)
    if nonfinite.any():
        i = int(np.argmax(nonfinite))
        raise _fault("non-finite result", float(xs[i]), e)
    return r


def evaluate_many(e: Expr | Callable[[float], float], xs) -> np.ndarray:
    """Evaluate at every point of ``xs``; the first faulting point raises :class:`DomainFault`."""
    arr = np.asarray(xs, dtype=float)
    if not isinstance(e, (Const, Var, Unary, Binary)):
        return np.array([_call(e, float(x)) for x in arr], dtype=float)
    with np.errstate(all="ignore"):
        return _eval_vec(e, arr)


def _call(f: Callable[[float], float], x: float) -> float:
    try:
        r = float(f(x))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainFault(str(exc), x) from exc
    if not math.isfinite(r):
        raise DomainFault("non-finite result", x)
    return r


def as_function(f: Expr | Callable[[float], float] | str) -> Callable[[float], float]:
    """Accept an expression string, a parsed tree, or a plain callable."""
    if isinstance(f, str):
        f = parse(f)
    if isinstance(f, (Const, Var, Unary, Binary)):
        tree = f
        return lambda x: evaluate(tree, x)
    return lambda x: _call(f, x)


def as_expr(f: Expr | Callable[[float], float] | str):
    """Parse strings; pass trees and callables through unchanged."""
    return parse(f) if isinstance(f, str) else f
