"""Kernel expressions k(x, u).

Grammar, lowest precedence first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := call (('^' | '**') unary)?        # right-associative
    call   := FUNC '(' expr ')' | atom
    atom   := NUMBER | 'x' | 'u' | '(' expr ')'

FUNC is one of exp, sin, cos, sqrt, abs, log.  Implicit multiplication is
not accepted.  Evaluation is vectorised over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import KernelEvaluationError, KernelSyntaxError, UnknownIdentifierError

__all__ = [
    "BUILTINS",
    "BinOp",
    "Call",
    "Kernel",
    "Neg",
    "Num",
    "Var",
    "eval_expr",
    "eval_kernel",
    "format_expr",
    "parse_kernel",
]

FUNCTIONS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "log": np.log,
}
VARIABLES = ("x", "u")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "KernelExpr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "KernelExpr"
    right: "KernelExpr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "KernelExpr"


KernelExpr = Union[Num, Var, Neg, BinOp, Call]


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
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise KernelSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str):
        tok = self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise KernelSyntaxError(f"expected {expected}, found {found}", tok.offset, self.text)

    def expect(self, text: str):
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        self.fail(repr(text))

    def is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> KernelExpr:
        if self.tok.kind == "end":
            self.fail("an expression")
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("an operator or end of input")
        return node

    def expr(self) -> KernelExpr:
        node = self.term()
        while self.is_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> KernelExpr:
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> KernelExpr:
        if self.is_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> KernelExpr:
        base = self.call()
        if self.is_op("^", "**"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def call(self) -> KernelExpr:
        tok = self.tok
        if tok.kind == "name" and tok.text in FUNCTIONS:
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(tok.text, arg)
        return self.atom()

    def atom(self) -> KernelExpr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if not np.isfinite(value):
                raise KernelSyntaxError(f"numeric literal {tok.text!r} overflows", tok.offset, self.text)
            return Num(value)
        if tok.kind == "name":
            if tok.text in VARIABLES:
                self.advance()
                return Var(tok.text)
            raise UnknownIdentifierError(
                f"unknown identifier {tok.text!r} (expected x, u or one of {', '.join(FUNCTIONS)})",
                tok.offset,
                self.text,
            )
        if self.is_op("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("a number, variable, function or '('")


def parse_kernel(text: str) -> KernelExpr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def _format_num(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_expr(node: KernelExpr, _top: bool = True) -> str:
    """Canonical text form; binary operations are parenthesised except at the top."""
    if isinstance(node, Num):
        return _format_num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + format_expr(node.operand, False)
    if isinstance(node, Call):
        return f"{node.func}({format_expr(node.arg, True)})"
    if isinstance(node, BinOp):
        left = format_expr(node.left, False)
        if node.op == "^" and isinstance(node.left, Neg):
            left = f"({left})"
        body = f"{left} {node.op} {format_expr(node.right, False)}"
        return body if _top else f"({body})"
    raise TypeError(f"not a kernel expression node: {node!r}")


def eval_expr(node: KernelExpr, x, u):
    """Evaluate an expression tree; ``x`` and ``u`` may be numpy arrays."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else u
    if isinstance(node, Neg):
        return -eval_expr(node.operand, x, u)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](eval_expr(node.arg, x, u))
    left = eval_expr(node.left, x, u)
    right = eval_expr(node.right, x, u)
    op = node.op
    if op == "+":
        return np.add(left, right)
    if op == "-":
        return np.subtract(left, right)
    if op == "*":
        return np.multiply(left, right)
    if op == "/":
        return np.divide(left, right)
    return np.power(left, right)


def _gaussian(x, u):
    return np.exp(-((u - x) ** 2))


def _cauchy(x, u):
    return 1 / (1 + (u - x) ** 2)


BUILTINS = {
    "gaussian": (_gaussian, "exp(-(u-x)^2)"),
    "cauchy": (_cauchy, "1/(1+(u-x)^2)"),
}


@dataclass(frozen=True)
class Kernel:
    """A built-in kernel or a parsed expression, plus its source text.

    Continuity is not checked; only finiteness at the sample points is.
    """

    source: str
    builtin: str | None = None
    expr: KernelExpr | None = None

    @classmethod
    def from_string(cls, text: str) -> Kernel:
        name = text.strip()
        if name in BUILTINS:
            return cls(source=name, builtin=name)
        return cls(source=text, expr=parse_kernel(text))

    @classmethod
    def gaussian(cls) -> Kernel:
        return cls(source="gaussian", builtin="gaussian")

    @classmethod
    def cauchy(cls) -> Kernel:
        return cls(source="cauchy", builtin="cauchy")

    def evaluate(self, x, u) -> np.ndarray:
        """Broadcasting evaluation without finiteness checks."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            if self.builtin is not None:
                value = BUILTINS[self.builtin][0](x, u)
            else:
                value = eval_expr(self.expr, x, u)
        return np.broadcast_to(np.asarray(value, dtype=float), np.broadcast_shapes(x.shape, u.shape))

    def __call__(self, x, u):
        return eval_kernel(self, x, u)


def eval_kernel(k: Kernel, x, u):
    """Evaluate ``k`` at (x, u), raising on any non-finite value."""
    value = k.evaluate(x, u)
    bad = ~np.isfinite(value)
    if bad.any():
        pos = np.unravel_index(np.argmax(bad), value.shape) if value.ndim else ()
        xb = np.broadcast_to(np.asarray(x, dtype=float), value.shape)[pos]
        ub = np.broadcast_to(np.asarray(u, dtype=float), value.shape)[pos]
        raise KernelEvaluationError(float(xb), float(ub), float(value[pos]), k.source)
    if value.ndim == 0:
        return float(value)
    return value
