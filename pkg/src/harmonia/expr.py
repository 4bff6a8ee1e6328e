"""Single-variable expressions: parsing, printing, evaluation, differentiation.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
    func   := 'ln' | 'exp' | 'abs'

Unary minus binds looser than ``^`` so ``-x^2`` is ``-(x^2)``, and ``^`` is
right-associative (``2^3^2`` is ``2^(3^2)``).  Exponents may carry a sign,
as in ``x^-1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

__all__ = [
    "Const",
    "Var",
    "Unary",
    "Binary",
    "Expr",
    "FunctionSpec",
    "ExprError",
    "ExprSyntaxError",
    "DomainError",
    "parse",
    "parse_expr",
    "to_source",
    "derivative",
    "fold",
    "evaluate",
    "evaluate_array",
    "eval",
    "eval_derivative",
]

UNARY_OPS = ("neg", "ln", "exp", "abs")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("ln", "exp", "abs")


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Malformed source text.  ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class DomainError(ExprError):
    """Evaluation left the mathematical domain of a sub-expression."""

    def __init__(self, message: str, node: "Expr | None" = None, point: float | None = None):
        where = ""
        if node is not None:
            where += f" in '{to_source(node)}'"
        if point is not None:
            where += f" at x={point!r}"
        super().__init__(message + where)
        self.node = node
        self.point = point


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


Expr = Union[Const, Var, Unary, Binary]

X = Var()
ZERO = Const(0.0)
ONE = Const(1.0)


def is_constant(e: Expr) -> bool:
    """True if the tree does not mention ``x``."""
    if isinstance(e, Const):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Unary):
        return is_constant(e.arg)
    return is_constant(e.left) and is_constant(e.right)


# ---------------------------------------------------------------------------
# Scalar primitives.  Shared by evaluation and constant folding so that a
# folded tree reproduces the unfolded result bit for bit.


def _ln(u: float) -> float:
    if not u > 0.0:
        raise DomainError("ln of non-positive value")
    return math.log(u)


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        raise DomainError("exp overflow") from None


def _div(u: float, v: float) -> float:
    if v == 0.0:
        raise DomainError("division by zero")
    return u / v


def _pow(u: float, v: float) -> float:
    if not float(v).is_integer():
        if u < 0.0:
            raise DomainError("non-integer power of negative base")
        if u == 0.0 and v < 0.0:
            raise DomainError("negative power of zero")
    elif u == 0.0 and v < 0.0:
        raise DomainError("negative power of zero")
    try:
        return math.pow(u, v)
    except OverflowError:
        raise DomainError("power overflow") from None


_SCALAR_UNARY: dict[str, Callable[[float], float]] = {
    "neg": lambda u: -u,
    "ln": _ln,
    "exp": _exp,
    "abs": abs,
}

_SCALAR_BINARY: dict[str, Callable[[float, float], float]] = {
    "add": lambda u, v: u + v,
    "sub": lambda u, v: u - v,
    "mul": lambda u, v: u * v,
    "div": _div,
    "pow": _pow,
}


# ---------------------------------------------------------------------------
# Smart constructors: constant folding plus the identities 0+e, e+0, e-0,
# 1*e, e*1, e/1, e^1.  Nothing else is simplified.


def _try_fold(fn, *args):
    try:
        value = fn(*args)
    except DomainError:
        return None
    if not math.isfinite(value):
        return None
    return Const(value)


def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def make_unary(op: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        folded = _try_fold(_SCALAR_UNARY[op], arg.value)
        if folded is not None:
            return folded
    return Unary(op, arg)


def make_binary(op: str, left: Expr, right: Expr) -> Expr:
    if isinstance(left, Const) and isinstance(right, Const):
        folded = _try_fold(_SCALAR_BINARY[op], left.value, right.value)
        if folded is not None:
            return folded
    if op == "add":
        if _is(left, 0.0):
            return right
        if _is(right, 0.0):
            return left
    elif op == "sub":
        if _is(right, 0.0):
            return left
    elif op == "mul":
        if _is(left, 1.0):
            return right
        if _is(right, 1.0):
            return left
    elif op in ("div", "pow"):
        if _is(right, 1.0):
            return left
    return Binary(op, left, right)


def fold(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the folding constructors."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Unary):
        return make_unary(e.op, fold(e.arg))
    return make_binary(e.op, fold(e.left), fold(e.right))


def _add(u, v):
    return make_binary("add", u, v)


def _sub(u, v):
    return make_binary("sub", u, v)


def _mul(u, v):
    return make_binary("mul", u, v)


def _quot(u, v):
    return make_binary("div", u, v)


def _power(u, v):
    return make_binary("pow", u, v)


# ---------------------------------------------------------------------------
# Differentiation


def derivative(e: Expr) -> Expr:
    """Symbolic d/dx of ``e``."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Unary):
        u, du = e.arg, derivative(e.arg)
        if e.op == "neg":
            return make_unary("neg", du)
        if e.op == "ln":
            return _quot(du, u)
        if e.op == "exp":
            return _mul(make_unary("exp", u), du)
        # d|u| = u/|u| * du, undefined where u = 0
        return _mul(_quot(u, make_unary("abs", u)), du)

    u, v = e.left, e.right
    du, dv = derivative(u), derivative(v)
    if e.op == "add":
        return _add(du, dv)
    if e.op == "sub":
        return _sub(du, dv)
    if e.op == "mul":
        return _add(_mul(du, v), _mul(u, dv))
    if e.op == "div":
        return _quot(_sub(_mul(du, v), _mul(u, dv)), _power(v, Const(2.0)))
    # pow
    if is_constant(v):
        return _mul(_mul(v, _power(u, _sub(v, ONE))), du)
    # d(u^v) = u^v * (v' ln u + v u'/u)
    return _mul(e, _add(_mul(dv, make_unary("ln", u)), _quot(_mul(v, du), u)))


# ---------------------------------------------------------------------------
# Printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM = 5
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _prec(e: Expr) -> int:
    if isinstance(e, Const):
        return _ATOM if e.value >= 0 else _PREC["neg"]
    if isinstance(e, Var):
        return _ATOM
    if isinstance(e, Unary):
        return _PREC["neg"] if e.op == "neg" else _ATOM
    return _PREC[e.op]


def _wrap(e: Expr, parens: bool) -> str:
    s = to_source(e)
    return f"({s})" if parens else s


def to_source(e: Expr) -> str:
    """Print ``e`` in the parser's grammar with minimal parentheses."""
    if isinstance(e, Const):
        return repr(e.value) if math.isfinite(e.value) else f"({e.value!r})"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + _wrap(e.arg, _prec(e.arg) < _PREC["neg"])
        return f"{e.op}({to_source(e.arg)})"
    p = _PREC[e.op]
    sym = _SYMBOL[e.op]
    if e.op == "pow":
        left = _wrap(e.left, _prec(e.left) < _ATOM)
        right = _wrap(e.right, _prec(e.right) < _PREC["neg"])
        return f"{left}^{right}"
    left = _wrap(e.left, _prec(e.left) < p)
    right = _wrap(e.right, _prec(e.right) <= p)
    return f"{left} {sym} {right}"


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(source):
            if source[pos:].strip() == "":
                break
            m = _TOKEN.match(source, pos)
            if m is None:
                start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
                raise ExprSyntaxError(f"unexpected character {source[start]!r}", self._offset(start))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def _offset(self, index: int) -> int:
        return len(self.source[:index].encode("utf-8"))

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", self._offset(len(self.source)))
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        tok = self.peek()
        if not self.accept(op):
            where = self._offset(tok[2]) if tok else self._offset(len(self.source))
            found = repr(tok[1]) if tok else "end of input"
            raise ExprSyntaxError(f"expected {op!r}, found {found}", where)

    def parse(self) -> Expr:
        if not self.tokens:
            raise ExprSyntaxError("empty expression", 0)
        e = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", self._offset(tok[2]))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Binary("add", e, self.term())
            elif self.accept("-"):
                e = Binary("sub", e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Binary("mul", e, self.unary())
            elif self.accept("/"):
                e = Binary("div", e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, start = self.next()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text == "x":
                return X
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", self._offset(start))
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {text!r}", self._offset(start))


def parse_expr(source: str) -> Expr:
    """Parse ``source`` into an unfolded tree."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation


def _compile(e: Expr) -> Callable[[float], float]:
    """Compile to nested closures; each closure checks its own domain."""
    if isinstance(e, Const):
        value = e.value
        return lambda x: value
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Unary):
        arg = _compile(e.arg)
        fn = _SCALAR_UNARY[e.op]
        if e.op == "neg":
            return lambda x: -arg(x)

        def unary(x, node=e):
            try:
                return fn(arg(x))
            except DomainError as exc:
                if exc.node is None:
                    raise DomainError(str(exc), node, x) from None
                raise

        return unary
    left, right = _compile(e.left), _compile(e.right)
    if e.op == "add":
        return lambda x: left(x) + right(x)
    if e.op == "sub":
        return lambda x: left(x) - right(x)
    if e.op == "mul":
        return lambda x: left(x) * right(x)
    fn = _SCALAR_BINARY[e.op]

    def binary(x, node=e):
        try:
            return fn(left(x), right(x))
        except DomainError as exc:
            if exc.node is None:
                raise DomainError(str(exc), node, x) from None
            raise

    return binary


def evaluate(e: Expr, x: float) -> float:
    """Evaluate ``e`` at ``x`` by walking the tree (no compilation cache)."""
    result = _compile(e)(float(x))
    if not math.isfinite(result):
        raise DomainError("non-finite result", e, x)
    return result


def _array_eval(e: Expr, xs: np.ndarray) -> np.ndarray:
    if isinstance(e, Const):
        return np.full_like(xs, e.value)
    if isinstance(e, Var):
        return xs
    if isinstance(e, Unary):
        u = _array_eval(e.arg, xs)
        if e.op == "neg":
            return -u
        if e.op == "abs":
            return np.abs(u)
        if e.op == "ln":
            bad = ~(u > 0.0)
            if bad.any():
                raise DomainError("ln of non-positive value", e, float(xs[bad][0]))
            return np.log(u)
        with np.errstate(over="ignore"):
            out = np.exp(u)
        bad = ~np.isfinite(out)
        if bad.any():
            raise DomainError("exp overflow", e, float(xs[bad][0]))
        return out
    u = _array_eval(e.left, xs)
    v = _array_eval(e.right, xs)
    if e.op == "add":
        return u + v
    if e.op == "sub":
        return u - v
    if e.op == "mul":
        return u * v
    if e.op == "div":
        bad = v == 0.0
        if bad.any():
            raise DomainError("division by zero", e, float(xs[bad][0]))
        return u / v
    integral = v == np.round(v)
    bad = (~integral & (u < 0.0)) | ((u == 0.0) & (v < 0.0))
    if bad.any():
        raise DomainError("invalid power", e, float(xs[bad][0]))
    with np.errstate(over="ignore"):
        out = np.power(u, v)
    bad = ~np.isfinite(out)
    if bad.any():
        raise DomainError("power overflow", e, float(xs[bad][0]))
    return out


def evaluate_array(e: Expr, xs) -> np.ndarray:
    """Vectorised evaluation; raises :class:`DomainError` on the first bad point."""
    xs = np.asarray(xs, dtype=float)
    out = np.asarray(_array_eval(e, xs), dtype=float)
    bad = ~np.isfinite(out)
    if bad.any():
        raise DomainError("non-finite result", e, float(xs[bad][0]))
    return out


# ---------------------------------------------------------------------------
# FunctionSpec


@dataclass(frozen=True)
class FunctionSpec:
    """A parsed function ``f`` together with its symbolic derivative."""

    source: str
    body: Expr
    derivative: Expr = field(compare=False)

    @classmethod
    def from_expr(cls, body: Expr, source: str | None = None) -> "FunctionSpec":
        return cls(source if source is not None else to_source(body), body, derivative(body))

    @cached_property
    def _f(self) -> Callable[[float], float]:
        return _compile(self.body)

    @cached_property
    def _df(self) -> Callable[[float], float]:
        return _compile(self.derivative)

    def __call__(self, x: float) -> float:
        return eval(self, x)

    def prime(self, x: float) -> float:
        return eval_derivative(self, x)

    def values(self, xs) -> np.ndarray:
        return evaluate_array(self.body, xs)

    def derivative_values(self, xs) -> np.ndarray:
        return evaluate_array(self.derivative, xs)

    def negated(self) -> "FunctionSpec":
        return FunctionSpec.from_expr(Unary("neg", self.body), f"-({self.source})")

    def abs_derivative_power(self, q: float) -> "FunctionSpec":
        """The function ``|f'|^q``."""
        body = Binary("pow", Unary("abs", self.derivative), Const(float(q)))
        return FunctionSpec.from_expr(body, f"abs({to_source(self.derivative)})^{q!r}")

    def __getstate__(self):
        return {"source": self.source, "body": self.body, "derivative": self.derivative}

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)


def parse(source: str) -> FunctionSpec:
    """Parse ``source`` and differentiate it symbolically.

    >>> fs = parse("x^2*ln(x)")
    >>> round(eval_derivative(fs, 2.0), 8)
    4.77258872
    """
    body = parse_expr(source)
    return FunctionSpec(source, body, derivative(body))


def eval(fs: FunctionSpec, x: float) -> float:  # noqa: A001
    x = float(x)
    result = fs._f(x)
    if not math.isfinite(result):
        raise DomainError("non-finite result", fs.body, x)
    return result


def eval_derivative(fs: FunctionSpec, x: float) -> float:
    x = float(x)
    result = fs._df(x)
    if not math.isfinite(result):
        raise DomainError("non-finite result", fs.derivative, x)
    return result
