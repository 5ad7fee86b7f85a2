"""Register expressions: constants, attribute reads and monoid operations.

Expressions are evaluated against a plain attribute mapping. Besides the
monoid operations there are three scalar helpers used by compiled
aggregates: ``one`` (the per-element map of count), ``div`` and ``sub``
(the finalizers of avg and range).
"""

from dataclasses import dataclass
from typing import Any, Tuple

from .aggregates import SCALAR_MONOIDS
from .errors import EvaluationError, UnboundAttribute
from .values import check_value, format_literal, is_numeric


class Expr:
    __slots__ = ()

    def attrs(self):
        """Attribute names read by the expression."""
        raise NotImplementedError

    def eval(self, attrs):
        raise NotImplementedError

    def substitute(self, mapping):
        """Replace attribute reads by the expressions in ``mapping``.

        Attributes missing from ``mapping`` are left untouched.
        """
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: Any

    def __post_init__(self):
        check_value(self.value)

    def attrs(self):
        return frozenset()

    def eval(self, attrs):
        return self.value

    def substitute(self, mapping):
        return self

    def __str__(self):
        return format_literal(self.value)


@dataclass(frozen=True)
class Attr(Expr):
    name: str

    def attrs(self):
        return frozenset((self.name,))

    def eval(self, attrs):
        try:
            return attrs[self.name]
        except KeyError:
            raise UnboundAttribute(self.name) from None

    def substitute(self, mapping):
        return mapping.get(self.name, self)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in SCALAR_MONOIDS:
            raise ValueError(f"unknown monoid operation {self.op!r}")

    def attrs(self):
        return self.left.attrs() | self.right.attrs()

    def eval(self, attrs):
        return SCALAR_MONOIDS[self.op].op(self.left.eval(attrs),
                                          self.right.eval(attrs))

    def substitute(self, mapping):
        return BinOp(self.op, self.left.substitute(mapping),
                     self.right.substitute(mapping))

    def __str__(self):
        if self.op == "sum":
            return f"({self.left} + {self.right})"
        return f"{self.op}({self.left}, {self.right})"


def _one(x):
    return None if x is None else 1


def _div(x, y):
    if x is None or y is None:
        return None
    if not (is_numeric(x) and is_numeric(y)):
        raise EvaluationError(f"div expects numbers, got {x!r}, {y!r}")
    if y == 0:
        raise EvaluationError("avg over an empty bag")
    return x / y


def _sub(x, y):
    if x is None or y is None:
        return None
    if not (is_numeric(x) and is_numeric(y)):
        raise EvaluationError(f"sub expects numbers, got {x!r}, {y!r}")
    return x - y


SCALAR_FUNCTIONS = {"one": (1, _one), "div": (2, _div), "sub": (2, _sub)}

# functions that may only appear in output assignments
FINALIZERS = frozenset(("div", "sub"))


@dataclass(frozen=True)
class Apply(Expr):
    fn: str
    args: Tuple[Expr, ...]

    def __post_init__(self):
        arity, _ = SCALAR_FUNCTIONS[self.fn]
        if len(self.args) != arity:
            raise ValueError(f"{self.fn} takes {arity} arguments")

    def attrs(self):
        out = frozenset()
        for a in self.args:
            out |= a.attrs()
        return out

    def eval(self, attrs):
        _, fn = SCALAR_FUNCTIONS[self.fn]
        return fn(*(a.eval(attrs) for a in self.args))

    def substitute(self, mapping):
        return Apply(self.fn, tuple(a.substitute(mapping) for a in self.args))

    def __str__(self):
        return f"{self.fn}({', '.join(map(str, self.args))})"


def uses_function(expr, names):
    if isinstance(expr, Apply):
        return expr.fn in names or any(uses_function(a, names) for a in expr.args)
    if isinstance(expr, BinOp):
        return uses_function(expr.left, names) or uses_function(expr.right, names)
    return False


def eval_expression(x, e):
    """Evaluate ``x`` over the attributes of event ``e``."""
    return x.eval(e.attrs)
