"""Commutative monoids and the aggregate functions built on them.

Every binary operation is Null-absorbing. Sums over floats are folded with
``math.fsum`` so that the result does not depend on the order of the bag.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .errors import EvaluationError
from .values import is_numeric

INF = math.inf


def _numeric(v, what):
    if not is_numeric(v):
        raise EvaluationError(f"{what} expects numbers, got {v!r}")
    return v


def _sum2(x, y):
    if x is None or y is None:
        return None
    return _numeric(x, "sum") + _numeric(y, "sum")


def _pick(x, y, smaller):
    """The smaller (or larger) of x and y, independent of argument order.

    Equal values of different representation (0 and 0.0, or 0.0 and -0.0)
    resolve to the float, and for zeros to the sign min/max would pick.
    """
    if x != y:
        return x if (x < y) == smaller else y
    if isinstance(x, float) and isinstance(y, float) and x == 0:
        return x if (math.copysign(1.0, x) < 0) == smaller else y
    return x if isinstance(x, float) else y


def _min2(x, y):
    if x is None or y is None:
        return None
    return _pick(_numeric(x, "min"), _numeric(y, "min"), True)


def _max2(x, y):
    if x is None or y is None:
        return None
    return _pick(_numeric(x, "max"), _numeric(y, "max"), False)


def _fold_sum(values):
    if any(v is None for v in values):
        return None
    for v in values:
        _numeric(v, "sum")
    if all(isinstance(v, int) for v in values):
        return sum(values)
    return math.fsum(values)


def _fold_with(op, identity):
    def fold(values):
        if any(v is None for v in values):
            return None
        acc = identity
        for v in values:
            acc = op(acc, v)
        return acc
    return fold


@dataclass(frozen=True)
class Monoid:
    """A commutative monoid over values with a Null-absorbing operation."""

    name: str
    op: Callable[[Any, Any], Any]
    identity: Any
    fold_fn: Optional[Callable] = None

    def combine(self, x, y):
        return self.op(x, y)

    def fold(self, values):
        values = list(values)
        if self.fold_fn is not None:
            return self.fold_fn(values)
        return _fold_with(self.op, self.identity)(values)


SUM = Monoid("sum", _sum2, 0, _fold_sum)
MIN = Monoid("min", _min2, INF)
MAX = Monoid("max", _max2, -INF)

SCALAR_MONOIDS = {m.name: m for m in (SUM, MIN, MAX)}


def pair_monoid(name, first, second):
    """Componentwise product of two monoids; a Null pair absorbs."""

    def op(x, y):
        if x is None or y is None:
            return None
        return (first.op(x[0], y[0]), second.op(x[1], y[1]))

    def fold(values):
        if any(v is None for v in values):
            return None
        return (first.fold([v[0] for v in values]),
                second.fold([v[1] for v in values]))

    return Monoid(name, op, (first.identity, second.identity), fold)


def monoid_fold(m, values):
    return m.fold(values)


@dataclass(frozen=True)
class AggregateFunction:
    """f = finalize(fold of lift over the bag).

    With neither ``lift`` nor ``finalize`` the function is strong
    self-decomposable: it is the monoid fold itself.
    """

    name: str
    monoid: Monoid
    lift: Optional[Callable[[Any], Any]] = None
    finalize: Optional[Callable[[Any], Any]] = None

    @property
    def kind(self):
        if self.lift is None and self.finalize is None:
            return "strong"
        return "decomposable"

    def partial(self, values):
        lift = self.lift or (lambda v: v)
        return self.monoid.fold([lift(v) for v in values])

    def apply(self, values):
        h = self.partial(values)
        if self.finalize is None:
            return h
        return self.finalize(h)


def _one(v):
    return None if v is None else 1


def _avg_finalize(pair):
    if pair is None:
        return None
    total, count = pair
    if count == 0:
        raise EvaluationError("avg over an empty bag")
    return total / count


def _range_finalize(pair):
    if pair is None:
        return None
    hi, lo = pair
    return hi - lo


AVG_MONOID = pair_monoid("sum*sum", SUM, SUM)
RANGE_MONOID = pair_monoid("max*min", MAX, MIN)

_CATALOG = {
    "sum": AggregateFunction("sum", SUM),
    "min": AggregateFunction("min", MIN),
    "max": AggregateFunction("max", MAX),
    "count": AggregateFunction("count", SUM, lift=_one),
    "avg": AggregateFunction(
        "avg", AVG_MONOID,
        lift=lambda v: None if v is None else (_numeric(v, "avg"), 1),
        finalize=_avg_finalize),
    "range": AggregateFunction(
        "range", RANGE_MONOID,
        lift=lambda v: None if v is None else (_numeric(v, "range"),) * 2,
        finalize=_range_finalize),
}


def builtin_aggregates():
    return dict(_CATALOG)


def lookup_aggregate(name):
    """Case-insensitive catalog lookup; None when the name is unknown."""
    return _CATALOG.get(name.lower())


def aggregate_apply(f, values):
    return f.apply(values)
