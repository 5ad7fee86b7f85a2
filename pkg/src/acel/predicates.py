"""Per-event predicates and multiset predicates over bags."""

from dataclasses import dataclass

from .errors import UnboundAttribute
from .expressions import Attr, Const, Expr
from .values import COMPARISONS, compare, is_numeric, values_equal


class Predicate:
    __slots__ = ()

    def holds(self, attrs):
        """Evaluate over an attribute mapping; absent attributes read Null."""
        raise NotImplementedError

    def attrs(self):
        raise NotImplementedError

    def substitute(self, mapping):
        raise NotImplementedError

    def rename(self, renaming):
        """Rename attribute reads; ``renaming`` maps old to new names."""
        return self.substitute({a: Attr(b) for a, b in renaming.items()})


def _read(expr, attrs):
    try:
        return expr.eval(attrs)
    except UnboundAttribute:
        return None


@dataclass(frozen=True)
class TruePredicate(Predicate):
    def holds(self, attrs):
        return True

    def attrs(self):
        return frozenset()

    def substitute(self, mapping):
        return self

    def __str__(self):
        return "TRUE"


TRUE = TruePredicate()


@dataclass(frozen=True)
class Compare(Predicate):
    """``left op right`` where both sides are expressions.

    Parsed queries only produce attribute/literal operands; compiled
    automata substitute register expressions for attributes.
    """

    left: Expr
    op: str
    right: Expr

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def holds(self, attrs):
        return compare(self.op, _read(self.left, attrs), _read(self.right, attrs))

    def attrs(self):
        return self.left.attrs() | self.right.attrs()

    def substitute(self, mapping):
        return Compare(self.left.substitute(mapping), self.op,
                       self.right.substitute(mapping))

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class And(Predicate):
    left: Predicate
    right: Predicate

    def holds(self, attrs):
        return self.left.holds(attrs) and self.right.holds(attrs)

    def attrs(self):
        return self.left.attrs() | self.right.attrs()

    def substitute(self, mapping):
        return And(self.left.substitute(mapping), self.right.substitute(mapping))

    def __str__(self):
        return f"({self.left} AND {self.right})"


@dataclass(frozen=True)
class Or(Predicate):
    left: Predicate
    right: Predicate

    def holds(self, attrs):
        return self.left.holds(attrs) or self.right.holds(attrs)

    def attrs(self):
        return self.left.attrs() | self.right.attrs()

    def substitute(self, mapping):
        return Or(self.left.substitute(mapping), self.right.substitute(mapping))

    def __str__(self):
        return f"({self.left} OR {self.right})"


@dataclass(frozen=True)
class Not(Predicate):
    inner: Predicate

    def holds(self, attrs):
        return not self.inner.holds(attrs)

    def attrs(self):
        return self.inner.attrs()

    def substitute(self, mapping):
        return Not(self.inner.substitute(mapping))

    def __str__(self):
        return f"NOT ({self.inner})"


def attr_cmp(attr, op, literal):
    return Compare(Attr(attr), op, Const(literal))


def attr_attr_cmp(left, op, right):
    return Compare(Attr(left), op, Attr(right))


def type_is(name):
    return attr_cmp("type", "=", name)


def conjunction(preds):
    """Left-nested And of ``preds``; TRUE when empty (TRUE operands dropped)."""
    out = None
    for p in preds:
        if p == TRUE:
            continue
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disjunction(preds):
    preds = list(preds)
    if not preds:
        return Not(TRUE)
    out = preds[0]
    for p in preds[1:]:
        out = Or(out, p)
    return out


def substitute_closed(pred, mapping):
    """Substitute every attribute of ``pred``; unmapped ones become Null."""
    full = {a: Const(None) for a in pred.attrs()}
    full.update(mapping)
    return pred.substitute(full)


# ---------------------------------------------------------------- multiset

class MultisetPredicate:
    __slots__ = ()


@dataclass(frozen=True)
class SameAttr(MultisetPredicate):
    attr: str

    def __str__(self):
        return self.attr


@dataclass(frozen=True)
class Increasing(MultisetPredicate):
    attr: str

    def __str__(self):
        return f"increasing({self.attr})"


@dataclass(frozen=True)
class Decreasing(MultisetPredicate):
    attr: str

    def __str__(self):
        return f"decreasing({self.attr})"


def _strict(values_lo, values_hi, decreasing):
    for x in values_lo:
        for y in values_hi:
            if not (is_numeric(x) and is_numeric(y)):
                return False
            if decreasing and not x > y:
                return False
            if not decreasing and not x < y:
                return False
    return True


def multiset_holds(mp, events):
    events = list(events)
    if len(events) <= 1:
        return True
    if isinstance(mp, SameAttr):
        vals = [e.get(mp.attr) for e in events]
        if any(v is None for v in vals):
            return False
        return all(values_equal(vals[0], v) for v in vals[1:])
    if isinstance(mp, (Increasing, Decreasing)):
        by_time = {}
        for e in events:
            by_time.setdefault(e.time, []).append(e.get(mp.attr))
        times = sorted(by_time)
        # successors are events at consecutive distinct times
        return all(
            _strict(by_time[t0], by_time[t1], isinstance(mp, Decreasing))
            for t0, t1 in zip(times, times[1:]))
    raise TypeError(f"not a multiset predicate: {mp!r}")

