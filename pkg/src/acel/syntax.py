"""Abstract syntax of ACEL formulas and its pretty-printer.

The printer fully parenthesizes, so ``parse(str(f)) == f`` for every
formula the parser can produce.
"""

from dataclasses import dataclass
from typing import FrozenSet, Tuple, Union

from .predicates import MultisetPredicate, Predicate

Condition = Union[Predicate, MultisetPredicate]


class Formula:
    __slots__ = ()

    def children(self):
        return ()

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class EventType(Formula):
    name: str


@dataclass(frozen=True)
class AnyEvent(Formula):
    """Any single event, bound to the variable ``ANY``."""


ANY_VARIABLE = "ANY"


@dataclass(frozen=True)
class As(Formula):
    formula: Formula
    var: str

    def children(self):
        return (self.formula,)


@dataclass(frozen=True)
class Filter(Formula):
    formula: Formula
    var: str
    condition: Condition

    def children(self):
        return (self.formula,)


@dataclass(frozen=True)
class ProjectVars(Formula):
    formula: Formula
    variables: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "variables", frozenset(self.variables))

    def children(self):
        return (self.formula,)


@dataclass(frozen=True)
class ProjectAttrs(Formula):
    formula: Formula
    var: str
    attrs: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "attrs", tuple(self.attrs))

    def children(self):
        return (self.formula,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class Or(_Binary):
    pass


class And(_Binary):
    pass


class SeqContig(_Binary):
    """``left : right``, the right part starts right after the left ends."""


class SeqNonContig(_Binary):
    """``left ; right``, the right part starts after the left ends."""


@dataclass(frozen=True)
class _Unary(Formula):
    formula: Formula

    def children(self):
        return (self.formula,)


class IterContig(_Unary):
    """``φ(+)``: one or more contiguous repetitions."""


class IterNonContig(_Unary):
    """``φ+``: one or more repetitions, gaps allowed."""


@dataclass(frozen=True)
class AggBinding:
    target: str
    function: str
    source_var: str
    source_attr: str

    def __str__(self):
        return f"{self.target} <- {self.function} {self.source_var}({self.source_attr})"


@dataclass(frozen=True)
class Agg(Formula):
    formula: Formula
    target: str
    bindings: Tuple[AggBinding, ...]

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))
        if not self.bindings:
            raise ValueError("an aggregation needs at least one binding")
        names = [b.target for b in self.bindings]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate aggregate target attribute in {names}")

    def children(self):
        return (self.formula,)


# ------------------------------------------------------------------- sugar

@dataclass(frozen=True)
class FilterTerm:
    var: str
    condition: Condition


@dataclass(frozen=True)
class FilterAnd:
    left: "FilterExpr"
    right: "FilterExpr"


@dataclass(frozen=True)
class FilterOr:
    left: "FilterExpr"
    right: "FilterExpr"


FilterExpr = Union[FilterTerm, FilterAnd, FilterOr]


@dataclass(frozen=True)
class CompoundFilter(Formula):
    """FILTER with connectives between variable conditions."""

    formula: Formula
    condition: FilterExpr

    def children(self):
        return (self.formula,)


@dataclass(frozen=True)
class Next(Formula):
    """NEXT(R): an R event preceded only by events of other types."""

    type_name: str


SUGAR = (CompoundFilter, Next)


# ----------------------------------------------------------------- walking

def walk(f):
    yield f
    for c in f.children():
        yield from walk(c)


def _filter_terms(fe):
    if isinstance(fe, FilterTerm):
        yield fe
    else:
        yield from _filter_terms(fe.left)
        yield from _filter_terms(fe.right)


def variables_of(f):
    out = set()
    for node in walk(f):
        if isinstance(node, EventType):
            out.add(node.name)
        elif isinstance(node, AnyEvent):
            out.add(ANY_VARIABLE)
        elif isinstance(node, Next):
            out.add(node.type_name)
        elif isinstance(node, (As, Filter)):
            out.add(node.var)
        elif isinstance(node, ProjectAttrs):
            out.add(node.var)
        elif isinstance(node, ProjectVars):
            out |= node.variables
        elif isinstance(node, Agg):
            out.add(node.target)
            out |= {b.source_var for b in node.bindings}
        elif isinstance(node, CompoundFilter):
            out |= {t.var for t in _filter_terms(node.condition)}
    return frozenset(out)


def event_types_of(f):
    out = set()
    for node in walk(f):
        if isinstance(node, EventType):
            out.add(node.name)
        elif isinstance(node, Next):
            out.add(node.type_name)
    return frozenset(out)


def conditions_of(f):
    """Every filter condition in ``f``."""
    for node in walk(f):
        if isinstance(node, Filter):
            yield node.condition
        elif isinstance(node, CompoundFilter):
            for t in _filter_terms(node.condition):
                yield t.condition


def has_multiset_filter(f):
    return any(isinstance(c, MultisetPredicate) for c in conditions_of(f))


# ---------------------------------------------------------------- printing

def _pretty_filter(fe):
    if isinstance(fe, FilterTerm):
        return f"{fe.var}[{fe.condition}]"
    word = "AND" if isinstance(fe, FilterAnd) else "OR"
    return f"({_pretty_filter(fe.left)} {word} {_pretty_filter(fe.right)})"


def pretty(f):
    if isinstance(f, EventType):
        return f.name
    if isinstance(f, AnyEvent):
        return "ANY"
    if isinstance(f, Next):
        return f"NEXT({f.type_name})"
    if isinstance(f, As):
        return f"({pretty(f.formula)} AS {f.var})"
    if isinstance(f, Filter):
        return f"({pretty(f.formula)} FILTER {f.var}[{f.condition}])"
    if isinstance(f, CompoundFilter):
        return f"({pretty(f.formula)} FILTER {_pretty_filter(f.condition)})"
    if isinstance(f, ProjectVars):
        return f"PROJ[{', '.join(sorted(f.variables))}]({pretty(f.formula)})"
    if isinstance(f, ProjectAttrs):
        return f"PROJ {f.var}({', '.join(f.attrs)})({pretty(f.formula)})"
    if isinstance(f, Agg):
        binds = ", ".join(map(str, f.bindings))
        return f"AGG {f.target}[{binds}]({pretty(f.formula)})"
    if isinstance(f, IterContig):
        return f"({pretty(f.formula)})(+)"
    if isinstance(f, IterNonContig):
        return f"({pretty(f.formula)})+"
    ops = {Or: "OR", And: "AND", SeqContig: ":", SeqNonContig: ";"}
    for cls, word in ops.items():
        if type(f) is cls:
            return f"({pretty(f.left)} {word} {pretty(f.right)})"
    raise TypeError(f"not a formula: {f!r}")
