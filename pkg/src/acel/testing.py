"""Random streams, formulas and automata for differential testing."""

import os
import random

from . import predicates as P
from .automata import Cea, CeaTransition
from .expressions import Const
from .model import Schema, make_stream
from .syntax import (Agg, AggBinding, And, As, CompoundFilter, EventType,
                     Filter, FilterAnd, FilterOr, FilterTerm, IterContig,
                     IterNonContig, Next, Or, ProjectAttrs, ProjectVars,
                     SeqContig, SeqNonContig, conditions_of, event_types_of,
                     walk)

DEFAULT_SEED = 20240601


def seed_from_env(default=DEFAULT_SEED):
    """The ACEL_SEED environment variable, or ``default``."""
    raw = os.environ.get("ACEL_SEED")
    return int(raw) if raw else default


# ------------------------------------------------------------------ streams

def random_stream(rng, schema, domains, length, null_rate=0.1):
    """Events of random schema types; each attribute draws from its domain
    (0..9 by default) and is Null with probability ``null_rate``."""
    types = sorted(schema)
    records = []
    for _ in range(length):
        t = rng.choice(types)
        rec = {"type": t}
        for a in sorted(schema[t]):
            if rng.random() < null_rate:
                rec[a] = None
            else:
                rec[a] = rng.choice(domains.get(a, range(10)))
        records.append(rec)
    return make_stream(records)


def _compare_literals(pred):
    if isinstance(pred, P.Compare):
        for side, other in ((pred.left, pred.right), (pred.right, pred.left)):
            if isinstance(side, Const) and other.attrs():
                for a in other.attrs():
                    yield a, side.value
    elif isinstance(pred, (P.And, P.Or)):
        yield from _compare_literals(pred.left)
        yield from _compare_literals(pred.right)
    elif isinstance(pred, P.Not):
        yield from _compare_literals(pred.inner)


def referenced_attributes(f):
    out = set()
    for c in conditions_of(f):
        if isinstance(c, P.Predicate):
            out |= c.attrs()
        else:
            out.add(c.attr)
    for node in walk(f):
        if isinstance(node, Agg):
            out |= {b.source_attr for b in node.bindings}
        elif isinstance(node, ProjectAttrs):
            out |= set(node.attrs)
    return out - {"type"}


def stream_profile(f, min_types=2):
    """A schema and value domains that exercise the literals of ``f``.

    Every type used by ``f`` carries every attribute ``f`` mentions.
    Numeric attributes draw from 0..9 plus the numbers compared against
    them; text attributes draw from their literals plus one other word.
    """
    types = sorted(event_types_of(f))
    n = 0
    while len(types) < min_types:
        types.append(f"Z{n}")
        n += 1
    attrs = referenced_attributes(f)
    literals = {}
    for c in conditions_of(f):
        if isinstance(c, P.Predicate):
            for a, v in _compare_literals(c):
                literals.setdefault(a, set()).add(v)
    domains = {}
    for a in attrs:
        lits = {v for v in literals.get(a, ()) if v is not None}
        texts = sorted(v for v in lits if isinstance(v, str))
        if texts:
            domains[a] = texts + ["other"]
        else:
            nums = set(range(10)) | {v for v in lits if not isinstance(v, str)}
            domains[a] = sorted(nums)
    schema = Schema({t: attrs for t in types})
    return schema, domains


# ----------------------------------------------------------------- formulas

CMP = ("=", "!=", "<", "<=", ">", ">=")


def random_predicate(rng, attrs, depth=1):
    roll = rng.random()
    if depth > 0 and roll < 0.15:
        return P.And(random_predicate(rng, attrs, depth - 1),
                     random_predicate(rng, attrs, depth - 1))
    if depth > 0 and roll < 0.25:
        return P.Or(random_predicate(rng, attrs, depth - 1),
                    random_predicate(rng, attrs, depth - 1))
    if depth > 0 and roll < 0.3:
        return P.Not(random_predicate(rng, attrs, depth - 1))
    if roll < 0.35:
        return P.TRUE
    a = rng.choice(attrs)
    if roll < 0.45 and len(attrs) > 1:
        return P.attr_attr_cmp(a, rng.choice(CMP), rng.choice(attrs))
    return P.attr_cmp(a, rng.choice(CMP), rng.randrange(10))


class FormulaGenerator:
    """Random formulas over a fixed vocabulary of types and variables."""

    def __init__(self, rng, types=("A", "B", "C"), variables=("X", "Y"),
                 attrs=("a", "b"), agg=False, project_attrs=False,
                 conj=True, sugar=False, multiset=False):
        self.rng = rng
        self.types = list(types)
        self.variables = list(variables)
        self.attrs = list(attrs)
        self.agg = agg
        self.project_attrs = project_attrs
        self.conj = conj
        self.sugar = sugar
        self.multiset = multiset
        self.agg_names = ["sum", "min", "max", "count", "avg", "range"]

    def names(self):
        return self.types + self.variables

    def formula(self, depth):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            if self.sugar and rng.random() < 0.25:
                return Next(rng.choice(self.types))
            return EventType(rng.choice(self.types))
        kinds = ["as", "filter", "or", "seq", "contig", "plus", "iter", "projv"]
        if self.conj:
            kinds.append("and")
        if self.agg:
            kinds += ["agg", "agg"]
        if self.project_attrs:
            kinds.append("proja")
        if self.sugar:
            kinds += ["cfilter", "cfilter"]
        kind = rng.choice(kinds)
        sub = lambda: self.formula(depth - 1)  # noqa: E731
        if kind == "as":
            return As(sub(), rng.choice(self.variables))
        if kind == "filter":
            return Filter(sub(), rng.choice(self.names()), self.condition())
        if kind == "or":
            return Or(sub(), sub())
        if kind == "and":
            # intersections of unrelated formulas are mostly empty; reuse a side
            left = sub()
            right = left if rng.random() < 0.3 else sub()
            if rng.random() < 0.5:
                right = Filter(right, rng.choice(self.names()), self.condition())
            return And(left, right)
        if kind == "seq":
            return SeqNonContig(sub(), sub())
        if kind == "contig":
            return SeqContig(sub(), sub())
        if kind == "plus":
            return IterNonContig(sub())
        if kind == "iter":
            return IterContig(sub())
        if kind == "projv":
            names = self.names()
            keep = frozenset(n for n in names if rng.random() < 0.6)
            return ProjectVars(sub(), keep)
        if kind == "proja":
            keep = tuple(a for a in self.attrs + ["type"] if rng.random() < 0.5)
            return ProjectAttrs(sub(), rng.choice(self.names()), keep)
        if kind == "agg":
            n = 1 if rng.random() < 0.7 else 2
            bindings = []
            for k in range(n):
                bindings.append(AggBinding(
                    f"g{k}", rng.choice(self.agg_names),
                    rng.choice(self.names()), rng.choice(self.attrs)))
            return Agg(sub(), rng.choice(self.variables), tuple(bindings))
        if kind == "cfilter":
            return CompoundFilter(sub(), self.filter_expr(2))
        raise AssertionError(kind)

    def condition(self):
        if self.multiset and self.rng.random() < 0.2:
            cls = self.rng.choice([P.SameAttr, P.Increasing, P.Decreasing])
            return cls(self.rng.choice(self.attrs))
        return random_predicate(self.rng, self.attrs + ["g0"] if self.agg else self.attrs)

    def filter_expr(self, depth):
        roll = self.rng.random()
        if depth > 0 and roll < 0.3:
            return FilterAnd(self.filter_expr(depth - 1), self.filter_expr(depth - 1))
        if depth > 0 and roll < 0.55:
            return FilterOr(self.filter_expr(depth - 1), self.filter_expr(depth - 1))
        return FilterTerm(self.rng.choice(self.names()), self.condition())

    def schema(self, types=None):
        return Schema({t: self.attrs for t in (types or self.types)})


# --------------------------------------------------------------------- CEA

def random_cea(rng, schema, variables=("X", "Y"), max_states=4, max_transitions=7):
    n = rng.randint(1, max_states)
    states = list(range(n))
    attrs = sorted(schema.attributes()) or ["a"]
    types = sorted(schema)
    ts = []
    for _ in range(rng.randint(0, max_transitions)):
        pred = random_predicate(rng, attrs)
        if rng.random() < 0.5:
            pred = P.conjunction([pred, P.type_is(rng.choice(types))])
        marks = frozenset(v for v in variables if rng.random() < 0.4)
        ts.append(CeaTransition(rng.choice(states), pred, marks, rng.choice(states)))
    finals = frozenset(s for s in states if rng.random() < 0.5) or {states[-1]}
    return Cea(frozenset(states), tuple(ts), 0, finals)


def make_rng(*parts):
    """A Random seeded from the base seed and a test-specific label."""
    return random.Random("/".join(map(str, (seed_from_env(),) + parts)))
