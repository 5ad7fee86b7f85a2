"""Reference interpreter: the event-based denotational semantics.

``evaluate`` computes the full result set of every subformula over the
whole stream, bottom-up. It is exhaustive by design and only meant for
short streams. ``evaluate_positions`` implements the older semantics where
variables capture sets of stream positions, for the CEL fragment.
"""

from collections import defaultdict

from .aggregates import lookup_aggregate
from .errors import EvaluationError, UnsupportedFeature
from .model import (ComplexEvent, Event, EventBag, bag_satisfies,
                    bag_satisfies_multiset, project_event_attrs)
from .predicates import MultisetPredicate
from .syntax import (ANY_VARIABLE, Agg, And, AnyEvent, As, CompoundFilter,
                     EventType, Filter, FilterAnd, FilterOr, FilterTerm,
                     IterContig, IterNonContig, Next, Or, ProjectAttrs,
                     ProjectVars, SeqContig, SeqNonContig)


def _satisfies(ce, var, cond):
    if isinstance(cond, MultisetPredicate):
        return bag_satisfies_multiset(ce[var], cond)
    return bag_satisfies(ce[var], cond)


def _satisfies_expr(ce, fe):
    if isinstance(fe, FilterTerm):
        return _satisfies(ce, fe.var, fe.condition)
    if isinstance(fe, FilterAnd):
        return _satisfies_expr(ce, fe.left) and _satisfies_expr(ce, fe.right)
    if isinstance(fe, FilterOr):
        return _satisfies_expr(ce, fe.left) or _satisfies_expr(ce, fe.right)
    raise TypeError(fe)


def _join(lefts, rights, contiguous):
    by_start = defaultdict(list)
    for c in rights:
        by_start[c.start].append(c)
    starts = sorted(by_start)
    out = set()
    for c1 in lefts:
        if contiguous:
            cands = by_start.get(c1.end + 1, ())
        else:
            cands = [c for s in starts if s > c1.end for c in by_start[s]]
        for c2 in cands:
            out.add(c1.union(c2))
    return out


def _iterate(base, contiguous):
    result = set(base)
    frontier = set(base)
    while frontier:
        new = _join(base, frontier, contiguous) - result
        result |= new
        frontier = new
    return result


def _aggregate_event(ce, bindings):
    attrs = {}
    for b in bindings:
        fn = lookup_aggregate(b.function)
        if fn is None:
            raise EvaluationError(f"unknown aggregate {b.function!r}")
        attrs[b.target] = fn.apply([e.get(b.source_attr) for e in ce[b.source_var]])
    return Event(attrs, ce.end)


def _next_direct(stream, type_name):
    out = set()
    for j, e in enumerate(stream):
        if e.get("type") != type_name:
            continue
        i = j
        while True:
            out.add(ComplexEvent(i, j, {type_name: EventBag((e,))}))
            if i == 0 or stream[i - 1].get("type") == type_name:
                break
            i -= 1
    return out


class _Evaluator:
    def __init__(self, stream):
        self.stream = tuple(stream)
        self.cache = {}

    def eval(self, f):
        try:
            return self.cache[f]
        except KeyError:
            pass
        result = frozenset(self._eval(f))
        self.cache[f] = result
        return result

    def _eval(self, f):
        s = self.stream
        if isinstance(f, EventType):
            return {ComplexEvent(i, i, {f.name: EventBag((e,))})
                    for i, e in enumerate(s) if e.get("type") == f.name}
        if isinstance(f, AnyEvent):
            return {ComplexEvent(i, i, {ANY_VARIABLE: EventBag((e,))})
                    for i, e in enumerate(s)}
        if isinstance(f, As):
            out = set()
            for c in self.eval(f.formula):
                bag = EventBag()
                for v in sorted(c.variables()):
                    bag = bag + c[v]
                out.add(c.replace(**{f.var: bag}))
            return out
        if isinstance(f, Filter):
            return {c for c in self.eval(f.formula)
                    if _satisfies(c, f.var, f.condition)}
        if isinstance(f, CompoundFilter):
            return {c for c in self.eval(f.formula)
                    if _satisfies_expr(c, f.condition)}
        if isinstance(f, ProjectVars):
            return {c.project_vars(f.variables) for c in self.eval(f.formula)}
        if isinstance(f, ProjectAttrs):
            keep = frozenset(f.attrs)
            return {c.replace(**{f.var: c[f.var].map(
                        lambda e: project_event_attrs(e, keep))})
                    for c in self.eval(f.formula)}
        if isinstance(f, Or):
            return self.eval(f.left) | self.eval(f.right)
        if isinstance(f, And):
            return self.eval(f.left) & self.eval(f.right)
        if isinstance(f, SeqContig):
            return _join(self.eval(f.left), self.eval(f.right), True)
        if isinstance(f, SeqNonContig):
            return _join(self.eval(f.left), self.eval(f.right), False)
        if isinstance(f, IterContig):
            return _iterate(self.eval(f.formula), True)
        if isinstance(f, IterNonContig):
            return _iterate(self.eval(f.formula), False)
        if isinstance(f, Agg):
            out = set()
            for c in self.eval(f.formula):
                e = _aggregate_event(c, f.bindings)
                out.add(c.replace(**{f.target: c[f.target] + EventBag((e,))}))
            return out
        if isinstance(f, Next):
            return _next_direct(s, f.type_name)
        raise TypeError(f"not a formula: {f!r}")


def evaluate(f, stream):
    """All complex events of ``f`` over ``stream``, as a frozenset."""
    return _Evaluator(stream).eval(f)


# --------------------------------------------------- position-based semantics

class PositionComplexEvent:
    """An interval with variables mapped to sets of stream positions."""

    __slots__ = ("start", "end", "_positions", "_key")

    def __init__(self, start, end, positions=()):
        self.start = start
        self.end = end
        self._positions = {v: frozenset(p) for v, p in dict(positions).items() if p}
        for ps in self._positions.values():
            if not all(start <= k <= end for k in ps):
                raise ValueError("positions outside the interval")
        self._key = (start, end, frozenset(self._positions.items()))

    @property
    def positions(self):
        return dict(self._positions)

    def __getitem__(self, var):
        return self._positions.get(var, frozenset())

    def __eq__(self, other):
        return isinstance(other, PositionComplexEvent) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        body = ", ".join(f"{v}: {sorted(p)}" for v, p in sorted(self._positions.items()))
        return f"PCE({self.start}, {self.end}, {{{body}}})"


def positions_to_events(p, stream):
    val = {}
    for var, ks in p.positions.items():
        for k in ks:
            if not 0 <= k < len(stream):
                raise IndexError(f"position {k} outside the stream")
        val[var] = EventBag(stream[k] for k in sorted(ks))
    return ComplexEvent(p.start, p.end, val)


_CEL = (EventType, As, Filter, Or, And, SeqContig, SeqNonContig,
        IterContig, IterNonContig, ProjectVars, AnyEvent)


def _support(mu):
    out = frozenset()
    for ps in mu.values():
        out |= ps
    return out


def _freeze(mu):
    return frozenset((v, p) for v, p in mu.items() if p)


class _PositionEvaluator:
    """Tables of valuations indexed by their exact interval (i, j)."""

    def __init__(self, stream):
        self.stream = tuple(stream)
        self.cache = {}

    def table(self, f):
        if f not in self.cache:
            self.cache[f] = self._table(f)
        return self.cache[f]

    def _holds(self, mu, var, pred):
        return all(pred.holds(self.stream[k].attrs) for k in mu.get(var, ()))

    def _split_join(self, t1, t2, contiguous):
        # (i, j, mu1 ∪ mu2) for mu1 over [i, k] and mu2 over [k', j]
        out = defaultdict(set)
        by_start = defaultdict(list)
        for (i2, j2), mus in t2.items():
            by_start[i2].append((j2, mus))
        for (i, k), mus1 in t1.items():
            if contiguous:
                nexts = [k + 1]
            else:
                nexts = [s for s in by_start if s > k]
            for k2 in nexts:
                for j, mus2 in by_start.get(k2, ()):
                    for m1 in mus1:
                        d1 = dict(m1)
                        for m2 in mus2:
                            mu = dict(d1)
                            for v, ps in m2:
                                mu[v] = mu.get(v, frozenset()) | ps
                            out[(i, j)].add(_freeze(mu))
        return out

    def _closure(self, t, contiguous):
        result = defaultdict(set, {k: set(v) for k, v in t.items()})
        frontier = t
        while frontier:
            joined = self._split_join(t, frontier, contiguous)
            new = defaultdict(set)
            for key, mus in joined.items():
                fresh = mus - result[key]
                if fresh:
                    new[key] = fresh
                    result[key] |= fresh
            frontier = new
        return result

    def _table(self, f):
        s = self.stream
        if isinstance(f, EventType):
            return {(j, j): {_freeze({f.name: frozenset((j,))})}
                    for j, e in enumerate(s) if e.get("type") == f.name}
        if isinstance(f, AnyEvent):
            return {(j, j): {_freeze({ANY_VARIABLE: frozenset((j,))})}
                    for j in range(len(s))}
        if isinstance(f, As):
            out = {}
            for key, mus in self.table(f.formula).items():
                out[key] = set()
                for m in mus:
                    mu = dict(m)
                    mu[f.var] = _support(mu)
                    out[key].add(_freeze(mu))
            return out
        if isinstance(f, Filter):
            if isinstance(f.condition, MultisetPredicate):
                raise UnsupportedFeature("multiset predicates are outside the CEL fragment")
            out = {}
            for key, mus in self.table(f.formula).items():
                kept = {m for m in mus if self._holds(dict(m), f.var, f.condition)}
                if kept:
                    out[key] = kept
            return out
        if isinstance(f, ProjectVars):
            return {key: {_freeze({v: p for v, p in m if v in f.variables}) for m in mus}
                    for key, mus in self.table(f.formula).items()}
        if isinstance(f, (Or, And)):
            t1, t2 = self.table(f.left), self.table(f.right)
            out = {}
            for key in set(t1) | set(t2):
                a, b = t1.get(key, set()), t2.get(key, set())
                mus = a | b if isinstance(f, Or) else a & b
                if mus:
                    out[key] = mus
            return out
        if isinstance(f, (SeqContig, SeqNonContig)):
            return dict(self._split_join(self.table(f.left), self.table(f.right),
                                         isinstance(f, SeqContig)))
        if isinstance(f, (IterContig, IterNonContig)):
            return dict(self._closure(self.table(f.formula), isinstance(f, IterContig)))
        raise UnsupportedFeature(f"{type(f).__name__} is outside the CEL fragment")


def evaluate_positions(f, stream):
    for node in _walk(f):
        if not isinstance(node, _CEL):
            raise UnsupportedFeature(f"{type(node).__name__} is outside the CEL fragment")
    table = _PositionEvaluator(stream).table(f)
    return frozenset(PositionComplexEvent(i, j, dict(m))
                     for (i, j), mus in table.items() for m in mus)


def _walk(f):
    yield f
    for c in f.children():
        yield from _walk(c)
