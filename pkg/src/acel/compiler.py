"""Translation of ACEL formulas (and of plain CEA) into ACEA.

Each case follows the inductive construction operator by operator. Every
sub-automaton gets its own states and registers from a shared allocator,
so registers of different subformulas never collide. Register names start
with ``$``, which query text cannot contain.
"""

import itertools
import warnings
from collections import Counter, deque

from .aggregates import lookup_aggregate
from .automata import Acea, Transition
from .desugar import desugar
from .errors import ExtensionWarning, UnsupportedFeature
from .expressions import Apply, Attr, BinOp, Const
from .model import Schema
from .predicates import (TRUE, Compare, MultisetPredicate, conjunction,
                         disjunction, substitute_closed)
from .syntax import (ANY_VARIABLE, Agg, And, AnyEvent, As, EventType, Filter,
                     IterContig, IterNonContig, Or, ProjectAttrs, ProjectVars,
                     SeqContig, SeqNonContig, SUGAR, walk)


class CompilationContext:
    """Schema plus fresh-name allocators for states and registers."""

    def __init__(self, schema):
        self.schema = schema if isinstance(schema, Schema) else Schema(schema)
        self._states = itertools.count()
        self._groups = itertools.count()

    def state(self):
        return next(self._states)

    def register_group(self):
        """Prefix of a fresh group of registers, e.g. ``$r3``."""
        return f"$r{next(self._groups)}"


# ------------------------------------------------------------------ helpers

def _copy_transition(base_attrs, prefix, type_name, variable):
    """Assignment, guard and output for reading one event of ``type_name``."""
    attrs = sorted(base_attrs | {"type"})
    regs = {a: f"{prefix}.{a}" for a in attrs}
    sigma = {regs[a]: Attr(a) for a in attrs}
    guard = Compare(Attr(regs["type"]), "=", Const(type_name))
    output = {variable: ({a: Attr(regs[a]) for a in attrs},)}
    return sigma, guard, output


def _redirect(ts, into, target):
    return [t.with_(target=target) for t in ts if t.target in into]


def _wait_loop(state):
    return Transition(state, {}, TRUE, {}, state)


def _restart_copies(a, new_state):
    """Copies of the initial transitions leaving ``new_state``; the ones
    that complete a match also loop back to ``new_state``."""
    starts = [t.with_(source=new_state) for t in a.transitions if t.source == a.initial]
    return starts + _redirect(starts, a.finals, new_state)


def _has_incoming(a, state):
    return any(t.target == state for t in a.transitions)


def fresh_initial(a, ctx):
    """An equivalent automaton whose initial state has no incoming edges."""
    if not _has_incoming(a, a.initial):
        return a
    q = ctx.state()
    starts = [t.with_(source=q) for t in a.transitions if t.source == a.initial]
    finals = a.finals | ({q} if a.initial in a.finals else set())
    return Acea(a.states | {q}, a.transitions + tuple(starts), q, finals)


def normalize_acea(a, ctx=None):
    """Fresh initial state with only outgoing transitions and a single
    fresh final state with only incoming transitions."""
    if ctx is None:
        base = max(a.states) + 1
        ctx_states = iter(itertools.count(base))
        new_state = lambda: next(ctx_states)  # noqa: E731
    else:
        new_state = ctx.state
    q0, qf = new_state(), new_state()
    starts = [t.with_(source=q0) for t in a.transitions if t.source == a.initial]
    everything = list(a.transitions) + starts
    ends = _redirect(everything, a.finals, qf)
    return Acea(a.states | {q0, qf}, everything + ends, q0, {qf})


def trim(a):
    """Drop states that are unreachable or cannot reach a final state."""
    fwd, bwd = {}, {}
    for t in a.transitions:
        fwd.setdefault(t.source, set()).add(t.target)
        bwd.setdefault(t.target, set()).add(t.source)

    def closure(seeds, edges):
        seen = set(seeds)
        todo = deque(seeds)
        while todo:
            s = todo.popleft()
            for n in edges.get(s, ()):
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
        return seen

    live = closure([a.initial], fwd) & closure(a.finals, bwd)
    live.add(a.initial)
    ts = tuple(t for t in a.transitions if t.source in live and t.target in live)
    return Acea(live, ts, a.initial, a.finals & live)


def _schema_of(rs):
    return Counter(frozenset(r) for r in rs)


def _equivalent_outputs(l1, l2):
    if set(l1) != set(l2):
        return False
    return all(_schema_of(l1[v]) == _schema_of(l2[v]) for v in l1)


def _iso_predicate(l1, l2):
    """Some bijection between the output bags makes paired events equal."""
    parts = []
    for var in sorted(l1):
        r1, r2 = l1[var], l2[var]
        options = []
        for perm in itertools.permutations(range(len(r2))):
            if any(set(r1[n]) != set(r2[m]) for n, m in enumerate(perm)):
                continue
            atoms = [Compare(r1[n][a], "=", r2[m][a])
                     for n, m in enumerate(perm) for a in sorted(r1[n])]
            options.append(conjunction(atoms))
        if TRUE in options:
            continue
        parts.append(disjunction(options))
    return conjunction(parts)


# ---------------------------------------------------------- aggregate plans

class _AggPlan:
    """Registers, per-step updates and the output value of one binding."""

    def __init__(self, binding, prefix):
        self.binding = binding
        name = binding.function
        fn = lookup_aggregate(name)
        if fn is None:
            raise UnsupportedFeature(f"unknown aggregate {name!r}")
        reg = f"{prefix}.{binding.target}"
        one = lambda x: Apply("one", (x,))  # noqa: E731
        same = lambda x: x  # noqa: E731
        # (register, monoid op, identity, per-element map)
        if name in ("sum", "min", "max"):
            self.parts = [(reg, name, fn.monoid.identity, same)]
            self.value = Attr(reg)
        elif name == "count":
            self.parts = [(reg, "sum", 0, one)]
            self.value = Attr(reg)
        elif name == "avg":
            s, n = reg + ".sum", reg + ".count"
            self.parts = [(s, "sum", 0, same), (n, "sum", 0, one)]
            self.value = Apply("div", (Attr(s), Attr(n)))
        elif name == "range":
            hi, lo = reg + ".max", reg + ".min"
            self.parts = [(hi, "max", float("-inf"), same), (lo, "min", float("inf"), same)]
            self.value = Apply("sub", (Attr(hi), Attr(lo)))
        else:
            raise UnsupportedFeature(f"aggregate {name!r} has no compiled form")
        self.extension = name in ("avg", "range")

    def updates(self, t, is_init):
        rs = t.output.get(self.binding.source_var, ())
        attr = self.binding.source_attr
        if any(attr not in r for r in rs):
            # some marked event lacks the attribute: it reads as Null
            return {reg: Const(None) for reg, *_ in self.parts}
        out = {}
        for reg, op, identity, lift in self.parts:
            terms = [lift(r[attr].substitute(dict(t.assignment))) for r in rs]
            if not is_init:
                terms.insert(0, Attr(reg))
            if not terms:
                out[reg] = Const(identity)
                continue
            acc = terms[0]
            for x in terms[1:]:
                acc = BinOp(op, acc, x)
            out[reg] = acc
        return out


# ---------------------------------------------------------------- compiler

class _Compiler:
    def __init__(self, ctx, warn=True):
        self.ctx = ctx
        self.warn = warn

    def build(self, f):
        method = getattr(self, "_" + type(f).__name__, None)
        if method is None:
            raise UnsupportedFeature(f"cannot compile {type(f).__name__}")
        return method(f)

    def _EventType(self, f):
        p1, p2 = self.ctx.state(), self.ctx.state()
        attrs = self.ctx.schema.get(f.name, frozenset())
        sigma, guard, out = _copy_transition(attrs, self.ctx.register_group(), f.name, f.name)
        return Acea({p1, p2}, (Transition(p1, sigma, guard, out, p2),), p1, {p2})

    def _AnyEvent(self, f):
        p1, p2 = self.ctx.state(), self.ctx.state()
        prefix = self.ctx.register_group()
        ts = []
        for name in sorted(self.ctx.schema):
            sigma, guard, out = _copy_transition(self.ctx.schema[name], prefix,
                                                 name, ANY_VARIABLE)
            ts.append(Transition(p1, sigma, guard, out, p2))
        return Acea({p1, p2}, ts, p1, {p2})

    def _As(self, f):
        a = self.build(f.formula)
        ts = []
        for t in a.transitions:
            if t.marks():
                out = dict(t.output)
                out[f.var] = tuple(r for rs in t.output.values() for r in rs)
                t = t.with_(output=out)
            ts.append(t)
        return Acea(a.states, ts, a.initial, a.finals)

    def _Filter(self, f):
        if isinstance(f.condition, MultisetPredicate):
            raise UnsupportedFeature(
                f"multiset predicate {f.var}[{f.condition}] is evaluated by the oracle only")
        a = self.build(f.formula)
        ts = []
        for t in a.transitions:
            rs = t.output.get(f.var, ())
            if rs:
                checks = [substitute_closed(f.condition, dict(r)) for r in rs]
                t = t.with_(predicate=conjunction([t.predicate] + checks))
            ts.append(t)
        return Acea(a.states, ts, a.initial, a.finals)

    def _ProjectVars(self, f):
        a = self.build(f.formula)
        ts = [t.with_(output={v: rs for v, rs in t.output.items() if v in f.variables})
              for t in a.transitions]
        return Acea(a.states, ts, a.initial, a.finals)

    def _ProjectAttrs(self, f):
        a = self.build(f.formula)
        keep = set(f.attrs)
        ts = []
        for t in a.transitions:
            if f.var in t.output:
                out = dict(t.output)
                out[f.var] = tuple({k: x for k, x in r.items() if k in keep}
                                   for r in t.output[f.var])
                t = t.with_(output=out)
            ts.append(t)
        return Acea(a.states, ts, a.initial, a.finals)

    def _Or(self, f):
        a1, a2 = self.build(f.left), self.build(f.right)
        q0 = self.ctx.state()
        starts = [t.with_(source=q0) for a in (a1, a2)
                  for t in a.transitions if t.source == a.initial]
        return Acea(a1.states | a2.states | {q0},
                    a1.transitions + a2.transitions + tuple(starts),
                    q0, a1.finals | a2.finals)

    def _And(self, f):
        a1, a2 = self.build(f.left), self.build(f.right)
        out1, out2 = a1.outgoing(), a2.outgoing()
        ids = {}

        def state(pair):
            if pair not in ids:
                ids[pair] = self.ctx.state()
                todo.append(pair)
            return ids[pair]

        todo = deque()
        start = state((a1.initial, a2.initial))
        ts = []
        while todo:
            p1, p2 = pair = todo.popleft()
            for t1 in out1.get(p1, ()):
                for t2 in out2.get(p2, ()):
                    if not _equivalent_outputs(t1.output, t2.output):
                        continue
                    guard = conjunction([t1.predicate, t2.predicate,
                                         _iso_predicate(t1.output, t2.output)])
                    sigma = dict(t1.assignment)
                    sigma.update(t2.assignment)
                    target = state((t1.target, t2.target))
                    ts.append(Transition(ids[pair], sigma, guard, t1.output, target))
        finals = {s for (p1, p2), s in ids.items() if p1 in a1.finals and p2 in a2.finals}
        return Acea(set(ids.values()), ts, start, finals)

    def _sequence(self, f, wait):
        a1 = self.build(f.left)
        a2 = fresh_initial(self.build(f.right), self.ctx)
        ts = list(a1.transitions) + list(a2.transitions)
        ts += _redirect(a1.transitions, a1.finals, a2.initial)
        if wait:
            ts.append(_wait_loop(a2.initial))
        return Acea(a1.states | a2.states, ts, a1.initial, a2.finals)

    def _SeqNonContig(self, f):
        return self._sequence(f, wait=True)

    def _SeqContig(self, f):
        return self._sequence(f, wait=False)

    def _iteration(self, f, wait):
        a = self.build(f.formula)
        q = self.ctx.state()
        ts = list(a.transitions)
        ts += _redirect(a.transitions, a.finals, q)
        ts += _restart_copies(a, q)
        if wait:
            ts.append(_wait_loop(q))
        return Acea(a.states | {q}, ts, a.initial, a.finals)

    def _IterNonContig(self, f):
        return self._iteration(f, wait=True)

    def _IterContig(self, f):
        return self._iteration(f, wait=False)

    def _Agg(self, f):
        a = normalize_acea(trim(self.build(f.formula)), self.ctx)
        prefix = self.ctx.register_group()
        plans = [_AggPlan(b, prefix) for b in f.bindings]
        if self.warn and any(p.extension for p in plans):
            warnings.warn(
                f"aggregate(s) {[p.binding.function for p in plans if p.extension]} "
                "compile to an output finalizer outside pure renamings",
                ExtensionWarning, stacklevel=3)
        result = {p.binding.target: p.value for p in plans}
        ts = []
        for t in a.transitions:
            is_init = t.source == a.initial
            sigma = dict(t.assignment)
            for p in plans:
                sigma.update(p.updates(t, is_init))
            out = dict(t.output)
            if t.target in a.finals:
                out[f.target] = out.get(f.target, ()) + (result,)
            ts.append(t.with_(assignment=sigma, output=out))
        return Acea(a.states, ts, a.initial, a.finals)


def check_compilable(f):
    for node in walk(f):
        if isinstance(node, Filter) and isinstance(node.condition, MultisetPredicate):
            raise UnsupportedFeature(
                f"multiset predicate {node.var}[{node.condition}] is evaluated by the oracle only")
        if isinstance(node, Agg):
            for b in node.bindings:
                if lookup_aggregate(b.function) is None:
                    raise UnsupportedFeature(f"unknown aggregate {b.function!r}")


def compile_formula(f, schema, ctx=None, warn=True):
    """Compile ``f`` (desugared first) into an ACEA over ``schema``.

    Aggregates outside the native register support (avg, range) raise an
    ExtensionWarning unless ``warn`` is false.
    """
    f = desugar(f)
    check_compilable(f)
    ctx = ctx or CompilationContext(schema)
    return trim(_Compiler(ctx, warn).build(f))


compile = compile_formula  # noqa: A001  (public name used by the CLI docs)


def cea_to_acea(a, schema):
    """Embed a CEA: registers hold a copy of the current event."""
    schema = schema if isinstance(schema, Schema) else Schema(schema)
    ts = []
    for t in a.transitions:
        for name in sorted(schema):
            attrs = sorted(schema[name] | {"type"})
            regs = {x: f"$e.{x}" for x in attrs}
            sigma = {regs[x]: Attr(x) for x in attrs}
            guard = conjunction([
                substitute_closed(t.predicate, {x: Attr(regs[x]) for x in attrs}),
                Compare(Attr(regs["type"]), "=", Const(name))])
            inverse = {x: Attr(regs[x]) for x in attrs}
            out = {v: (inverse,) for v in sorted(t.variables)}
            ts.append(Transition(t.source, sigma, guard, out, t.target))
    return Acea(a.states, ts, a.initial, a.finals)
