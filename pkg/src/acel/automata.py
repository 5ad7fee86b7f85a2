"""Aggregation complex event automata (ACEA) and plain CEA.

An ACEA transition reads the next event ``e`` and the register event
``nu``, computes ``nu' = sigma(e >> nu)``, requires the predicate to hold
on ``nu'`` and emits, for every variable X and output assignment r in
lambda(X), the event r(nu') stamped with the current position.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import FrozenSet, Mapping, Optional, Tuple

from .errors import UnboundAttribute
from .expressions import Expr, FINALIZERS, uses_function
from .model import ComplexEvent, Event, EventBag, update_event
from .predicates import TRUE, Predicate
from .semantics import PositionComplexEvent

EMPTY_REGISTERS = Event()


def assignment_inputs(sigma):
    out = frozenset()
    for expr in sigma.values():
        out |= expr.attrs()
    return out


def apply_assignment(sigma, e):
    """The register event with attributes dom(sigma); time is irrelevant."""
    attrs = e.attrs
    return Event({a: x.eval(attrs) for a, x in sigma.items()})


def _frozen(mapping):
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True, eq=False)
class Transition:
    source: int
    assignment: Mapping[str, Expr]
    predicate: Predicate
    output: Mapping[str, Tuple[Mapping[str, Expr], ...]]
    target: int
    inputs: FrozenSet[str] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "assignment", _frozen(self.assignment))
        out = {}
        for var, rs in dict(self.output).items():
            rs = tuple(_frozen(r) for r in rs)
            if rs:
                out[var] = rs
        object.__setattr__(self, "output", _frozen(out))
        object.__setattr__(self, "inputs", assignment_inputs(self.assignment))
        for x in self.assignment.values():
            if uses_function(x, FINALIZERS):
                raise ValueError("finalizers may only appear in output assignments")
        regs = set(self.assignment)
        for rs in self.output.values():
            for r in rs:
                for x in r.values():
                    missing = x.attrs() - regs
                    if missing:
                        raise ValueError(f"output reads unassigned registers {sorted(missing)}")

    def marks(self):
        return bool(self.output)

    def with_(self, **changes):
        values = dict(source=self.source, assignment=self.assignment,
                      predicate=self.predicate, output=self.output,
                      target=self.target)
        values.update(changes)
        return Transition(**values)


@dataclass(frozen=True, eq=False)
class Acea:
    states: FrozenSet[int]
    transitions: Tuple[Transition, ...]
    initial: int
    finals: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.initial not in self.states:
            raise ValueError("initial state is not a state")
        if not self.finals <= self.states:
            raise ValueError("final states must be states")
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise ValueError(f"transition {t.source}->{t.target} leaves the state set")

    def outgoing(self):
        out = defaultdict(list)
        for t in self.transitions:
            out[t.source].append(t)
        return out

    def registers(self):
        out = set()
        for t in self.transitions:
            out |= set(t.assignment)
        return frozenset(out)


@dataclass(frozen=True)
class Configuration:
    state: int
    registers: Event = EMPTY_REGISTERS


def acea_step(c, e, t) -> Optional[Configuration]:
    """Take transition ``t`` on event ``e``; None when inapplicable."""
    extended = update_event(e, c.registers)
    if not t.inputs <= extended.attrs.keys():
        return None
    try:
        nu = apply_assignment(t.assignment, extended)
    except UnboundAttribute:
        return None
    if not t.predicate.holds(nu.attrs):
        return None
    return Configuration(t.target, nu)


def emitted_events(t, registers, k):
    attrs = registers.attrs
    return tuple((var, Event({a: x.eval(attrs) for a, x in r.items()}, k))
                 for var, rs in t.output.items() for r in rs)


def _complex_event(i, j, emitted):
    val = defaultdict(list)
    for var, e in emitted:
        val[var].append(e)
    return ComplexEvent(i, j, {v: EventBag(es) for v, es in val.items()})


def acea_enumerate(a, stream):
    """Every complex event produced by an accepting run, as a frozenset.

    Runs are explored breadth-first per start position; partial runs with
    the same state, registers and emitted events are merged since they
    have identical continuations.
    """
    stream = tuple(stream)
    out_of = a.outgoing()
    results = set()
    for i in range(len(stream)):
        frontier = {(a.initial, EMPTY_REGISTERS, ())}
        for k in range(i, len(stream)):
            e = stream[k]
            nxt = set()
            for q, regs, emitted in frontier:
                conf = Configuration(q, regs)
                for t in out_of.get(q, ()):
                    c2 = acea_step(conf, e, t)
                    if c2 is None:
                        continue
                    em = emitted + emitted_events(t, c2.registers, k) if t.output else emitted
                    nxt.add((t.target, c2.registers, em))
                    if t.target in a.finals:
                        results.add(_complex_event(i, k, em))
            frontier = nxt
            if not frontier:
                break
    return frozenset(results)


# -------------------------------------------------------------------- dump

def _fmt_output(r):
    return "{" + ", ".join(f"{a}<-{r[a]}" for a in sorted(r)) + "}"


def dump_acea(a):
    """Deterministic text listing of an automaton."""
    lines = ["ACEA",
             "states: " + " ".join(f"q{s}" for s in sorted(a.states)),
             f"initial: q{a.initial}",
             "final: " + " ".join(f"q{s}" for s in sorted(a.finals))]
    order = sorted(range(len(a.transitions)),
                   key=lambda n: (a.transitions[n].source, a.transitions[n].target, n))
    for n in order:
        t = a.transitions[n]
        lines.append(f"transition q{t.source} -> q{t.target}")
        for reg in sorted(t.assignment):
            lines.append(f"  {reg} <- {t.assignment[reg]}")
        if t.predicate != TRUE:
            lines.append(f"  if {t.predicate}")
        for var in sorted(t.output):
            for r in t.output[var]:
                lines.append(f"  {var} += {_fmt_output(r)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------- CEA

@dataclass(frozen=True)
class CeaTransition:
    source: int
    predicate: Predicate
    variables: FrozenSet[str]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "variables", frozenset(self.variables))


@dataclass(frozen=True)
class Cea:
    states: FrozenSet[int]
    transitions: Tuple[CeaTransition, ...]
    initial: int
    finals: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.initial not in self.states or not self.finals <= self.states:
            raise ValueError("initial and final states must be states")


def cea_enumerate(a, stream):
    stream = tuple(stream)
    out_of = defaultdict(list)
    for t in a.transitions:
        out_of[t.source].append(t)
    results = set()
    for i in range(len(stream)):
        frontier = {(a.initial, frozenset())}
        for k in range(i, len(stream)):
            attrs = stream[k].attrs
            nxt = set()
            for q, marks in frontier:
                for t in out_of.get(q, ()):
                    if not t.predicate.holds(attrs):
                        continue
                    m2 = marks | {(v, k) for v in t.variables}
                    nxt.add((t.target, m2))
                    if t.target in a.finals:
                        pos = defaultdict(set)
                        for v, p in m2:
                            pos[v].add(p)
                        results.add(PositionComplexEvent(i, k, pos))
            frontier = nxt
            if not frontier:
                break
    return frozenset(results)
