"""Events, bags, complex events, schemas and streams."""

from collections import Counter
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import RenamingError
from .predicates import multiset_holds
from .values import canonical, check_value


class Event:
    """An immutable attribute mapping stamped with a time."""

    __slots__ = ("_attrs", "_time", "_hash")

    def __init__(self, attrs: Mapping = (), time: int = 0):
        attrs = dict(attrs)
        for k, v in attrs.items():
            if not isinstance(k, str):
                raise TypeError(f"attribute names must be strings: {k!r}")
            check_value(v)
        if not isinstance(time, int) or isinstance(time, bool) or time < 0:
            raise ValueError(f"event time must be a non-negative int: {time!r}")
        self._attrs = attrs
        self._time = time
        self._hash = None

    @property
    def attrs(self):
        return MappingProxyType(self._attrs)

    @property
    def time(self):
        return self._time

    @property
    def type(self):
        return self._attrs.get("type")

    def get(self, name):
        """e(a): the value of ``name``, Null when absent."""
        return self._attrs.get(name)

    def __contains__(self, name):
        return name in self._attrs

    def key(self):
        return (self._time, frozenset(self._attrs.items()))

    def sort_key(self):
        return (self._time, canonical_attrs(self._attrs))

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self._time == other._time and self._attrs == other._attrs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{k}: {v!r}" for k, v in sorted(self._attrs.items()))
        return f"Event@{self._time}{{{body}}}"


def canonical_attrs(attrs):
    return "{" + ",".join(f"{canonical(k)}:{canonical(attrs[k])}"
                          for k in sorted(attrs)) + "}"


class EventBag:
    """A multiset of events. Duplicates are kept; order is irrelevant."""

    __slots__ = ("_events", "_key")

    def __init__(self, events: Iterable[Event] = ()):
        self._events = tuple(events)
        self._key = None

    def key(self):
        if self._key is None:
            self._key = frozenset(Counter(self._events).items())
        return self._key

    def __iter__(self):
        return iter(self._events)

    def __len__(self):
        return len(self._events)

    def __bool__(self):
        return bool(self._events)

    def __add__(self, other):
        if not other:
            return self
        if not self:
            return other
        return EventBag(self._events + tuple(other))

    def map(self, fn):
        return EventBag(fn(e) for e in self._events)

    def count(self, event):
        return self._events.count(event)

    def sorted(self):
        return sorted(self._events, key=Event.sort_key)

    def __eq__(self, other):
        if not isinstance(other, EventBag):
            return NotImplemented
        return len(self) == len(other) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "{{" + ", ".join(map(repr, self.sorted())) + "}}"


EMPTY_BAG = EventBag()


class ComplexEvent:
    """An interval plus a valuation from variables to event bags.

    Variables bound to the empty bag are not stored, so a valuation is
    total over every variable universe.
    """

    __slots__ = ("start", "end", "_valuation", "_key", "_hash")

    def __init__(self, start: int, end: int, valuation: Mapping = ()):
        if not 0 <= start <= end:
            raise ValueError(f"bad interval [{start}, {end}]")
        self.start = start
        self.end = end
        val = {}
        for var, bag in dict(valuation).items():
            if not isinstance(bag, EventBag):
                bag = EventBag(bag)
            if bag:
                val[var] = bag
        self._valuation = val
        self._key = None
        self._hash = None

    @property
    def valuation(self):
        return MappingProxyType(self._valuation)

    def __getitem__(self, var):
        return self._valuation.get(var, EMPTY_BAG)

    def variables(self):
        return frozenset(self._valuation)

    def key(self):
        if self._key is None:
            self._key = (self.start, self.end,
                         frozenset((v, b.key()) for v, b in self._valuation.items()))
        return self._key

    def union(self, other):
        val = dict(self._valuation)
        for var, bag in other._valuation.items():
            val[var] = val[var] + bag if var in val else bag
        return ComplexEvent(min(self.start, other.start),
                            max(self.end, other.end), val)

    def project_vars(self, keep):
        return ComplexEvent(self.start, self.end,
                            {v: b for v, b in self._valuation.items() if v in keep})

    def replace(self, **bags):
        val = dict(self._valuation)
        val.update(bags)
        return ComplexEvent(self.start, self.end, val)

    def digest(self):
        """Canonical text of the valuation, used to order results."""
        parts = []
        for var in sorted(self._valuation):
            members = ",".join(f"{e.time}:{canonical_attrs(e.attrs)}"
                               for e in self._valuation[var].sorted())
            parts.append(f"{var}=[{members}]")
        return ";".join(parts)

    def sort_key(self):
        return (self.start, self.end, self.digest())

    def __eq__(self, other):
        if not isinstance(other, ComplexEvent):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{v}: {self._valuation[v]!r}" for v in sorted(self._valuation))
        return f"CE({self.start}, {self.end}, {{{body}}})"


# --------------------------------------------------------------- operations

def event_satisfies(e, p):
    return p.holds(e.attrs)


def bag_satisfies(b, p):
    return all(p.holds(e.attrs) for e in b)


def bag_satisfies_multiset(b, mp):
    return multiset_holds(mp, b)


def rename_event(r, e):
    """Apply renaming ``r`` (old name -> new name) to ``e``."""
    out = {}
    for a, b in r.items():
        if a not in e:
            raise RenamingError(f"renamed attribute {a!r} is missing")
        v = e.get(a)
        if b in out and out[b] != v:
            raise RenamingError(f"event inconsistent with renaming at {b!r}")
        out[b] = v
    return Event(out, e.time)


def update_event(e, base):
    """e >> base: attributes of ``e`` override those of ``base``."""
    attrs = dict(base.attrs)
    attrs.update(e.attrs)
    return Event(attrs, e.time)


def project_event_attrs(e, attrs):
    return Event({a: v for a, v in e.attrs.items() if a in attrs}, e.time)


def ce_union(c1, c2):
    return c1.union(c2)


def ce_project_vars(c, keep):
    return c.project_vars(frozenset(keep))


# ------------------------------------------------------------ schema/stream

class Schema(Mapping):
    """Event type -> the exact set of (non-type) attributes it carries."""

    def __init__(self, types: Mapping = ()):
        data = {}
        for name, attrs in dict(types).items():
            attrs = frozenset(attrs)
            bad = attrs & {"type", "time"}
            if bad:
                raise ValueError(f"type {name!r} declares reserved attribute(s) {sorted(bad)}")
            data[str(name)] = attrs
        self._data = data

    def __getitem__(self, name):
        return self._data[name]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def attributes(self):
        out = set()
        for attrs in self._data.values():
            out |= attrs
        return frozenset(out)

    def to_json(self):
        return {t: sorted(a) for t, a in sorted(self._data.items())}

    def __repr__(self):
        return f"Schema({self.to_json()!r})"


class Violation(NamedTuple):
    index: int
    reason: str


def make_stream(records):
    """Events from attribute mappings, timed by position."""
    return tuple(Event(r, i) for i, r in enumerate(records))


def validate_stream(stream, schema) -> Optional[Violation]:
    """First schema violation of ``stream``, or None when it conforms."""
    for i, e in enumerate(stream):
        if e.time != i:
            return Violation(i, f"time {e.time} where {i} was expected")
        t = e.get("type")
        if t is None:
            return Violation(i, "event has no type")
        if not isinstance(t, str):
            return Violation(i, f"type must be text, got {t!r}")
        if t not in schema:
            return Violation(i, f"type {t!r} is not in the schema")
        have = set(e.attrs) - {"type"}
        want = schema[t]
        if have != want:
            missing = sorted(want - have)
            extra = sorted(have - want)
            parts = []
            if missing:
                parts.append(f"missing {missing}")
            if extra:
                parts.append(f"unexpected {extra}")
            return Violation(i, f"{t} event " + ", ".join(parts))
    return None


def infer_schema(stream):
    """Schema of the attribute sets seen per type; first occurrence wins."""
    types = {}
    for e in stream:
        t = e.get("type")
        if isinstance(t, str) and t not in types:
            types[t] = frozenset(e.attrs) - {"type"}
    return Schema(types)
