"""Reading streams and schemas, writing and reading result lines."""

import json

from .errors import StreamError
from .model import ComplexEvent, Event, EventBag, Schema, validate_stream
from .values import is_value


def parse_stream_lines(lines):
    """Events from NDJSON lines; blank lines are skipped."""
    events = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line, parse_constant=_reject_constant)
        except ValueError as exc:
            raise StreamError(f"line {lineno}: invalid JSON ({exc})") from None
        if not isinstance(rec, dict):
            raise StreamError(f"line {lineno}: expected an object")
        if "type" not in rec:
            raise StreamError(f"line {lineno}: missing required key 'type'")
        if not isinstance(rec["type"], str):
            raise StreamError(f"line {lineno}: 'type' must be a string")
        for k, v in rec.items():
            if not is_value(v):
                raise StreamError(f"line {lineno}: attribute {k!r} has unsupported value {v!r}")
        events.append(Event(rec, len(events)))
    return tuple(events)


def _reject_constant(name):
    raise ValueError(f"{name} is not allowed in streams")


def read_stream(path):
    with open(path, encoding="utf-8") as fh:
        return parse_stream_lines(fh)


def parse_schema(obj):
    if not isinstance(obj, dict):
        raise StreamError("schema must be an object of type -> attribute list")
    types = {}
    for t, attrs in obj.items():
        if not isinstance(attrs, list) or not all(isinstance(a, str) for a in attrs):
            raise StreamError(f"schema entry {t!r} must be a list of attribute names")
        types[t] = attrs
    try:
        return Schema(types)
    except ValueError as exc:
        raise StreamError(str(exc)) from None


def read_schema(path):
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except ValueError as exc:
            raise StreamError(f"invalid schema JSON ({exc})") from None
    return parse_schema(obj)


def infer_schema_strict(stream):
    """First occurrence of each type fixes its attributes; later events of
    that type with other attributes are a validation error."""
    types = {}
    for e in stream:
        attrs = frozenset(e.attrs) - {"type"}
        t = e.type
        if t not in types:
            types[t] = attrs
        elif types[t] != attrs:
            raise StreamError(
                f"{t} event has attributes {sorted(attrs)}, earlier ones had {sorted(types[t])}",
                e.time)
    return Schema(types)


def check_stream(stream, schema):
    v = validate_stream(stream, schema)
    if v is not None:
        raise StreamError(v.reason, v.index)


# ------------------------------------------------------------------ results

def complex_event_to_json(ce):
    valuation = {}
    for var in sorted(ce.variables()):
        valuation[var] = [{"time": e.time, "attrs": {k: e.attrs[k] for k in sorted(e.attrs)}}
                          for e in ce[var].sorted()]
    return {"start": ce.start, "end": ce.end, "valuation": valuation}


def dump_complex_event(ce):
    return json.dumps(complex_event_to_json(ce), separators=(",", ":"))


def complex_event_from_json(obj):
    val = {}
    for var, members in obj["valuation"].items():
        val[var] = EventBag(Event(m["attrs"], m["time"]) for m in members)
    return ComplexEvent(obj["start"], obj["end"], val)


def parse_complex_event(line):
    return complex_event_from_json(json.loads(line))


def sorted_results(results):
    return sorted(results, key=ComplexEvent.sort_key)


def dump_results(results):
    """One line per complex event, in canonical order."""
    return "".join(dump_complex_event(c) + "\n" for c in sorted_results(results))


def read_results(path):
    with open(path, encoding="utf-8") as fh:
        return frozenset(parse_complex_event(line) for line in fh if line.strip())
