"""The scalar value domain: int, float, str and None (Null)."""

import json
import operator

from .errors import EvaluationError

COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")

_ORDER = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def is_numeric(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def is_value(v):
    return v is None or isinstance(v, str) or is_numeric(v)


def check_value(v):
    if not is_value(v):
        raise TypeError(f"not a scalar value: {v!r}")
    return v


def values_equal(x, y):
    """Equality atom: Null equals only Null, text never equals a number."""
    if x is None or y is None:
        return x is None and y is None
    if is_numeric(x) != is_numeric(y):
        return False
    return x == y


def compare(op, x, y):
    if op == "=":
        return values_equal(x, y)
    if op == "!=":
        return not values_equal(x, y)
    try:
        fn = _ORDER[op]
    except KeyError:
        raise ValueError(f"unknown comparison {op!r}") from None
    if x is None or y is None:
        return False
    if not (is_numeric(x) and is_numeric(y)):
        raise EvaluationError(f"cannot order {x!r} {op} {y!r}")
    return fn(x, y)


def canonical(v):
    """Stable text form of a value, used for sorting and digests."""
    return json.dumps(v)


def format_literal(v):
    """Literal as it appears in query text."""
    if v is None:
        return "NULL"
    if isinstance(v, str):
        return json.dumps(v)
    return repr(v)
