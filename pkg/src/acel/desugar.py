"""Rewrite sugared formulas into core constructors."""

import itertools
from dataclasses import fields, is_dataclass, replace

from .predicates import attr_cmp
from .syntax import (AnyEvent, As, CompoundFilter, EventType, Filter,
                     FilterAnd, FilterOr, FilterTerm, Formula, IterContig,
                     Next, Or, ProjectVars, SeqContig)


def _filters(f, fe):
    if isinstance(fe, FilterTerm):
        return Filter(f, fe.var, fe.condition)
    if isinstance(fe, FilterAnd):
        return _filters(_filters(f, fe.left), fe.right)
    if isinstance(fe, FilterOr):
        return Or(_filters(f, fe.left), _filters(f, fe.right))
    raise TypeError(f"not a filter expression: {fe!r}")


def expand_next(type_name, var):
    """(ANY AS var)(+) : R, every var event of another type, keep only R."""
    skipped = IterContig(As(AnyEvent(), var))
    body = Filter(SeqContig(skipped, EventType(type_name)), var,
                  attr_cmp("type", "!=", type_name))
    return Or(ProjectVars(body, frozenset((type_name,))), EventType(type_name))


def desugar(f):
    counter = itertools.count()

    def go(node):
        if isinstance(node, Next):
            return expand_next(node.type_name, f"$v{next(counter)}")
        if isinstance(node, CompoundFilter):
            return _filters(go(node.formula), node.condition)
        if not node.children():
            return node
        changes = {}
        for fld in fields(node):
            value = getattr(node, fld.name)
            if isinstance(value, Formula):
                changes[fld.name] = go(value)
        return replace(node, **changes)

    return go(f)
