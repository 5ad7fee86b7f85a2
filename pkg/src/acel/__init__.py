"""ACEL: complex event queries with aggregation, a reference evaluator and
a compiler to register automata."""

from .aggregates import aggregate_apply, builtin_aggregates, lookup_aggregate
from .automata import (Acea, Cea, CeaTransition, Configuration, Transition,
                       acea_enumerate, acea_step, cea_enumerate, dump_acea)
from .compiler import cea_to_acea, compile_formula, normalize_acea
from .desugar import desugar
from .errors import (AcelError, EvaluationError, ExtensionWarning, ParseError,
                     RenamingError, StreamError, UnboundAttribute,
                     UnsupportedFeature)
from .io import (dump_results, parse_complex_event, read_results, read_schema,
                 read_stream)
from .model import ComplexEvent, Event, EventBag, Schema, make_stream
from .parser import parse_predicate, parse_query
from .semantics import evaluate, evaluate_positions
from .syntax import pretty

__all__ = [
    "Acea", "AcelError", "Cea", "CeaTransition", "ComplexEvent", "Configuration",
    "EvaluationError", "Event", "EventBag", "ExtensionWarning", "ParseError",
    "RenamingError", "Schema", "StreamError", "Transition", "UnboundAttribute",
    "UnsupportedFeature", "acea_enumerate", "acea_step", "aggregate_apply",
    "builtin_aggregates", "cea_enumerate", "cea_to_acea", "compile_formula",
    "desugar", "dump_acea", "dump_results", "evaluate", "evaluate_positions",
    "lookup_aggregate", "make_stream", "normalize_acea", "parse_complex_event",
    "parse_predicate", "parse_query", "pretty", "read_results", "read_schema",
    "read_stream",
]
