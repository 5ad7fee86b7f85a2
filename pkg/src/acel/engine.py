"""Running a query with the oracle, the compiled automaton, or both."""

from dataclasses import dataclass
from typing import FrozenSet, Optional

from .automata import acea_enumerate
from .compiler import compile_formula
from .desugar import desugar
from .errors import UnsupportedFeature
from .semantics import evaluate

ENGINES = ("oracle", "acea", "diff")


@dataclass
class Outcome:
    results: FrozenSet
    automaton: object = None
    only_oracle: Optional[str] = None  # why diff fell back to the oracle
    missing: FrozenSet = frozenset()   # oracle results the automaton lacks
    extra: FrozenSet = frozenset()     # automaton results the oracle lacks

    @property
    def agrees(self):
        return not self.missing and not self.extra


def run_oracle(f, stream):
    return evaluate(desugar(f), stream)


def run_acea(f, stream, schema):
    a = compile_formula(f, schema, warn=False)
    return a, acea_enumerate(a, stream)


def run_engine(f, stream, schema, engine):
    """Evaluate ``f``; ``diff`` compares both engines as sets."""
    if engine == "oracle":
        return Outcome(run_oracle(f, stream))
    if engine == "acea":
        a, res = run_acea(f, stream, schema)
        return Outcome(res, automaton=a)
    if engine != "diff":
        raise ValueError(f"unknown engine {engine!r}")
    expected = run_oracle(f, stream)
    try:
        a, got = run_acea(f, stream, schema)
    except UnsupportedFeature as exc:
        return Outcome(expected, only_oracle=str(exc))
    return Outcome(expected, automaton=a,
                   missing=expected - got, extra=got - expected)
