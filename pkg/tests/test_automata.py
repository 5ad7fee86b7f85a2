import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from automata_fixtures import STOCKS, max_automaton, max_automaton_as_drawn
from acel.automata import (Acea, Cea, CeaTransition, Configuration, Transition,
                           acea_enumerate, acea_step, apply_assignment,
                           cea_enumerate, dump_acea)
from acel.compiler import cea_to_acea
from acel.expressions import Apply, Attr, BinOp, Const, eval_expression
from acel.model import ComplexEvent, Event, Schema, make_stream
from acel.parser import parse_query
from acel.predicates import TRUE, attr_cmp, type_is
from acel.semantics import PositionComplexEvent, evaluate, positions_to_events
from acel.testing import random_cea, random_stream

S = make_stream(STOCKS)
MAX_INTEL = ('AGG M[MAX <- max intel(price)]((SELL AS msft ; (SELL AS intel)+ ; SELL AS amzn) '
        'FILTER msft[name = "MSFT"] AND msft[price > 100] AND intel[name = "INTL"] '
        'AND amzn[name = "AMZN"] AND amzn[price < 2000])')


# ------------------------------------------------------------ expressions

def test_eval_expression():
    e = Event({"a": 4, "b": 2, "c": 5})
    assert eval_expression(BinOp("sum", Attr("a"), Attr("b")), e) == 6
    x = BinOp("sum", BinOp("min", Attr("a"), Attr("b")), BinOp("max", Attr("b"), Attr("c")))
    assert eval_expression(x, e) == 7
    assert eval_expression(Const(42), e) == 42


def test_apply_assignment():
    e = Event({"a": 4, "b": 2, "c": 5})
    sigma = {"a": BinOp("max", BinOp("sum", Attr("a"), Attr("b")), Attr("c"))}
    assert apply_assignment(sigma, e).attrs == {"a": 6}
    assert apply_assignment({}, e).attrs == {}
    step = {"m": BinOp("max", Attr("m"), Attr("price"))}
    assert apply_assignment(step, Event({"m": 80, "price": 81})).attrs == {"m": 81}


# ------------------------------------------------------------------ steps

def test_first_transition_of_the_max_automaton():
    t = max_automaton_as_drawn().transitions[0]
    c = acea_step(Configuration(1), S[0], t)
    assert c == Configuration(2, Event({"m": 0, "n": "MSFT", "p": 101}))


def test_step_with_failing_predicate():
    t = max_automaton_as_drawn().transitions[0]
    assert acea_step(Configuration(1), S[2], t) is None


def test_step_with_missing_attribute():
    t = max_automaton_as_drawn().transitions[1]
    # the register m is not set before the first transition
    assert acea_step(Configuration(2), S[2], t) is None
    t2 = Transition(0, {"x": Attr("volume")}, TRUE, {}, 1)
    assert acea_step(Configuration(0), S[0], t2) is None


def test_registers_shadow_event_attributes_only_when_absent():
    t = Transition(0, {"x": BinOp("sum", Attr("x"), Attr("a"))}, TRUE, {}, 0)
    c = acea_step(Configuration(0, Event({"x": 10})), Event({"a": 1}), t)
    assert c.registers.attrs == {"x": 11}


# ------------------------------------------------------------ enumeration

def test_literal_max_automaton():
    out = acea_enumerate(max_automaton_as_drawn(), S)
    np = lambda k: Event({"name": S[k].get("name"), "price": S[k].get("price")}, k)  # noqa: E731
    assert out == {ComplexEvent(1, 4, {
        "msft": [np(1)], "intel": [np(2), np(3)], "amzn": [np(4)],
        "M": [Event({"MAX": 80}, 4)]})}


def test_derived_max_automaton_matches_the_oracle():
    assert acea_enumerate(max_automaton(), S) == evaluate(parse_query(MAX_INTEL), S)


def test_unreachable_finals_give_nothing():
    a = Acea({0, 1, 2}, [Transition(0, {}, TRUE, {"X": ({},)}, 1)], 0, {2})
    assert acea_enumerate(a, S) == frozenset()


def test_empty_stream_gives_nothing():
    assert acea_enumerate(max_automaton(), ()) == frozenset()


def test_output_event_carries_the_position():
    a = Acea({0, 1}, [Transition(0, {"p": Attr("price")}, TRUE,
                                 {"X": ({"v": Attr("p")},)}, 1)], 0, {1})
    out = acea_enumerate(a, S[:2])
    assert out == {ComplexEvent(0, 0, {"X": [Event({"v": 101}, 0)]}),
                   ComplexEvent(1, 1, {"X": [Event({"v": 102}, 1)]})}


# --------------------------------------------------------------- plain CEA

def test_cea_marks_every_sell():
    a = Cea({0, 1}, [CeaTransition(0, type_is("SELL"), {"X"}, 1)], 0, {1})
    out = cea_enumerate(a, S)
    assert out == {PositionComplexEvent(k, k, {"X": {k}}) for k in (0, 1, 2, 4, 5, 9)}


def test_cea_without_finals_or_transitions():
    loop = CeaTransition(0, TRUE, {"X"}, 0)
    assert cea_enumerate(Cea({0, 1}, [loop], 0, set()), S) == frozenset()
    assert cea_enumerate(Cea({0, 1}, [], 0, {1}), S) == frozenset()


def test_cea_deduplicates_runs():
    a = Cea({0, 1, 2}, [CeaTransition(0, TRUE, {"X"}, 1), CeaTransition(0, TRUE, {"X"}, 2)],
            0, {1, 2})
    assert len(cea_enumerate(a, S[:1])) == 1


def test_cea_embedding_on_the_sell_automaton():
    schema = Schema({"SELL": ["name", "price"], "BUY": ["name", "price"]})
    a = Cea({0, 1}, [CeaTransition(0, type_is("SELL"), {"X"}, 1)], 0, {1})
    got = acea_enumerate(cea_to_acea(a, schema), S)
    assert got == {positions_to_events(p, S) for p in cea_enumerate(a, S)}
    assert acea_enumerate(cea_to_acea(Cea({0}, [], 0, {0}), schema), S) == frozenset()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_cea_embedding_is_faithful(seed):
    rng = random.Random(seed)
    schema = Schema({"A": ["a", "b"], "B": ["a", "b"]})
    a = random_cea(rng, schema)
    s = random_stream(rng, schema, {}, rng.randint(0, 6))
    assert acea_enumerate(cea_to_acea(a, schema), s) == {
        positions_to_events(p, s) for p in cea_enumerate(a, s)}


# --------------------------------------------------------- construction

def test_dump_acea_lists_transitions_in_order():
    text = dump_acea(max_automaton_as_drawn())
    lines = text.splitlines()
    assert lines[:4] == ["ACEA", "states: q1 q2 q3", "initial: q1", "final: q3"]
    assert "transition q1 -> q2" in lines
    assert "  m <- 0" in lines
    assert "  M += {MAX<-m}" in lines
    assert text == dump_acea(max_automaton_as_drawn())


def test_transition_validation():
    with pytest.raises(ValueError):
        Transition(0, {}, TRUE, {"X": ({"v": Attr("r")},)}, 1)
    with pytest.raises(ValueError):
        Transition(0, {"x": Apply("div", (Attr("a"), Attr("b")))}, TRUE, {}, 1)
    with pytest.raises(ValueError):
        Acea({0}, [Transition(0, {}, TRUE, {}, 1)], 0, {0})
    with pytest.raises(ValueError):
        Acea({0}, [], 1, {0})
    with pytest.raises(ValueError):
        Cea({0}, [], 0, {3})


def test_predicates_read_the_new_registers():
    t = Transition(0, {"x": Attr("price")}, attr_cmp("x", ">", 1000), {}, 1)
    assert acea_step(Configuration(0), S[4], t).state == 1
    assert acea_step(Configuration(0), S[0], t) is None
