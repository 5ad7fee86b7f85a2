"""Tokenizer and recursive-descent parser for ACEL query text."""

import re
from typing import List, NamedTuple

from . import predicates as P
from .aggregates import lookup_aggregate
from .errors import ParseError
from .expressions import Attr, Const
from .syntax import (Agg, AggBinding, And, AnyEvent, As, CompoundFilter,
                     EventType, Filter, FilterAnd, FilterOr, FilterTerm,
                     IterContig, IterNonContig, Next, Or, ProjectAttrs,
                     ProjectVars, SeqContig, SeqNonContig)

KEYWORDS = frozenset(
    "AS FILTER OR AND NOT TRUE NULL AGG PROJ NEXT ANY".split())


class Token(NamedTuple):
    kind: str  # ident, keyword, number, string, op, eof
    text: str
    value: object
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<iter>\(\s*\+\s*\))
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n])*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><-|<=|>=|!=|[=<>()\[\],;:+])
""", re.VERBOSE)


def tokenize(text):
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == "$":
                raise ParseError("names starting with '$' are reserved", line, col)
            raise ParseError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "number":
            value = float(lexeme) if any(c in lexeme for c in ".eE") else int(lexeme)
            tokens.append(Token("number", lexeme, value, line, col))
        elif kind == "string":
            body = lexeme[1:-1]
            if lexeme[0] == '"':
                body = re.sub(r"\\(.)", r"\1", body)
            tokens.append(Token("string", lexeme, body, line, col))
        elif kind == "ident":
            k = "keyword" if lexeme in KEYWORDS else "ident"
            tokens.append(Token(k, lexeme, lexeme, line, col))
        elif kind in ("op", "iter"):
            text_ = "(+)" if kind == "iter" else lexeme
            tokens.append(Token("op", text_, text_, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", None, line, col))
    return tokens


CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


def _fold(cls, items):
    out = items[0]
    for x in items[1:]:
        out = cls(out, x)
    return out


class _Parser:
    def __init__(self, text):
        self.toks: List[Token] = tokenize(text)
        self.i = 0

    # -- helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text, k=0):
        t = self.peek(k)
        return t.kind in ("op", "keyword") and t.text == text

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            t = self.peek()
            found = t.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def ident(self, what="identifier"):
        t = self.peek()
        if t.kind != "ident":
            found = t.text or "end of input"
            self.error(f"expected {what}, found {found!r}")
        self.i += 1
        return t.text

    # -- formulas
    def formula(self):
        return self.or_()

    def or_(self):
        f = self.and_()
        while self.accept("OR"):
            f = Or(f, self.and_())
        return f

    def and_(self):
        f = self.seq()
        while self.accept("AND"):
            f = And(f, self.seq())
        return f

    def seq(self):
        f = self.contig()
        while True:
            if self.accept(";"):
                f = SeqNonContig(f, self.contig())
            elif self.accept(":"):
                f = SeqContig(f, self.contig())
            else:
                return f

    def contig(self):
        f = self.postfix()
        while True:
            if self.accept("AS"):
                f = As(f, self.ident("variable"))
            elif self.accept("FILTER"):
                f = self.filter_body(f)
            else:
                return f

    def postfix(self):
        f = self.primary()
        while True:
            if self.accept("+"):
                f = IterNonContig(f)
            elif self.accept("(+)"):
                f = IterContig(f)
            else:
                return f

    def primary(self):
        t = self.peek()
        if t.kind == "ident":
            self.i += 1
            return EventType(t.text)
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("ANY"):
            return AnyEvent()
        if self.accept("NEXT"):
            self.expect("(")
            name = self.ident("event type")
            self.expect(")")
            return Next(name)
        if self.accept("PROJ"):
            return self.projection()
        if self.accept("AGG"):
            return self.aggregation()
        found = t.text or "end of input"
        self.error(f"expected a formula, found {found!r}")

    def ident_list(self, close):
        names = []
        if self.at(close):
            return names
        names.append(self.ident())
        while self.accept(","):
            names.append(self.ident())
        return names

    def projection(self):
        if self.accept("["):
            names = self.ident_list("]")
            self.expect("]")
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return ProjectVars(f, frozenset(names))
        var = self.ident("variable")
        self.expect("(")
        attrs = self.ident_list(")")
        self.expect(")")
        self.expect("(")
        f = self.formula()
        self.expect(")")
        return ProjectAttrs(f, var, tuple(attrs))

    def aggregation(self):
        target = self.ident("aggregation variable")
        self.expect("[")
        bindings = [self.binding()]
        while self.accept(","):
            bindings.append(self.binding())
        self.expect("]")
        seen = set()
        for b, tok in bindings:
            if b.target in seen:
                self.error(f"duplicate aggregate target attribute {b.target!r}", tok)
            seen.add(b.target)
        self.expect("(")
        f = self.formula()
        self.expect(")")
        return Agg(f, target, tuple(b for b, _ in bindings))

    def binding(self):
        tok = self.peek()
        target = self.ident("attribute")
        self.expect("<-")
        ftok = self.peek()
        fn = self.ident("aggregate name")
        if lookup_aggregate(fn) is None:
            self.error(f"unknown aggregate {fn!r}", ftok)
        var = self.ident("variable")
        self.expect("(")
        attr = self.ident("attribute")
        self.expect(")")
        return AggBinding(target, fn.lower(), var, attr), tok

    # -- filters
    def filter_body(self, f):
        fe = self.filter_expr()
        if isinstance(fe, FilterTerm):
            return Filter(f, fe.var, fe.condition)
        return CompoundFilter(f, fe)

    def _filter_term_ahead(self, k):
        # after AND/OR: a filter term is IDENT "[" possibly behind "("s
        while self.at("(", k):
            k += 1
        return self.peek(k).kind == "ident" and self.at("[", k + 1)

    def filter_expr(self):
        fe = self.filter_conj()
        while self.at("OR") and self._filter_term_ahead(1):
            self.i += 1
            fe = FilterOr(fe, self.filter_conj())
        return fe

    def filter_conj(self):
        fe = self.filter_term()
        while self.at("AND") and self._filter_term_ahead(1):
            self.i += 1
            fe = FilterAnd(fe, self.filter_term())
        return fe

    def filter_term(self):
        if self.accept("("):
            fe = self.filter_expr()
            self.expect(")")
            return fe
        var = self.ident("variable")
        self.expect("[")
        conds = self.condition()
        self.expect("]")
        terms = [FilterTerm(var, c) for c in conds]
        fe = terms[0]
        for t in terms[1:]:
            fe = FilterAnd(fe, t)
        return fe

    def condition(self):
        """A bracket body. Event predicates are combined into one predicate;
        multiset predicates joined by AND at the top stay separate terms."""
        disjuncts = [self.conj_items()]
        while self.accept("OR"):
            disjuncts.append(self.conj_items())
        if len(disjuncts) == 1:
            items = disjuncts[0]
            event = [x for x in items if isinstance(x, P.Predicate)]
            multi = [x for x in items if isinstance(x, P.MultisetPredicate)]
            return ([_fold(P.And, event)] if event else []) + multi
        return [self._event_disjunction(disjuncts)]

    def conj_items(self):
        items = [self.pred_unary()]
        while self.accept("AND"):
            items.append(self.pred_unary())
        return items

    def _event_disjunction(self, disjuncts):
        for items in disjuncts:
            if any(isinstance(x, P.MultisetPredicate) for x in items):
                self.error("multiset predicates cannot appear under OR")
        return _fold(P.Or, [_fold(P.And, items) for items in disjuncts])

    def pred_unary(self):
        if self.accept("NOT"):
            tok = self.peek()
            inner = self.pred_unary()
            if isinstance(inner, P.MultisetPredicate):
                self.error("NOT cannot apply to a multiset predicate", tok)
            return P.Not(inner)
        if self.accept("("):
            disjuncts = [self.conj_items()]
            while self.accept("OR"):
                disjuncts.append(self.conj_items())
            self.expect(")")
            if len(disjuncts) == 1 and len(disjuncts[0]) == 1:
                return disjuncts[0][0]
            return self._event_disjunction(disjuncts)
        return self.atom()

    def atom(self):
        if self.accept("TRUE"):
            return P.TRUE
        t = self.peek()
        name = self.ident("attribute")
        if name in ("increasing", "decreasing") and self.at("("):
            self.expect("(")
            attr = self.ident("attribute")
            self.expect(")")
            return P.Increasing(attr) if name == "increasing" else P.Decreasing(attr)
        op = self.peek()
        if op.kind == "op" and op.text in CMP_OPS:
            self.i += 1
            return P.Compare(Attr(name), op.text, self.operand())
        return P.SameAttr(name)

    def operand(self):
        t = self.peek()
        if t.kind in ("number", "string"):
            self.i += 1
            return Const(t.value)
        if self.accept("NULL"):
            return Const(None)
        if t.kind == "ident":
            self.i += 1
            return Attr(t.text)
        found = t.text or "end of input"
        self.error(f"expected a literal or attribute, found {found!r}")


def parse_query(text):
    """Parse one formula; raises ParseError with line and column."""
    p = _Parser(text)
    f = p.formula()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r} after formula")
    return f


def parse_predicate(text):
    """Parse a bracket body; returns the list of conditions it denotes."""
    p = _Parser(text)
    conds = p.condition()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r} after predicate")
    return conds
