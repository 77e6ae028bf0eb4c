"""Recursive-descent parser for the formula language.

Precedence from tightest to loosest is ``!``, ``&``, ``|``, ``->``, ``<->``;
the last two associate to the right.  A quantifier binds a unary body, so
``exists z. E(x,z) & E(z,y)`` quantifies only the first conjunct.
"""

from __future__ import annotations

import re
from typing import Optional

from ..errors import ArityMismatch, FormulaSyntaxError, UnknownRelation
from .structure import Signature
from .syntax import And, Const, Eq, Exists, Forall, Formula, Iff, Implies, Lit, Not, Or, Rel, Term, Var

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|!=|[!&|().,=#])|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)
_KEYWORDS = {"exists", "forall", "true", "false"}


class Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self) -> str:
        return f"Token({self.kind!r}, {self.text!r}, {self.pos})"


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "ident" and value in _KEYWORDS:
            kind = "keyword"
        tokens.append(Token(kind, value, start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class Parser:
    def __init__(self, text: str, signature: Optional[Signature]):
        self.tokens = tokenize(text)
        self.index = 0
        self.signature = signature

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def _accept(self, text: str) -> bool:
        if self.current.kind in ("op", "keyword") and self.current.text == text:
            self.index += 1
            return True
        return False

    def _expect(self, text: str) -> Token:
        if not self._accept(text):
            self._fail(f"expected {text!r}")
        return self.tokens[self.index - 1]

    def _fail(self, message: str):
        tok = self.current
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise FormulaSyntaxError(f"{message}, found {found}", tok.pos)

    def parse(self) -> Formula:
        f = self.iff()
        if self.current.kind != "end":
            self._fail("unexpected trailing input")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self._accept("<->"):
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disjunction()
        if self._accept("->"):
            return Implies(left, self.imp())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self._accept("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self._accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self._accept("!"):
            return Not(self.unary())
        tok = self.current
        if tok.kind == "keyword" and tok.text in ("exists", "forall"):
            return self.quantifier()
        if self._accept("("):
            f = self.iff()
            self._expect(")")
            return f
        return self.atom()

    def quantifier(self) -> Formula:
        kind = Exists if self._advance().text == "exists" else Forall
        names = [self._variable()]
        while self._accept(","):
            names.append(self._variable())
        self._expect(".")
        return kind(tuple(names), self.unary())

    def _variable(self) -> str:
        if self.current.kind != "ident":
            self._fail("expected a variable name")
        return self._advance().text

    def atom(self) -> Formula:
        tok = self.current
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.index += 1
            return Const(tok.text == "true")
        if tok.kind == "ident" and self.tokens[self.index + 1].text == "(":
            return self.relation()
        left = self.term()
        if self._accept("="):
            return Eq(left, self.term())
        if self._accept("!="):
            return Not(Eq(left, self.term()))
        self._fail("expected '=' or '!=' after term")

    def relation(self) -> Formula:
        name_tok = self._advance()
        self._expect("(")
        terms = [self.term()]
        while self._accept(","):
            terms.append(self.term())
        self._expect(")")
        if self.signature is not None:
            symbol = self.signature.relations.get(name_tok.text)
            if symbol is None:
                raise UnknownRelation(f"unknown relation {name_tok.text!r} at position {name_tok.pos}")
            if symbol.arity != len(terms):
                raise ArityMismatch(
                    f"{name_tok.text} has arity {symbol.arity}, applied to {len(terms)} terms"
                    f" at position {name_tok.pos}"
                )
        return Rel(name_tok.text, tuple(terms))

    def term(self) -> Term:
        if self._accept("#"):
            if self.current.kind != "int":
                self._fail("expected an element index after '#'")
            return Lit(int(self._advance().text))
        if self.current.kind == "ident":
            return Var(self._advance().text)
        self._fail("expected a term")


def parse_formula(text: str, sig: Optional[Signature] = None) -> Formula:
    """Parse ``text``; with a signature, relation names and arities are checked."""
    return Parser(text, sig).parse()
