"""Formula AST.

Nodes are frozen dataclasses so formulas hash, compare structurally and can be
shared between threads.  ``str(f)`` renders back into the parser's grammar
with full parenthesization of binary connectives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Lit:
    """An element literal ``#i`` naming universe element ``i``."""

    index: int

    def __str__(self) -> str:
        return f"#{self.index}"


Term = Union[Var, Lit]


@dataclass(frozen=True)
class Rel:
    name: str
    terms: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.name}({','.join(map(str, self.terms))})"


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not:
    body: Formula

    def __str__(self) -> str:
        if isinstance(self.body, Eq):
            return f"{self.body.left} != {self.body.right}"
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class BinOp:
    left: Formula
    right: Formula
    symbol = "?"

    def __str__(self) -> str:
        return f"({self.left} {self.symbol} {self.right})"


class And(BinOp):
    symbol = "&"


class Or(BinOp):
    symbol = "|"


class Implies(BinOp):
    symbol = "->"


class Iff(BinOp):
    symbol = "<->"


@dataclass(frozen=True)
class Quant:
    variables: tuple[str, ...]
    body: Formula
    keyword = "?"

    def __str__(self) -> str:
        return f"{self.keyword} {','.join(self.variables)}. {_wrap(self.body)}"


class Exists(Quant):
    keyword = "exists"


class Forall(Quant):
    keyword = "forall"


Formula = Union[Rel, Eq, Const, Not, BinOp, Quant]


def _wrap(f: Formula) -> str:
    # Quantifier and negation bodies are unary in the grammar.
    text = str(f)
    if isinstance(f, (Eq, Quant)) or (isinstance(f, Not) and isinstance(f.body, Eq)):
        return f"({text})"
    return text


def free_variables(f: Formula) -> list[str]:
    """Free variables in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Rel):
            terms = g.terms
        elif isinstance(g, Eq):
            terms = (g.left, g.right)
        elif isinstance(g, Const):
            terms = ()
        elif isinstance(g, Not):
            walk(g.body, bound)
            return
        elif isinstance(g, BinOp):
            walk(g.left, bound)
            walk(g.right, bound)
            return
        else:
            walk(g.body, bound | set(g.variables))
            return
        for t in terms:
            if isinstance(t, Var) and t.name not in bound:
                seen.setdefault(t.name)

    walk(f, frozenset())
    return list(seen)


def literals(f: Formula) -> set[int]:
    out: set[int] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, (Rel, Eq)):
            terms = g.terms if isinstance(g, Rel) else (g.left, g.right)
            out.update(t.index for t in terms if isinstance(t, Lit))
        elif isinstance(g, BinOp):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Not, Quant)):
            walk(g.body)

    walk(f)
    return out
