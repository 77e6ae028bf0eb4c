"""Finite single-sorted relational structures and their JSON form."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ..errors import ArityMismatch, InvalidArgument

# Relation tables are dense boolean arrays; refuse anything past this many cells.
MAX_TABLE_CELLS = 1 << 28


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    symmetric: bool = False

    def __post_init__(self):
        if self.arity < 1:
            raise InvalidArgument(f"relation {self.name} must have arity >= 1")
        if self.symmetric and self.arity != 2:
            raise InvalidArgument(f"only binary relations can be symmetric ({self.name})")


@dataclass(frozen=True)
class Signature:
    relations: Mapping[str, RelationSymbol]

    @classmethod
    def of(cls, *symbols: RelationSymbol) -> Signature:
        names = [s.name for s in symbols]
        if len(set(names)) != len(names):
            raise InvalidArgument("relation names must be unique")
        return cls({s.name: s for s in symbols})

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.relations.items())))


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """Universe ``0..m-1`` with a tuple set per relation symbol.

    Structures compare by identity; they are large immutable values and the
    search modules cache derived data on them.
    """

    signature: Signature
    universe_size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.universe_size < 1:
            raise InvalidArgument("universe_size must be at least 1")
        closed = {}
        for sym in self.signature.relations.values():
            tuples = set(self.relations.get(sym.name, ()))
            for t in tuples:
                if len(t) != sym.arity:
                    raise ArityMismatch(f"tuple {t} in {sym.name} has length {len(t)}, arity {sym.arity}")
                if not all(0 <= v < self.universe_size for v in t):
                    raise InvalidArgument(f"tuple {t} in {sym.name} leaves the universe")
            if sym.symmetric:
                tuples |= {(b, a) for a, b in tuples}
            closed[sym.name] = frozenset(tuples)
        extra = set(self.relations) - set(self.signature.relations)
        if extra:
            raise InvalidArgument(f"relations {sorted(extra)} are not in the signature")
        object.__setattr__(self, "relations", closed)

    @property
    def m(self) -> int:
        return self.universe_size

    def table(self, name: str) -> np.ndarray:
        """Dense read-only boolean table of shape ``(m,) * arity``."""
        cached = self._cache.get(("table", name))
        if cached is None:
            arity = self.signature.relations[name].arity
            if self.m**arity > MAX_TABLE_CELLS:
                raise InvalidArgument(f"relation {name} is too large to tabulate")
            cached = np.zeros((self.m,) * arity, dtype=bool)
            tuples = self.relations[name]
            if tuples:
                cached[tuple(np.array(sorted(tuples)).T)] = True
            cached.flags.writeable = False
            self._cache[("table", name)] = cached
        return cached

    def holds(self, name: str, t: Iterable[int]) -> bool:
        return tuple(t) in self.relations[name]

    def to_json(self) -> dict:
        rels = {}
        for sym in self.signature.relations.values():
            tuples = self.relations[sym.name]
            if sym.symmetric:
                tuples = {t for t in tuples if t[0] <= t[1]}
            rels[sym.name] = {"arity": sym.arity, "symmetric": sym.symmetric, "tuples": [list(t) for t in sorted(tuples)]}
        return {"name": self.name, "universe": self.universe_size, "relations": rels}

    @classmethod
    def from_json(cls, data: Mapping) -> FiniteStructure:
        try:
            symbols = [
                RelationSymbol(name, int(spec["arity"]), bool(spec.get("symmetric", False)))
                for name, spec in data["relations"].items()
            ]
            relations = {
                name: frozenset(tuple(int(v) for v in t) for t in spec.get("tuples", []))
                for name, spec in data["relations"].items()
            }
            return cls(Signature.of(*symbols), int(data["universe"]), relations, str(data.get("name", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed structure file: {exc}") from exc


def load_structure(path: str | Path) -> FiniteStructure:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: {exc}") from exc
    return FiniteStructure.from_json(data)


def graph(m: int, edges: Iterable[tuple[int, int]], name: str = "", relation: str = "E") -> FiniteStructure:
    """A symmetric irreflexive-by-convention graph on ``0..m-1``."""
    sig = Signature.of(RelationSymbol(relation, 2, symmetric=True))
    return FiniteStructure(sig, m, {relation: frozenset(map(tuple, edges))}, name)


def complete_graph(m: int) -> FiniteStructure:
    return graph(m, itertools.combinations(range(m), 2), f"K{m}")


def path_graph(m: int) -> FiniteStructure:
    return graph(m, ((i, i + 1) for i in range(m - 1)), f"P{m}")


def linear_order(m: int, relation: str = "LEQ") -> FiniteStructure:
    sig = Signature.of(RelationSymbol(relation, 2))
    leq = frozenset((i, j) for i in range(m) for j in range(i, m))
    return FiniteStructure(sig, m, {relation: leq}, f"chain{m}")
