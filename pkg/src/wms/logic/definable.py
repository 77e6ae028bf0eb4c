"""Definable sets as dense bit-vectors, and exact formula evaluation.

A set over context length k lives in a flat boolean array of length m**k in
lexicographic tuple order, so reshaping to ``(m,) * k`` gives one axis per
variable with the first variable most significant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from ..errors import ArityMismatch, CapExceeded, ContextMismatch, InvalidArgument, LiteralOutOfRange, ShapeMismatch, UnboundVariable, UnknownRelation
from .parser import parse_formula
from .structure import FiniteStructure, Signature
from .syntax import And, BinOp, Const, Eq, Exists, Formula, Iff, Implies, Lit, Not, Or, Quant, Rel, free_variables

MAX_CONTEXT_BITS = 34


def check_size(k: int, m: int) -> None:
    if m > 1 and k * math.log2(m) > MAX_CONTEXT_BITS:
        raise CapExceeded(f"{m}^{k} tuples exceed the 2^{MAX_CONTEXT_BITS} evaluation cap")


class DefinableSet:
    """An immutable subset of M^k."""

    def __init__(self, k: int, m: int, bits: np.ndarray):
        if k < 1 or m < 1:
            raise InvalidArgument("definable sets need k >= 1 and m >= 1")
        bits = np.asarray(bits, dtype=bool).reshape(-1)
        if bits.size != m**k:
            raise ShapeMismatch(f"bit-vector of length {bits.size} is not {m}^{k}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.k, self.m, self.bits = k, m, bits

    @classmethod
    def empty(cls, k: int, m: int) -> DefinableSet:
        return cls(k, m, np.zeros(m**k, dtype=bool))

    @classmethod
    def full(cls, k: int, m: int) -> DefinableSet:
        return cls(k, m, np.ones(m**k, dtype=bool))

    @classmethod
    def from_tuples(cls, k: int, m: int, tuples: Iterable[Sequence[int]]) -> DefinableSet:
        bits = np.zeros(m**k, dtype=bool)
        for t in tuples:
            bits[tuple_index(t, m)] = True
        return cls(k, m, bits)

    @classmethod
    def from_mask(cls, k: int, m: int, mask: int) -> DefinableSet:
        """Set whose tuple with lexicographic index ``i`` is present iff bit ``i`` of ``mask`` is."""
        n = m**k
        raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
        return cls(k, m, np.unpackbits(raw, bitorder="little")[:n].astype(bool))

    @property
    def array(self) -> np.ndarray:
        return self.bits.reshape((self.m,) * self.k)

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    @cached_property
    def size(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return self.size > 0

    def _same_shape(self, other: DefinableSet) -> None:
        if not isinstance(other, DefinableSet) or (self.k, self.m) != (other.k, other.m):
            raise ShapeMismatch("definable sets have different shapes")

    def __and__(self, other: DefinableSet) -> DefinableSet:
        self._same_shape(other)
        return DefinableSet(self.k, self.m, self.bits & other.bits)

    def __or__(self, other: DefinableSet) -> DefinableSet:
        self._same_shape(other)
        return DefinableSet(self.k, self.m, self.bits | other.bits)

    def __sub__(self, other: DefinableSet) -> DefinableSet:
        self._same_shape(other)
        return DefinableSet(self.k, self.m, self.bits & ~other.bits)

    def __invert__(self) -> DefinableSet:
        return DefinableSet(self.k, self.m, ~self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DefinableSet):
            return NotImplemented
        return (self.k, self.m) == (other.k, other.m) and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.k, self.m, self.key))

    def issubset(self, other: DefinableSet) -> bool:
        self._same_shape(other)
        return not np.any(self.bits & ~other.bits)

    def __contains__(self, t: Sequence[int]) -> bool:
        return bool(self.bits[tuple_index(t, self.m)])

    def tuples(self) -> Iterator[tuple[int, ...]]:
        for i in np.flatnonzero(self.bits):
            yield index_tuple(int(i), self.k, self.m)

    def first(self) -> Optional[tuple[int, ...]]:
        nz = np.flatnonzero(self.bits)
        return index_tuple(int(nz[0]), self.k, self.m) if nz.size else None

    def to_mask(self) -> int:
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    def __repr__(self) -> str:
        shown = list(self.tuples()) if self.size <= 8 else f"{self.size} tuples"
        return f"DefinableSet(k={self.k}, m={self.m}, {shown})"


def tuple_index(t: Sequence[int], m: int) -> int:
    i = 0
    for v in t:
        if not 0 <= v < m:
            raise InvalidArgument(f"element {v} outside universe of size {m}")
        i = i * m + v
    return i


def index_tuple(i: int, k: int, m: int) -> tuple[int, ...]:
    out = [0] * k
    for pos in range(k - 1, -1, -1):
        i, out[pos] = divmod(i, m)
    return tuple(out)


def all_tuples(k: int, m: int) -> Iterator[tuple[int, ...]]:
    """M^k in lexicographic order."""
    return (index_tuple(i, k, m) for i in range(m**k))


def extension_equal(d1: DefinableSet, d2: DefinableSet) -> bool:
    d1._same_shape(d2)
    return d1.key == d2.key


def _parse_context(ctx) -> tuple[str, ...]:
    names = tuple(v.strip() for v in ctx.split(",")) if isinstance(ctx, str) else tuple(ctx)
    if not names or len(set(names)) != len(names):
        raise InvalidArgument(f"context must be a nonempty list of distinct variables, got {names}")
    return names


class _Evaluator:
    """Evaluates to arrays with one axis per variable in scope.

    Arrays stay broadcast-compressed (size-1 axes for variables a subformula
    does not mention) until the final result is materialized.
    """

    def __init__(self, S: FiniteStructure):
        self.S = S
        self.m = S.m

    def run(self, f: Formula, scope: tuple[str, ...]) -> np.ndarray:
        if isinstance(f, Rel):
            if f.name not in self.S.signature.relations:
                raise UnknownRelation(f"structure has no relation {f.name!r}")
            table = self.S.table(f.name)
            if table.ndim != len(f.terms):
                raise ArityMismatch(f"{f.name} applied to {len(f.terms)} terms, arity {table.ndim}")
            return table[tuple(self.index(t, scope) for t in f.terms)]
        if isinstance(f, Eq):
            return self.index(f.left, scope) == self.index(f.right, scope)
        if isinstance(f, Const):
            return np.full((1,) * len(scope), f.value)
        if isinstance(f, Not):
            return ~self.run(f.body, scope)
        if isinstance(f, BinOp):
            left, right = self.run(f.left, scope), self.run(f.right, scope)
            if isinstance(f, And):
                return left & right
            if isinstance(f, Or):
                return left | right
            if isinstance(f, Implies):
                return ~left | right
            if isinstance(f, Iff):
                return left == right
        if isinstance(f, Quant):
            inner = scope + f.variables
            check_size(len(inner), self.m)
            body = self.run(f.body, inner)
            axes = tuple(range(len(scope), len(inner)))
            reduce = np.any if isinstance(f, Exists) else np.all
            return reduce(body, axis=axes)
        raise TypeError(f"not a formula node: {f!r}")

    def index(self, t, scope: tuple[str, ...]):
        if isinstance(t, Lit):
            if not 0 <= t.index < self.m:
                raise LiteralOutOfRange(f"#{t.index} outside universe of size {self.m}")
            return np.full((1,) * len(scope), t.index)
        # Innermost binding wins, so search from the right.
        for axis in range(len(scope) - 1, -1, -1):
            if scope[axis] == t.name:
                shape = [1] * len(scope)
                shape[axis] = self.m
                return np.arange(self.m).reshape(shape)
        raise UnboundVariable(f"variable {t.name!r} is not in the context")


def evaluate(S: FiniteStructure, f: Formula | str, ctx) -> DefinableSet:
    """Extension of ``f`` in ``S`` over the context ``ctx`` (names or "x,y")."""
    names = _parse_context(ctx)
    if isinstance(f, str):
        f = parse_formula(f, S.signature)
    check_size(len(names), S.m)
    arr = _Evaluator(S).run(f, names)
    full = np.broadcast_to(arr, (S.m,) * len(names))
    return DefinableSet(len(names), S.m, np.ascontiguousarray(full))


@dataclass(frozen=True)
class PartitionedFormula:
    """A formula with object variables ``x`` and parameter variables ``y``."""

    formula: Formula
    x: tuple[str, ...]
    y: tuple[str, ...]

    def __post_init__(self):
        if not self.x:
            raise InvalidArgument("a partitioned formula needs at least one object variable")
        if set(self.x) & set(self.y) or len(set(self.x + self.y)) != len(self.x + self.y):
            raise InvalidArgument("object and parameter variables must be distinct")
        missing = set(free_variables(self.formula)) - set(self.x + self.y)
        if missing:
            raise UnboundVariable(f"free variables {sorted(missing)} are neither objects nor parameters")

    @classmethod
    def parse(cls, text: str, sig: Optional[Signature] = None, x="x", y=None) -> PartitionedFormula:
        """Parse ``text``; parameters default to the remaining free variables in order of appearance."""
        f = parse_formula(text, sig)
        xs = _parse_context(x)
        ys = tuple(v for v in free_variables(f) if v not in xs) if y is None else tuple(_parse_context(y) if y else ())
        return cls(f, xs, ys)

    def __str__(self) -> str:
        return str(self.formula)

    def negate(self) -> PartitionedFormula:
        return PartitionedFormula(Not(self.formula), self.x, self.y)

    def instances(self, S: FiniteStructure) -> InstanceTable:
        return InstanceTable(S, self)


class InstanceTable:
    """All instances phi(x, c), c in M^|y|, of a partitioned formula."""

    def __init__(self, S: FiniteStructure, phi: PartitionedFormula):
        self.structure = S
        self.phi = phi
        self.kx, self.ky, self.m = len(phi.x), len(phi.y), S.m
        ext = evaluate(S, phi.formula, phi.x + phi.y)
        self.matrix = ext.bits.reshape(self.m**self.kx, self.m**self.ky)
        self._cache: dict[int, DefinableSet] = {}

    def parameters(self) -> Iterator[tuple[int, ...]]:
        return all_tuples(self.ky, self.m) if self.ky else iter([()])

    def instance(self, c: Sequence[int]) -> DefinableSet:
        if len(c) != self.ky:
            raise ShapeMismatch(f"parameter tuple {tuple(c)} does not match |y| = {self.ky}")
        j = tuple_index(c, self.m)
        hit = self._cache.get(j)
        if hit is None:
            hit = self._cache[j] = DefinableSet(self.kx, self.m, self.matrix[:, j])
        return hit

    def signed(self, c: Sequence[int], positive: bool) -> DefinableSet:
        inst = self.instance(c)
        return inst if positive else ~inst


def delta_partition(S: FiniteStructure, delta: Sequence[PartitionedFormula], A: Iterable[int]):
    """Atoms of the algebra generated by the Delta-instances over ``A``.

    Returns ``(instances, patterns, atoms)`` where ``instances`` lists the
    (formula index, parameter tuple) generators in order, ``patterns[i]`` is
    the sign vector of atom ``i`` over them, and atoms are sorted by pattern.
    """
    if not delta:
        raise InvalidArgument("Delta must be nonempty")
    contexts = {len(phi.x) for phi in delta}
    if len(contexts) != 1:
        raise ShapeMismatch("all members of Delta must share the object context length")
    k = contexts.pop()
    params = sorted(set(A))
    for a in params:
        if not 0 <= a < S.m:
            raise InvalidArgument(f"parameter {a} outside universe")
    generators, columns = [], []
    for l, phi in enumerate(delta):
        table = phi.instances(S)
        for c in itertools.product(params, repeat=table.ky):
            generators.append((l, c))
            columns.append(table.matrix[:, tuple_index(c, S.m)])
    if not columns:
        return generators, [()], [DefinableSet.full(k, S.m)]
    signs = np.stack(columns, axis=1)
    patterns, labels = np.unique(signs, axis=0, return_inverse=True)
    labels = labels.reshape(-1)
    atoms = [DefinableSet(k, S.m, labels == i) for i in range(len(patterns))]
    return generators, [tuple(bool(s) for s in row) for row in patterns], atoms


def delta_atoms(S: FiniteStructure, delta: Sequence[PartitionedFormula], A: Iterable[int]) -> list[DefinableSet]:
    return delta_partition(S, delta, A)[2]


def require_context(D: DefinableSet, k: int, m: int, what: str = "set") -> None:
    if (D.k, D.m) != (k, m):
        raise ContextMismatch(f"{what} lives in M^{D.k} with m={D.m}, expected M^{k} with m={m}")
