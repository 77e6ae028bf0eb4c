"""Negligibility ideals on definable sets.

An ideal decides, for each definable set D of a fixed context arity, whether D
is thin (negligible) or wide.  Cardinality-based kinds are arity-agnostic
unless pinned; cover/explicit kinds are tied to their family's arity.
"""

from __future__ import annotations

from dataclasses import dataclass, is_dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ArityMismatch, DegenerateUniverse, InvalidArgument
from .logic import DefinableSet, FiniteStructure, evaluate


def parse_rational(value) -> Fraction:
    try:
        return Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidArgument(f"not a rational number: {value!r}") from exc


class IdealSchema:
    kind = "abstract"
    # False for kinds that can fail the union axiom at a fixed finite scale.
    union_closed = True
    arity: Optional[int] = None

    def is_thin(self, D: DefinableSet) -> bool:
        self._check_arity(D.k)
        return self._thin(D)

    def is_wide(self, D: DefinableSet) -> bool:
        return not self.is_thin(D)

    def _check_arity(self, k: int) -> None:
        if self.arity is not None and self.arity != k:
            raise ArityMismatch(f"{self.kind} ideal applies to arity {self.arity}, got a set of arity {k}")

    def _thin(self, D: DefinableSet) -> bool:
        raise NotImplementedError

    def thin_rows(self, rows: np.ndarray, k: int, m: int) -> np.ndarray:
        """Thinness of each row of ``rows`` read as a subset of M^k."""
        self._check_arity(k)
        return np.array([self._thin(DefinableSet(k, m, row)) for row in rows], dtype=bool)

    def to_config(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_config()})"


class _CountingIdeal(IdealSchema):
    """Kinds whose verdict depends only on |D| and |M^k|."""

    def _thin_count(self, size, total, m):
        raise NotImplementedError

    def _thin(self, D: DefinableSet) -> bool:
        return bool(self._thin_count(D.size, D.m**D.k, D.m))

    def thin_rows(self, rows: np.ndarray, k: int, m: int) -> np.ndarray:
        self._check_arity(k)
        sizes = np.count_nonzero(rows, axis=1)
        return np.array([self._thin_count(int(s), m**k, m) for s in sizes], dtype=bool)


@dataclass(frozen=True, repr=False)
class TrivialIdeal(_CountingIdeal):
    arity: Optional[int] = None
    kind = "trivial"

    def _thin_count(self, size, total, m):
        return size == 0

    def to_config(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True, repr=False)
class ThresholdIdeal(_CountingIdeal):
    t: int
    arity: Optional[int] = None
    kind = "threshold"

    def __post_init__(self):
        if self.t < 0:
            raise InvalidArgument("threshold must be non-negative")

    @property
    def union_closed(self) -> bool:
        # Two disjoint sets of size t are thin, their union is not.
        return self.t == 0

    def _thin_count(self, size, total, m):
        return size <= self.t

    def to_config(self) -> dict:
        return {"kind": self.kind, "t": self.t}


@dataclass(frozen=True, repr=False)
class FractionIdeal(_CountingIdeal):
    epsilon: Fraction
    arity: Optional[int] = None
    kind = "fraction"
    # Two disjoint sets just under the cutoff are thin, their union need not be.
    union_closed = False

    def __post_init__(self):
        object.__setattr__(self, "epsilon", parse_rational(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise InvalidArgument("fraction epsilon must lie strictly between 0 and 1")

    def _thin_count(self, size, total, m):
        # |D| < eps * |M^k|, compared exactly.
        return size * self.epsilon.denominator < self.epsilon.numerator * total

    def to_config(self) -> dict:
        return {"kind": self.kind, "epsilon": str(self.epsilon)}


@dataclass(frozen=True, repr=False)
class CoarseIdeal(_CountingIdeal):
    """Wide iff log|D| >= alpha * log|M^k|.  Not union-closed at finite scale."""

    alpha: Fraction
    arity: Optional[int] = None
    kind = "coarse"
    union_closed = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", parse_rational(self.alpha))
        if not 0 < self.alpha <= 1:
            raise InvalidArgument("coarse alpha must lie in (0, 1]")

    def _thin_count(self, size, total, m):
        if m == 1:
            raise DegenerateUniverse("coarse dimension is undefined on a one-element universe")
        if size == 0:
            return True
        return size**self.alpha.denominator < total**self.alpha.numerator

    def to_config(self) -> dict:
        return {"kind": self.kind, "alpha": str(self.alpha)}


class CoverIdeal(IdealSchema):
    """Thin iff contained in the union of the family.

    Over a finite structure the union of any finite subfamily is bounded by the
    union of the whole family, so that union generates the ideal.
    """

    kind = "cover"

    def __init__(self, family: Sequence[DefinableSet], labels: Optional[Sequence[str]] = None):
        family = list(family)
        if not family:
            raise InvalidArgument(f"{self.kind} ideal needs a nonempty family")
        shapes = {(D.k, D.m) for D in family}
        if len(shapes) != 1:
            raise ArityMismatch(f"{self.kind} family members have different shapes")
        self.family = family
        self.labels = list(labels) if labels is not None else None
        self.arity, self.m = shapes.pop()
        union = family[0]
        for D in family[1:]:
            union = union | D
        self.union = union

    def _thin(self, D: DefinableSet) -> bool:
        if D.m != self.m:
            raise ArityMismatch(f"{self.kind} family lives on a universe of size {self.m}, not {D.m}")
        return D.issubset(self.union)

    def to_config(self) -> dict:
        if self.labels is not None:
            return {"kind": self.kind, "family": list(self.labels)}
        return {"kind": self.kind, "family": [[list(t) for t in D.tuples()] for D in self.family]}


class ExplicitIdeal(CoverIdeal):
    """Ideal generated by an explicit list of thin sets."""

    kind = "explicit"

    def to_config(self) -> dict:
        return {"kind": self.kind, "thin": [[list(t) for t in D.tuples()] for D in self.family]}


class ProductIdeal(IdealSchema):
    """Fubini product: D is thin iff its base points with wide fibers form a thin set."""

    kind = "product"

    def __init__(self, left: IdealSchema, right: IdealSchema, left_arity: Optional[int] = None):
        self.left = left
        self.right = right
        self.left_arity = left_arity or left.arity or 1
        if left.arity is not None and left.arity != self.left_arity:
            raise ArityMismatch("left arity disagrees with the left ideal")
        self.arity = self.left_arity + right.arity if right.arity is not None else None
        self.union_closed = left.union_closed and right.union_closed

    def _split(self, k: int) -> int:
        right_k = k - self.left_arity
        if right_k < 1:
            raise ArityMismatch(f"product over a left arity {self.left_arity} needs sets of arity > {self.left_arity}")
        return right_k

    def _thin(self, D: DefinableSet) -> bool:
        right_k = self._split(D.k)
        rows = D.bits.reshape(D.m**self.left_arity, D.m**right_k)
        wide_base = ~self.right.thin_rows(rows, right_k, D.m)
        return self.left.is_thin(DefinableSet(self.left_arity, D.m, wide_base))

    def to_config(self) -> dict:
        return {"kind": self.kind, "left": self.left.to_config(), "right": self.right.to_config()}


def product(left: IdealSchema, right: IdealSchema, left_arity: Optional[int] = None) -> ProductIdeal:
    return ProductIdeal(left, right, left_arity)


def power(I: IdealSchema, n: int) -> IdealSchema:
    """Left-nested power: power(I, n+1) = product(power(I, n), I)."""
    if n < 1:
        raise InvalidArgument("power needs n >= 1")
    if I.arity not in (None, 1):
        raise ArityMismatch("powers are taken of one-variable ideals")
    unit = replace(I, arity=1) if I.arity is None and is_dataclass(I) else I
    out = unit
    for level in range(1, n):
        out = ProductIdeal(out, unit, left_arity=level)
    return out


def is_wide(I: IdealSchema, D: DefinableSet) -> bool:
    return I.is_wide(D)


def is_thin(I: IdealSchema, D: DefinableSet) -> bool:
    return I.is_thin(D)


def is_wide_type(I: IdealSchema, instances: Sequence[tuple[DefinableSet, bool]], top: Optional[DefinableSet] = None) -> bool:
    """Wideness of the conjunction of signed instances (``True`` = positive).

    An empty list is the empty conjunction; pass ``top`` to fix its shape.
    """
    if not instances:
        if top is None:
            raise InvalidArgument("an empty type needs an explicit top set for its shape")
        return I.is_wide(top)
    shapes = {(D.k, D.m) for D, _ in instances}
    if len(shapes) != 1:
        raise ArityMismatch("type instances have different arities")
    meet = top
    for D, positive in instances:
        signed = D if positive else ~D
        meet = signed if meet is None else meet & signed
    return I.is_wide(meet)


def from_config(config: Mapping, structure: Optional[FiniteStructure] = None, context: str = "x") -> IdealSchema:
    """Build an ideal from its JSON config; cover families need the structure."""
    try:
        kind = config["kind"]
        arity = config.get("arity")
        if kind == "trivial":
            return TrivialIdeal(arity)
        if kind == "threshold":
            return ThresholdIdeal(int(config["t"]), arity)
        if kind == "fraction":
            return FractionIdeal(parse_rational(config["epsilon"]), arity)
        if kind == "coarse":
            return CoarseIdeal(parse_rational(config["alpha"]), arity)
        if kind == "product":
            return ProductIdeal(
                from_config(config["left"], structure, context),
                from_config(config["right"], structure, context),
                config.get("left_arity"),
            )
        if kind in ("cover", "explicit"):
            if structure is None:
                raise InvalidArgument(f"{kind} ideals need a structure to evaluate their family")
            members = config["family" if kind == "cover" else "thin"]
            ctx = config.get("context", context)
            family = [
                evaluate(structure, item, ctx)
                if isinstance(item, str)
                else DefinableSet.from_tuples(len(ctx.split(",")), structure.m, item)
                for item in members
            ]
            labels = members if all(isinstance(item, str) for item in members) else None
            return CoverIdeal(family, labels) if kind == "cover" else ExplicitIdeal(family)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgument(f"malformed ideal config: {exc}") from exc
    raise InvalidArgument(f"unknown ideal kind {config.get('kind')!r}")
