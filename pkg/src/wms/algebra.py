"""Finite Boolean algebras in powerset-of-atoms form.

Elements are ints used as bit-vectors over the atoms.  Every ideal of a
finite Boolean algebra is the principal ideal of the join of its members,
so ideals are stored by their generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

from .errors import ImproperIdeal, InvalidArgument, NoWideExtension

MAX_ATOMS = 62


def format_element(a: int) -> str:
    """Debug form of an element as its set of atom indices, e.g. ``{0,2}``."""
    return "{" + ",".join(str(i) for i in range(a.bit_length()) if a >> i & 1) + "}"


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, starting with ``mask`` and ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class FiniteBooleanAlgebra:
    atom_count: int

    def __post_init__(self):
        if not 1 <= self.atom_count <= MAX_ATOMS:
            raise InvalidArgument(f"atom_count must be in 1..{MAX_ATOMS}, got {self.atom_count}")

    @property
    def top(self) -> int:
        return (1 << self.atom_count) - 1

    @property
    def bottom(self) -> int:
        return 0

    def __len__(self) -> int:
        return 1 << self.atom_count

    def elements(self) -> range:
        return range(1 << self.atom_count)

    def atoms(self) -> list[int]:
        return [1 << i for i in range(self.atom_count)]

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def complement(self, a: int) -> int:
        return self.top & ~a

    def symmetric_difference(self, a: int, b: int) -> int:
        return a ^ b

    def leq(self, a: int, b: int) -> bool:
        return a & b == a

    def meet_all(self, xs: Iterable[int]) -> int:
        return reduce(int.__and__, xs, self.top)

    def check(self, a: int) -> int:
        if not 0 <= a <= self.top:
            raise InvalidArgument(f"{a} is not an element of a {self.atom_count}-atom algebra")
        return a


@dataclass(frozen=True)
class PrincipalIdeal:
    algebra: FiniteBooleanAlgebra
    generator: int

    def __post_init__(self):
        self.algebra.check(self.generator)

    @property
    def proper(self) -> bool:
        return self.generator != self.algebra.top

    def __contains__(self, a: int) -> bool:
        return a & ~self.generator == 0

    def require_proper(self) -> None:
        if not self.proper:
            raise ImproperIdeal(f"generator {format_element(self.generator)} is the top element")


@dataclass(frozen=True)
class Ultrafilter:
    algebra: FiniteBooleanAlgebra
    atom_index: int

    def __post_init__(self):
        if not 0 <= self.atom_index < self.algebra.atom_count:
            raise InvalidArgument(f"atom index {self.atom_index} out of range")

    def __contains__(self, a: int) -> bool:
        return bool(a >> self.atom_index & 1)

    def members(self) -> frozenset[int]:
        return frozenset(a for a in self.algebra.elements() if a in self)


def powerset_algebra(n: int) -> FiniteBooleanAlgebra:
    if n < 1:
        raise InvalidArgument("a powerset algebra needs at least one atom")
    return FiniteBooleanAlgebra(n)


def ultrafilters(B: FiniteBooleanAlgebra) -> list[Ultrafilter]:
    return [Ultrafilter(B, i) for i in range(B.atom_count)]


@dataclass(frozen=True)
class Projection:
    """The quotient map B -> B/I, restricting to surviving atoms and packing them."""

    source: FiniteBooleanAlgebra
    target: FiniteBooleanAlgebra
    surviving: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return sum(1 << j for j, i in enumerate(self.surviving) if a >> i & 1)

    def lift(self, q: int) -> int:
        """The least element of B mapping to ``q``."""
        return sum(1 << i for j, i in enumerate(self.surviving) if q >> j & 1)

    def pullback(self, V: Ultrafilter) -> frozenset[int]:
        """Members of B whose image lies in the quotient ultrafilter ``V``."""
        return frozenset(a for a in self.source.elements() if self(a) in V)


def quotient(B: FiniteBooleanAlgebra, I: PrincipalIdeal) -> tuple[FiniteBooleanAlgebra, Projection]:
    I.require_proper()
    surviving = tuple(i for i in range(B.atom_count) if not I.generator >> i & 1)
    Q = FiniteBooleanAlgebra(len(surviving))
    return Q, Projection(B, Q, surviving)


def wide_ultrafilters(B: FiniteBooleanAlgebra, I: PrincipalIdeal) -> list[Ultrafilter]:
    I.require_proper()
    return [Ultrafilter(B, i) for i in range(B.atom_count) if not I.generator >> i & 1]


def _nonempty(X: Iterable[int]) -> list[int]:
    xs = list(X)
    if not xs:
        raise InvalidArgument("the finite meet property is not defined for the empty set")
    return xs


def is_i_fmp(B: FiniteBooleanAlgebra, I: PrincipalIdeal, X: Iterable[int]) -> bool:
    # The total meet lies below every finite meet and I is downward closed.
    return B.meet_all(_nonempty(X)) not in I


def saturate(B: FiniteBooleanAlgebra, I: PrincipalIdeal, X: Iterable[int]) -> frozenset[int]:
    """Union of the I-congruence classes of the members of ``X``."""
    keep = B.complement(I.generator)
    cores = {x & keep for x in X}
    return frozenset(core | s for core in cores for s in submasks(I.generator))


def extend_to_wide_ultrafilter(B: FiniteBooleanAlgebra, I: PrincipalIdeal, X: Iterable[int]) -> Ultrafilter:
    xs = _nonempty(X)
    candidates = B.meet_all(xs) & ~I.generator
    if not candidates:
        raise NoWideExtension("the meet of X lies in the ideal")
    return Ultrafilter(B, (candidates & -candidates).bit_length() - 1)

