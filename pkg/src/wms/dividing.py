"""k-dividing modulo an ideal: witness checks, orbit searches, uniform sequences.

"Same type over A" is Aut(S/A)-orbit membership.  A finite witness sequence
stands in for an infinite one; searches take its length as ``max_len``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ._search import Budget, first_hit
from .errors import ArityMismatch, InvalidArgument, OrbitTooLarge
from .ideals import IdealSchema
from .logic import DefinableSet, FiniteStructure, InstanceTable, PartitionedFormula, orbit, same_type_over

DEFAULT_ORBIT_LIMIT = 10**4


@dataclass(frozen=True)
class DividingWitness:
    k: int
    sequence: tuple[tuple[int, ...], ...]
    base: tuple[int, ...]
    psi: str = ""

    def to_json(self) -> dict:
        return {"k": self.k, "sequence": [list(c) for c in self.sequence], "base": list(self.base), "psi": self.psi}


def _check_params(table: InstanceTable, tuples: Iterable[Sequence[int]]) -> None:
    for t in tuples:
        if len(t) != table.ky:
            raise ArityMismatch(f"parameter tuple {tuple(t)} does not match |y| = {table.ky}")


def _meet(table: InstanceTable, tuples: Iterable[Sequence[int]]) -> DefinableSet:
    out = None
    for t in tuples:
        inst = table.instance(t)
        out = inst if out is None else out & inst
    return out


def check_dividing_witness(
    S: FiniteStructure,
    I: IdealSchema,
    psi: PartitionedFormula,
    c: Sequence[int],
    A: Iterable[int],
    seq: Sequence[Sequence[int]],
    k: int,
) -> bool:
    if k < 1:
        raise InvalidArgument("k must be at least 1")
    if len(seq) < k:
        raise InvalidArgument(f"a {k}-dividing witness needs at least {k} tuples, got {len(seq)}")
    table = psi.instances(S)
    _check_params(table, [c, *seq])
    base = sorted(set(A))
    if not all(same_type_over(S, c, d, base) for d in seq):
        return False
    return all(I.is_thin(_meet(table, (seq[i] for i in combo))) for combo in itertools.combinations(range(len(seq)), k))


def search_k_dividing(
    S: FiniteStructure,
    I: IdealSchema,
    psi: PartitionedFormula,
    c: Sequence[int],
    A: Iterable[int],
    k: int,
    max_len: int,
    *,
    distinct: bool = False,
    orbit_limit: int = DEFAULT_ORBIT_LIMIT,
    workers: int = 1,
    budget: Optional[Budget] = None,
) -> Optional[DividingWitness]:
    """Lexicographically least length-``max_len`` witness inside the orbit of ``c``."""
    if k < 1:
        raise InvalidArgument("k must be at least 1")
    table = psi.instances(S)
    c = tuple(c)
    _check_params(table, [c])
    base = tuple(sorted(set(A)))
    if k == 1 and I.is_thin(table.instance(c)):
        return DividingWitness(1, (c,), base, str(psi))
    if max_len < k:
        raise InvalidArgument(f"max_len {max_len} is shorter than k = {k}")
    members = orbit(S, c, base, limit=orbit_limit)
    if len(members) > orbit_limit:
        raise OrbitTooLarge(f"orbit of {c} over {list(base)} exceeds {orbit_limit} tuples")
    budget = budget or Budget()

    def fits(seq: list[tuple[int, ...]], d: tuple[int, ...]) -> bool:
        # Only the k-subsets that contain the new element are new.
        for combo in itertools.combinations(range(len(seq)), k - 1):
            if not I.is_thin(_meet(table, [d, *(seq[i] for i in combo)])):
                return False
        return True

    def extend(seq: list[tuple[int, ...]]) -> Optional[list[tuple[int, ...]]]:
        if len(seq) == max_len:
            return seq
        for d in members:
            if distinct and d in seq:
                continue
            budget.tick()
            if fits(seq, d):
                found = extend(seq + [d])
                if found is not None:
                    return found
        return None

    hit = first_hit(members, lambda d: extend([d]) if fits([], d) else None, workers)
    if hit is None:
        return None
    return DividingWitness(k, tuple(hit[1]), base, str(psi))


@dataclass(frozen=True)
class UniformEntry:
    formula_index: int
    params: tuple[int, ...]
    witness: DividingWitness


@dataclass(frozen=True)
class UniformSequence:
    entries: tuple[UniformEntry, ...]
    delta: tuple[str, ...]
    k: int
    base: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def subsequence(self, start: int, stop: int, base: Optional[Iterable[int]] = None) -> UniformSequence:
        """A contiguous piece, optionally over a smaller base, keeping the stored witnesses."""
        sub_base = self.base if base is None else tuple(sorted(set(base)))
        if not set(sub_base) <= set(self.base):
            raise InvalidArgument("a subsequence base must be a subset of the original base")
        return UniformSequence(self.entries[start:stop], self.delta, self.k, sub_base)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "base": list(self.base),
            "delta": list(self.delta),
            "entries": [
                {"formula": e.formula_index, "params": list(e.params), "witness": [list(t) for t in e.witness.sequence]}
                for e in self.entries
            ],
        }


def _elements(tuples: Iterable[Sequence[int]]) -> set[int]:
    return {v for t in tuples for v in t}


def _shared_context(delta: Sequence[PartitionedFormula]) -> int:
    if not delta:
        raise InvalidArgument("Delta must be nonempty")
    ks = {len(phi.x) for phi in delta}
    if len(ks) != 1:
        raise ArityMismatch("members of Delta must share the object context")
    return ks.pop()


def search_uniform_sequence(
    S: FiniteStructure,
    I: IdealSchema,
    delta: Sequence[PartitionedFormula],
    A: Iterable[int],
    k: int,
    L: int,
    *,
    max_len: Optional[int] = None,
    orbit_limit: int = DEFAULT_ORBIT_LIMIT,
    budget: Optional[Budget] = None,
) -> Optional[UniformSequence]:
    """Depth-first search for a jointly wide sequence whose entries each k-divide.

    Entry ``i`` must k-divide over ``A`` plus the parameters of entries before
    it, certified by a dividing witness of length ``max_len`` (default k + 1).
    """
    if L < 1 or k < 1:
        raise InvalidArgument("L and k must be at least 1")
    kx = _shared_context(delta)
    base = tuple(sorted(set(A)))
    max_len = max_len or k + 1
    budget = budget or Budget()
    tables = [phi.instances(S) for phi in delta]
    candidates = [(l, a) for l, table in enumerate(tables) for a in table.parameters()]
    divides: dict[tuple, Optional[DividingWitness]] = {}

    def dividing(l: int, a: tuple[int, ...], over: tuple[int, ...]) -> Optional[DividingWitness]:
        key = (l, a, over)
        if key not in divides:
            divides[key] = search_k_dividing(S, I, delta[l], a, over, k, max_len, orbit_limit=orbit_limit, budget=budget)
        return divides[key]

    def extend(entries: list[UniformEntry], meet: DefinableSet) -> Optional[list[UniformEntry]]:
        if len(entries) == L:
            return entries
        over = tuple(sorted(set(base) | _elements(e.params for e in entries)))
        for l, a in candidates:
            budget.tick()
            joint = meet & tables[l].instance(a)
            if I.is_thin(joint):
                continue
            witness = dividing(l, a, over)
            if witness is None:
                continue
            found = extend(entries + [UniformEntry(l, a, witness)], joint)
            if found is not None:
                return found
        return None

    found = extend([], DefinableSet.full(kx, S.m))
    if found is None:
        return None
    return UniformSequence(tuple(found), tuple(map(str, delta)), k, base)


def check_uniform_sequence(
    S: FiniteStructure,
    I: IdealSchema,
    delta: Sequence[PartitionedFormula],
    seq: UniformSequence,
) -> bool:
    """Re-validate joint wideness and every stored dividing witness over its growing base."""
    kx = _shared_context(delta)
    tables = [phi.instances(S) for phi in delta]
    meet = DefinableSet.full(kx, S.m)
    for i, entry in enumerate(seq.entries):
        meet = meet & tables[entry.formula_index].instance(entry.params)
        over = set(seq.base) | _elements(e.params for e in seq.entries[:i])
        w = entry.witness
        # A k'-dividing witness with k' <= k also certifies k-dividing.
        if w.k > seq.k:
            return False
        if not check_dividing_witness(S, I, delta[entry.formula_index], entry.params, over, w.sequence, w.k):
            return False
    return I.is_wide(meet)


def max_uniform_length(
    S: FiniteStructure,
    I: IdealSchema,
    delta: Sequence[PartitionedFormula],
    A: Iterable[int],
    k: int,
    L_cap: int,
    **options,
) -> int:
    """Largest L <= L_cap admitting a uniform sequence (0 if none)."""
    best = 0
    for L in range(1, L_cap + 1):
        if search_uniform_sequence(S, I, delta, A, k, L, **options) is None:
            break
        best = L
    return best


SignedInstance = tuple[PartitionedFormula, Sequence[int], bool]


def check_fork_cover(
    S: FiniteStructure,
    I: IdealSchema,
    pi: Sequence[SignedInstance],
    A: Iterable[int],
    cover: Sequence[tuple[PartitionedFormula, Sequence[int]]],
    k: int,
    *,
    max_len: Optional[int] = None,
    orbit_limit: int = DEFAULT_ORBIT_LIMIT,
) -> bool:
    """Validate a proposed certificate: pi implies the cover and each cover member k-divides over A."""
    if not cover:
        raise InvalidArgument("the cover must be nonempty")
    kx = _shared_context([phi for phi, _, _ in pi] + [phi for phi, _ in cover])
    base = tuple(sorted(set(A)))
    meet = DefinableSet.full(kx, S.m)
    for phi, c, positive in pi:
        meet = meet & phi.instances(S).signed(tuple(c), positive)
    union = DefinableSet.empty(kx, S.m)
    for phi, c in cover:
        union = union | phi.instances(S).instance(tuple(c))
    if not meet.issubset(union):
        return False
    max_len = max_len or k + 1
    return all(
        search_k_dividing(S, I, phi, c, base, k, max_len, orbit_limit=orbit_limit) is not None for phi, c in cover
    )
