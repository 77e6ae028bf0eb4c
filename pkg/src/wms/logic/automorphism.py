"""Automorphisms of finite structures by backtracking, and orbit-based types.

Permutations are tuples ``p`` with ``p[v]`` the image of ``v``.  Domain
vertices are assigned in increasing order with candidate images tried in
increasing order, so results come out lexicographically and the identity
is always first.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from ..errors import ShapeMismatch
from .definable import DefinableSet, all_tuples, index_tuple
from .structure import FiniteStructure

Permutation = tuple[int, ...]


def vertex_invariants(S: FiniteStructure) -> list[tuple]:
    """Aut(S)-invariant colour of each vertex: positional degrees and loops, refined once."""
    cached = S._cache.get("invariants")
    if cached is not None:
        return cached
    m = S.m
    names = sorted(S.signature.relations)
    base = [[] for _ in range(m)]
    for name in names:
        table = S.table(name)
        r = table.ndim
        for p in range(r):
            counts = table.sum(axis=tuple(a for a in range(r) if a != p)) if r > 1 else table.astype(int)
            for v in range(m):
                base[v].append(int(counts[v]))
        diag = table[(np.arange(m),) * r]
        for v in range(m):
            base[v].append(bool(diag[v]))
    colors = [tuple(c) for c in base]
    # One refinement round over binary relations: multiset of neighbour colours.
    refined = []
    for v in range(m):
        extra = []
        for name in names:
            table = S.table(name)
            if table.ndim == 2:
                extra.append(tuple(sorted(colors[u] for u in np.flatnonzero(table[v]))))
                extra.append(tuple(sorted(colors[u] for u in np.flatnonzero(table[:, v]))))
        refined.append((colors[v], tuple(extra)))
    S._cache["invariants"] = refined
    return refined


class _Search:
    def __init__(self, S: FiniteStructure, pinned: Mapping[int, int]):
        self.S = S
        self.m = S.m
        self.tables = [S.table(name) for name in sorted(S.signature.relations)]
        colors = vertex_invariants(S)
        self.candidates: list[list[int]] = []
        for v in range(self.m):
            if v in pinned:
                w = pinned[v]
                self.candidates.append([w] if colors[w] == colors[v] else [])
            else:
                self.candidates.append([w for w in range(self.m) if colors[w] == colors[v]])
        self.image = [-1] * self.m
        self.used = [False] * self.m

    def _consistent(self, v: int, w: int) -> bool:
        dom = list(range(v))
        img = self.image[:v]
        for table in self.tables:
            r = table.ndim
            if r == 1:
                if table[v] != table[w]:
                    return False
            elif r == 2:
                if table[v, v] != table[w, w]:
                    return False
                if v and (
                    not np.array_equal(table[dom, v], table[img, w])
                    or not np.array_equal(table[v, dom], table[w, img])
                ):
                    return False
            else:
                pool = dom + [v]
                mapped = {u: self.image[u] for u in dom}
                mapped[v] = w
                for t in itertools.product(pool, repeat=r):
                    if v in t and table[t] != table[tuple(mapped[u] for u in t)]:
                        return False
        return True

    def run(self) -> Iterator[Permutation]:
        v = 0
        choice = [0] * (self.m + 1)
        while v >= 0:
            if v == self.m:
                yield tuple(self.image)
                v -= 1
                self._release(v)
                continue
            cands = self.candidates[v]
            while choice[v] < len(cands):
                w = cands[choice[v]]
                choice[v] += 1
                if not self.used[w] and self._consistent(v, w):
                    self.image[v] = w
                    self.used[w] = True
                    v += 1
                    choice[v] = 0
                    break
            else:
                v -= 1
                if v >= 0:
                    self._release(v)

    def _release(self, v: int) -> None:
        self.used[self.image[v]] = False
        self.image[v] = -1


def automorphisms(S: FiniteStructure, A: Iterable[int] = ()) -> list[Permutation]:
    """All automorphisms of ``S`` fixing ``A`` pointwise, identity first."""
    base = tuple(sorted(set(A)))
    key = ("aut", base)
    cached = S._cache.get(key)
    if cached is None:
        cached = S._cache[key] = list(_Search(S, {a: a for a in base}).run())
    return cached


def find_automorphism(S: FiniteStructure, a: Sequence[int], b: Sequence[int], A: Iterable[int] = ()) -> Optional[Permutation]:
    """Least automorphism over ``A`` sending ``a`` to ``b`` coordinatewise, if any."""
    if len(a) != len(b):
        raise ShapeMismatch(f"tuples {tuple(a)} and {tuple(b)} have different lengths")
    pinned = {x: x for x in A}
    for u, w in zip(a, b):
        if pinned.setdefault(u, w) != w:
            return None
    if len(set(pinned.values())) != len(pinned):
        return None
    return next(_Search(S, pinned).run(), None)


def same_type_over(S: FiniteStructure, a: Sequence[int], b: Sequence[int], A: Iterable[int] = ()) -> bool:
    return find_automorphism(S, a, b, A) is not None


def orbit(S: FiniteStructure, c: Sequence[int], A: Iterable[int] = (), limit: Optional[int] = None) -> list[tuple[int, ...]]:
    """The Aut(S/A)-orbit of ``c`` in lexicographic order.

    Stops early and returns ``limit + 1`` members once the orbit is known to
    exceed ``limit``.
    """
    base = tuple(sorted(set(A)))
    c = tuple(c)
    found: list[tuple[int, ...]] = []
    for d in all_tuples(len(c), S.m):
        if same_type_over(S, c, d, base):
            found.append(d)
            if limit is not None and len(found) > limit:
                break
    return found


def tuple_orbits(S: FiniteStructure, k: int, A: Iterable[int] = ()) -> list[DefinableSet]:
    """Partition of M^k into Aut(S/A)-orbits, ordered by least member."""
    m = S.m
    labels = np.full(m**k, -1, dtype=np.int64)
    group = automorphisms(S, A)
    perms = np.array(group, dtype=np.int64)
    orbits = []
    for i in range(m**k):
        if labels[i] >= 0:
            continue
        t = index_tuple(i, k, m)
        images = np.zeros(len(perms), dtype=np.int64)
        for v in t:
            images = images * m + perms[:, v]
        labels[images] = len(orbits)
        orbits.append(DefinableSet(k, m, labels == len(orbits)))
    return orbits


def apply(sigma: Permutation, t: Sequence[int]) -> tuple[int, ...]:
    return tuple(sigma[v] for v in t)
