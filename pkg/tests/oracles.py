"""Brute-force reference implementations, written without the library's shortcuts."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np

from wms.logic.syntax import And, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, Rel, Var


# ---------------------------------------------------------------- Boolean algebras


def brute_ultrafilters(atom_count: int) -> list[frozenset[int]]:
    """Ultrafilters of the powerset algebra, found among all principal filters by the axioms."""
    top = (1 << atom_count) - 1
    elements = range(top + 1)
    found = []
    for x in elements:
        up = frozenset(a for a in elements if a & x == x)
        if 0 in up:
            continue
        if all((a in up) != ((top ^ a) in up) for a in elements):
            found.append(up)
    return found


def all_finite_meets(xs) -> set[int]:
    """Closure of a nonempty set under binary meet."""
    closure = set(xs)
    frontier = set(xs)
    while frontier:
        fresh = {a & b for a in frontier for b in closure} - closure
        closure |= fresh
        frontier = fresh
    return closure


def fmp_oracle(xs, generator: int) -> bool:
    return all(meet & ~generator != 0 for meet in all_finite_meets(xs))


def fmp_table(elements: list[int], generator: int, top: int) -> np.ndarray:
    """For every subset mask of ``elements``: do all nonempty sub-families meet outside the ideal?

    Subset-sum dynamic programming: meets are built one element at a time, then
    each mask is AND-ed with all of its submasks, one bit per pass.
    """
    meet = np.empty(1 << len(elements), dtype=np.int64)
    meet[0] = top
    for b, e in enumerate(elements):
        meet[1 << b : 2 << b] = meet[: 1 << b] & e
    ok = (meet & ~generator) != 0
    ok[0] = True
    for b in range(len(elements)):
        view = ok.reshape(-1, 2, 1 << b)
        view[:, 1, :] &= view[:, 0, :]
    return ok


# ---------------------------------------------------------------- first-order logic


def _term(t, env):
    return env[t.name] if isinstance(t, Var) else t.index


def naive_holds(S, f, env: dict) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Rel):
        return tuple(_term(t, env) for t in f.terms) in S.relations[f.name]
    if isinstance(f, Eq):
        return _term(f.left, env) == _term(f.right, env)
    if isinstance(f, Not):
        return not naive_holds(S, f.body, env)
    if isinstance(f, And):
        return naive_holds(S, f.left, env) and naive_holds(S, f.right, env)
    if isinstance(f, Or):
        return naive_holds(S, f.left, env) or naive_holds(S, f.right, env)
    if isinstance(f, Implies):
        return (not naive_holds(S, f.left, env)) or naive_holds(S, f.right, env)
    if isinstance(f, Iff):
        return naive_holds(S, f.left, env) == naive_holds(S, f.right, env)
    if isinstance(f, (Exists, Forall)):
        quantifier = any if isinstance(f, Exists) else all
        return quantifier(
            naive_holds(S, f.body, {**env, **dict(zip(f.variables, values))})
            for values in itertools.product(range(S.m), repeat=len(f.variables))
        )
    raise TypeError(f)


def naive_extension(S, f, ctx) -> set[tuple[int, ...]]:
    return {t for t in itertools.product(range(S.m), repeat=len(ctx)) if naive_holds(S, f, dict(zip(ctx, t)))}


def brute_automorphisms(S, fixed=()) -> list[tuple[int, ...]]:
    out = []
    for p in itertools.permutations(range(S.m)):
        if any(p[a] != a for a in fixed):
            continue
        if all({tuple(p[v] for v in t) for t in tuples} == set(tuples) for tuples in S.relations.values()):
            out.append(p)
    return out


def brute_orbits(S, k: int, fixed=()) -> list[frozenset[tuple[int, ...]]]:
    group = brute_automorphisms(S, fixed)
    seen = set()
    orbits = []
    for t in itertools.product(range(S.m), repeat=k):
        if t in seen:
            continue
        orb = frozenset(tuple(p[v] for v in t) for p in group)
        seen |= orb
        orbits.append(orb)
    return orbits


# ---------------------------------------------------------------- ideals on plain sets


def thin_by_count(kind: str, size: int, total: int, param=None) -> bool:
    if kind == "trivial":
        return size == 0
    if kind == "threshold":
        return size <= param
    if kind == "fraction":
        return Fraction(size) < Fraction(param) * total
    raise ValueError(kind)


def product_thin(tuples: set, m: int, left_k: int, right_k: int, left_thin, right_thin) -> bool:
    """Fubini product straight from the definition, on sets of tuples."""
    wide_base = set()
    for a in itertools.product(range(m), repeat=left_k):
        fiber = {t[left_k:] for t in tuples if t[:left_k] == a}
        if not right_thin(fiber, right_k):
            wide_base.add(a)
    return left_thin(wide_base, left_k)


# ---------------------------------------------------------------- ranks


def classical_rank(universe: frozenset, instances: list[frozenset], wide, cap: int) -> int:
    """Shelah 2-rank of ``universe`` with splits by ``instances``; -1 when thin, cap + 1 when past the cap."""

    @lru_cache(maxsize=None)
    def at_least(D: frozenset, n: int) -> bool:
        if not wide(D):
            return False
        if n == 0:
            return True
        return any(at_least(D & inst, n - 1) and at_least(D - inst, n - 1) for inst in instances)

    if not wide(universe):
        return -1
    n = 0
    while n <= cap and at_least(universe, n + 1):
        n += 1
    return n
